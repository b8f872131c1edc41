#include "mdlatlrr/patches.hpp"

#include <algorithm>
#include <string>

#include "mdlatlrr/error.hpp"

namespace mdlatlrr {
namespace {

// Windows along one axis of length `padded` whose span contains `pos`.
std::vector<std::size_t> axis_coverage(std::size_t padded, std::size_t n, std::size_t s) {
    std::vector<std::size_t> cover(padded, 0);
    for (std::size_t origin = 0; origin + n <= padded; origin += s) {
        for (std::size_t k = 0; k < n; ++k) ++cover[origin + k];
    }
    return cover;
}

std::size_t pad_for(std::size_t extent, std::size_t n, std::size_t s) {
    const std::size_t rem = (extent - n) % s;
    return rem == 0 ? 0 : s - rem;
}

}  // namespace

PatchGeometry PatchGeometry::for_image(std::size_t height, std::size_t width,
                                       std::size_t patch_size, std::size_t stride) {
    if (patch_size < 2) {
        throw ArgumentError("patch size must be at least 2, got " + std::to_string(patch_size));
    }
    if (patch_size > std::min(height, width)) {
        throw ArgumentError("patch size " + std::to_string(patch_size) + " exceeds image " +
                            std::to_string(height) + "x" + std::to_string(width));
    }
    if (stride < 1 || stride > patch_size) {
        throw ArgumentError("stride must lie in [1, " + std::to_string(patch_size) + "], got " +
                            std::to_string(stride));
    }
    PatchGeometry g;
    g.image_height = height;
    g.image_width = width;
    g.patch_size = patch_size;
    g.stride = stride;
    g.pad_bottom = pad_for(height, patch_size, stride);
    g.pad_right = pad_for(width, patch_size, stride);
    return g;
}

Image pad_image(const Image& img, const PatchGeometry& g) {
    if (img.height() != g.image_height || img.width() != g.image_width) {
        throw ArgumentError("pad_image: image does not match geometry");
    }
    if (g.pad_bottom == 0 && g.pad_right == 0) return img;
    Image out(g.padded_height(), g.padded_width());
    for (std::size_t r = 0; r < out.height(); ++r) {
        const std::size_t src_r = std::min(r, g.image_height - 1);
        for (std::size_t c = 0; c < out.width(); ++c) {
            out(r, c) = img(src_r, std::min(c, g.image_width - 1));
        }
    }
    return out;
}

void extract_window_block(const Image& padded, const PatchGeometry& g, std::size_t first,
                          Matrix& out) {
    const std::size_t n = g.patch_size;
    const auto cols = static_cast<std::size_t>(out.cols());
    if (static_cast<std::size_t>(out.rows()) != g.patch_length() ||
        first + cols > g.patch_count() || padded.height() != g.padded_height() ||
        padded.width() != g.padded_width()) {
        throw ArgumentError("extract_window_block: block does not fit the patch geometry");
    }
    for (std::size_t j = 0; j < cols; ++j) {
        const std::size_t top = g.window_row(first + j);
        const std::size_t left = g.window_col(first + j);
        double* dst = out.col(static_cast<Eigen::Index>(j)).data();
        for (std::size_t r = 0; r < n; ++r) {
            const double* src = padded.row(top + r) + left;
            std::copy(src, src + n, dst + r * n);
        }
    }
}

PatchMatrix extract_patches(const Image& img, std::size_t patch_size, std::size_t stride) {
    PatchMatrix pm;
    pm.geometry = PatchGeometry::for_image(img.height(), img.width(), patch_size, stride);
    const Image padded = pad_image(img, pm.geometry);
    pm.mat.resize(static_cast<Eigen::Index>(pm.geometry.patch_length()),
                  static_cast<Eigen::Index>(pm.geometry.patch_count()));
    extract_window_block(padded, pm.geometry, 0, pm.mat);
    return pm;
}

OverlapAccumulator::OverlapAccumulator(const PatchGeometry& geometry)
    : geometry_(geometry),
      sums_(geometry.padded_height() * geometry.padded_width(), 0.0),
      row_cover_(axis_coverage(geometry.padded_height(), geometry.patch_size, geometry.stride)),
      col_cover_(axis_coverage(geometry.padded_width(), geometry.patch_size, geometry.stride)) {}

void OverlapAccumulator::add_block(std::size_t first, const Matrix& block) {
    const std::size_t n = geometry_.patch_size;
    const std::size_t width = geometry_.padded_width();
    if (static_cast<std::size_t>(block.rows()) != geometry_.patch_length() ||
        first + static_cast<std::size_t>(block.cols()) > geometry_.patch_count()) {
        throw DataError("patch block does not fit the patch geometry");
    }
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
        const std::size_t top = geometry_.window_row(first + static_cast<std::size_t>(j));
        const std::size_t left = geometry_.window_col(first + static_cast<std::size_t>(j));
        const double* src = block.col(j).data();
        for (std::size_t r = 0; r < n; ++r) {
            double* dst = &sums_[(top + r) * width + left];
            for (std::size_t c = 0; c < n; ++c) dst[c] += src[r * n + c];
        }
    }
}

Image OverlapAccumulator::finish() const {
    Image out(geometry_.image_height, geometry_.image_width);
    const std::size_t width = geometry_.padded_width();
    for (std::size_t r = 0; r < out.height(); ++r) {
        for (std::size_t c = 0; c < out.width(); ++c) {
            out(r, c) = sums_[r * width + c] / static_cast<double>(coverage(r, c));
        }
    }
    return out;
}

Image reconstruct_image(const PatchMatrix& pm) {
    const PatchGeometry& g = pm.geometry;
    if (g.patch_size < 2 || g.stride < 1 || g.image_height < g.patch_size ||
        g.image_width < g.patch_size || (g.padded_height() - g.patch_size) % g.stride != 0 ||
        (g.padded_width() - g.patch_size) % g.stride != 0) {
        throw DataError("reconstruct_image: inconsistent patch geometry");
    }
    if (static_cast<std::size_t>(pm.mat.rows()) != g.patch_length() ||
        static_cast<std::size_t>(pm.mat.cols()) != g.patch_count()) {
        throw DataError("reconstruct_image: matrix is " + std::to_string(pm.mat.rows()) + "x" +
                        std::to_string(pm.mat.cols()) + " but geometry expects " +
                        std::to_string(g.patch_length()) + "x" + std::to_string(g.patch_count()));
    }
    OverlapAccumulator acc(g);
    acc.add_block(0, pm.mat);
    return acc.finish();
}

Matrix reshape_patch(std::span<const double> column, std::size_t patch_size) {
    if (column.size() != patch_size * patch_size) {
        throw ArgumentError("reshape_patch: column length " + std::to_string(column.size()) +
                            " is not " + std::to_string(patch_size) + "^2");
    }
    Matrix patch(static_cast<Eigen::Index>(patch_size), static_cast<Eigen::Index>(patch_size));
    for (std::size_t r = 0; r < patch_size; ++r) {
        for (std::size_t c = 0; c < patch_size; ++c) {
            patch(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                column[r * patch_size + c];
        }
    }
    return patch;
}

Matrix reshape_patch(const Vector& column, std::size_t patch_size) {
    return reshape_patch(std::span<const double>(column.data(), static_cast<std::size_t>(column.size())),
                         patch_size);
}

Vector vectorize_patch(const Matrix& patch) {
    Vector column(patch.size());
    Eigen::Index k = 0;
    for (Eigen::Index r = 0; r < patch.rows(); ++r) {
        for (Eigen::Index c = 0; c < patch.cols(); ++c) column[k++] = patch(r, c);
    }
    return column;
}

}  // namespace mdlatlrr
