#include "mdlatlrr/decompose.hpp"

#include <algorithm>
#include <string>

#include "mdlatlrr/error.hpp"

namespace mdlatlrr {
namespace {

// Runs L * P(img) block by block; returns R(.) of the product and optionally
// stores the full patch-domain result.
Image project_level(const Image& img, const ProjectionMatrix& proj, std::size_t stride,
                    PatchMatrix* keep) {
    const PatchGeometry g =
        PatchGeometry::for_image(img.height(), img.width(), proj.patch_size(), stride);
    const Image padded = pad_image(img, g);
    const auto dim = static_cast<Eigen::Index>(g.patch_length());
    if (keep != nullptr) {
        keep->geometry = g;
        keep->mat.resize(dim, static_cast<Eigen::Index>(g.patch_count()));
    }
    OverlapAccumulator acc(g);
    Matrix patches;
    Matrix projected;
    for (std::size_t first = 0; first < g.patch_count(); first += kWindowBlock) {
        const auto count = static_cast<Eigen::Index>(std::min(kWindowBlock, g.patch_count() - first));
        patches.resize(dim, count);
        extract_window_block(padded, g, first, patches);
        projected.noalias() = proj.matrix() * patches;
        acc.add_block(first, projected);
        if (keep != nullptr) keep->mat.middleCols(static_cast<Eigen::Index>(first), count) = projected;
    }
    return acc.finish();
}

}  // namespace

Image Decomposition::reconstruct() const {
    Image out = base;
    for (const Image& d : detail_images) out += d;
    return out;
}

LevelSplit dlatlrr(const Image& img, const ProjectionMatrix& proj, std::size_t stride) {
    LevelSplit split;
    split.detail_image = project_level(img, proj, stride, &split.detail);
    split.base = img - split.detail_image;
    return split;
}

Decomposition mdlatlrr(const Image& img, const ProjectionMatrix& proj, std::size_t levels,
                       std::size_t stride, bool keep_patch_matrices) {
    if (levels < 1 || levels > kMaxLevels) {
        throw ArgumentError("decomposition levels must lie in [1, " + std::to_string(kMaxLevels) +
                            "], got " + std::to_string(levels));
    }
    Decomposition dec;
    dec.levels = levels;
    dec.stride = stride;
    dec.patch_size = proj.patch_size();
    dec.base = img;
    for (std::size_t i = 0; i < levels; ++i) {
        PatchMatrix* keep = nullptr;
        if (keep_patch_matrices) keep = &dec.details.emplace_back();
        Image detail = project_level(dec.base, proj, stride, keep);
        dec.base -= detail;
        dec.detail_images.push_back(std::move(detail));
    }
    return dec;
}

}  // namespace mdlatlrr
