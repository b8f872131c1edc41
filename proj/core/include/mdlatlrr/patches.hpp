#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mdlatlrr/image.hpp"
#include "mdlatlrr/linalg.hpp"

namespace mdlatlrr {

/// Sliding-window layout of an image: n x n windows moved by `stride` pixels.
/// When (H - n) or (W - n) is not a multiple of the stride the image is
/// extended by edge replication on the bottom/right; the pad amounts are kept
/// so reconstruction can crop them off again.
struct PatchGeometry {
    std::size_t image_height = 0;
    std::size_t image_width = 0;
    std::size_t patch_size = 0;
    std::size_t stride = 0;
    std::size_t pad_bottom = 0;
    std::size_t pad_right = 0;

    /// Validates n and s against the image and derives the padding.
    /// Throws ArgumentError for n < 2, n > min(H, W), s < 1 or s > n.
    static PatchGeometry for_image(std::size_t height, std::size_t width,
                                   std::size_t patch_size, std::size_t stride);

    std::size_t padded_height() const noexcept { return image_height + pad_bottom; }
    std::size_t padded_width() const noexcept { return image_width + pad_right; }
    std::size_t windows_down() const noexcept { return (padded_height() - patch_size) / stride + 1; }
    std::size_t windows_across() const noexcept { return (padded_width() - patch_size) / stride + 1; }
    std::size_t patch_count() const noexcept { return windows_down() * windows_across(); }
    std::size_t patch_length() const noexcept { return patch_size * patch_size; }

    /// Top-left corner (in padded coordinates) of window `index`; windows are
    /// numbered row by row.
    std::size_t window_row(std::size_t index) const noexcept { return (index / windows_across()) * stride; }
    std::size_t window_col(std::size_t index) const noexcept { return (index % windows_across()) * stride; }

    bool operator==(const PatchGeometry&) const = default;
};

/// N x M matrix of vectorized patches (N = n^2, one column per window, pixels
/// row-major inside a patch) together with the geometry needed to invert it.
struct PatchMatrix {
    PatchGeometry geometry;
    Matrix mat;
};

/// Edge-replicating pad to the geometry's padded size.
Image pad_image(const Image& img, const PatchGeometry& geometry);

/// Sliding-window extraction followed by reshuffling into columns.
PatchMatrix extract_patches(const Image& img, std::size_t patch_size, std::size_t stride);

/// Inverse of extract_patches: every output pixel is the mean of all window
/// contributions covering it; padding is cropped away.
/// Throws DataError if the matrix shape disagrees with the geometry.
Image reconstruct_image(const PatchMatrix& pm);

/// Column -> n x n patch (row-major). Throws ArgumentError on length mismatch.
Matrix reshape_patch(std::span<const double> column, std::size_t patch_size);
Matrix reshape_patch(const Vector& column, std::size_t patch_size);

/// n x n patch -> column, the inverse of reshape_patch.
Vector vectorize_patch(const Matrix& patch);

/// Copies windows [first, first + out.cols()) of an already padded image into
/// the columns of `out` (which must have patch_length() rows).
void extract_window_block(const Image& padded, const PatchGeometry& geometry,
                          std::size_t first, Matrix& out);

/// Streaming form of reconstruct_image. Blocks of patch columns are added in
/// window order; finish() divides by the exact per-pixel coverage counts.
class OverlapAccumulator {
public:
    explicit OverlapAccumulator(const PatchGeometry& geometry);

    /// Adds columns for windows [first, first + block.cols()).
    void add_block(std::size_t first, const Matrix& block);

    Image finish() const;

    /// Number of windows covering padded pixel (row, col).
    std::size_t coverage(std::size_t row, std::size_t col) const noexcept {
        return row_cover_[row] * col_cover_[col];
    }

private:
    PatchGeometry geometry_;
    std::vector<double> sums_;
    std::vector<std::size_t> row_cover_;
    std::vector<std::size_t> col_cover_;
};

/// Number of windows processed per block by the streaming pipelines.
inline constexpr std::size_t kWindowBlock = 2048;

}  // namespace mdlatlrr
