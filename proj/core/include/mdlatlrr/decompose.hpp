#pragma once

#include <cstddef>
#include <vector>

#include "mdlatlrr/image.hpp"
#include "mdlatlrr/patches.hpp"
#include "mdlatlrr/projection.hpp"

namespace mdlatlrr {

inline constexpr std::size_t kMaxLevels = 8;

/// One application of the projection: V_d = L * P(I), I_d = R(V_d),
/// I_b = I - I_d. Nothing is clamped.
struct LevelSplit {
    PatchMatrix detail;
    Image detail_image;
    Image base;
};

/// Multi-level split: level i decomposes the base of level i - 1, so
/// base + sum(detail_images) reproduces the input.
struct Decomposition {
    /// V_d^1..V_d^r; empty when the decomposition ran without keeping them.
    std::vector<PatchMatrix> details;
    std::vector<Image> detail_images;
    Image base;
    std::size_t levels = 0;
    std::size_t stride = 0;
    std::size_t patch_size = 0;

    /// base + sum of detail images.
    Image reconstruct() const;
};

/// Throws ArgumentError when the image is smaller than the projection's patch
/// size or the stride is out of range.
LevelSplit dlatlrr(const Image& img, const ProjectionMatrix& proj, std::size_t stride);

/// r levels, 1 <= r <= kMaxLevels. With keep_patch_matrices = false only the
/// images are retained, which keeps memory at O(image) for large inputs.
Decomposition mdlatlrr(const Image& img, const ProjectionMatrix& proj, std::size_t levels,
                       std::size_t stride, bool keep_patch_matrices = true);

}  // namespace mdlatlrr
