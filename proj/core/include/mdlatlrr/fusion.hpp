#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mdlatlrr/image.hpp"
#include "mdlatlrr/linalg.hpp"
#include "mdlatlrr/patches.hpp"
#include "mdlatlrr/projection.hpp"

namespace mdlatlrr {

/// Saliency measure of a detail patch used to weight the two sources.
enum class DetailNorm {
    nuclear,  ///< nuclear norm of the column reshaped to n x n
    l1,       ///< l1 norm of the column
};

const char* to_string(DetailNorm norm) noexcept;
/// Accepts "nuclear" and "l1"; throws ArgumentError otherwise.
DetailNorm parse_detail_norm(const std::string& text);

/// Two-input fusion settings. The data model generalizes to K inputs, but
/// only K = 2 is implemented.
struct FusionConfig {
    std::size_t levels = 2;
    std::size_t stride = 1;
    DetailNorm detail_norm = DetailNorm::nuclear;
    double base_weight1 = 0.5;
    double base_weight2 = 0.5;

    /// Throws ArgumentError unless levels in [1, 8], stride >= 1 and the base
    /// weights are non-negative and sum to 1 (within 1e-12).
    void validate() const;
};

/// Per-column weight pairs for one level; w1[j] + w2[j] == 1.
struct DetailWeights {
    std::vector<double> w1;
    std::vector<double> w2;
};

/// w1 * b1 + w2 * b2, pixelwise.
Image fuse_base(const Image& b1, const Image& b2, double w1, double w2);

/// Saliency of every column of `block` (one entry per column).
Vector column_saliency(const Matrix& block, std::size_t patch_size, DetailNorm norm);

/// Normalized weights from saliencies; a 0/0 pair falls back to (0.5, 0.5).
DetailWeights weights_from_saliency(const Vector& s1, const Vector& s2);

/// Throws ArgumentError when the two patch matrices differ in geometry.
DetailWeights detail_weights(const PatchMatrix& v1, const PatchMatrix& v2, DetailNorm norm);

struct FusedDetail {
    PatchMatrix fused;
    Image image;
};

/// Column-wise convex combination of v1, v2 with detail_weights, then R(.).
FusedDetail fuse_details(const PatchMatrix& v1, const PatchMatrix& v2, DetailNorm norm);

/// Full pipeline: decomposes both inputs to cfg.levels levels, fuses every
/// detail level and the final bases, and sums them. The result is not
/// clamped; clamping and quantization happen at export.
Image fuse_images(const Image& img1, const Image& img2, const ProjectionMatrix& proj,
                  const FusionConfig& cfg);

/// Fused images for every level count 1..max_levels and every requested norm
/// from a single decomposition pass: result[k][r - 1] is the level-r fusion
/// with norms[k]. Shares all work between levels, so a level sweep costs the
/// same as its deepest member. `on_level`, if set, is called with r after
/// level r is finished for every norm.
std::vector<std::vector<Image>> fuse_images_all_levels(
    const Image& img1, const Image& img2, const ProjectionMatrix& proj, std::size_t max_levels,
    std::size_t stride, std::span<const DetailNorm> norms, double base_weight1 = 0.5,
    double base_weight2 = 0.5, const std::function<void(std::size_t)>& on_level = {});

}  // namespace mdlatlrr
