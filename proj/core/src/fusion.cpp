#include "mdlatlrr/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "mdlatlrr/decompose.hpp"
#include "mdlatlrr/error.hpp"

namespace mdlatlrr {
namespace {

void require_same_geometry(const PatchMatrix& v1, const PatchMatrix& v2) {
    if (!(v1.geometry == v2.geometry) || v1.mat.rows() != v2.mat.rows() ||
        v1.mat.cols() != v2.mat.cols()) {
        throw ArgumentError("detail fusion: patch matrices differ in geometry");
    }
}

Matrix blend_columns(const Matrix& v1, const Matrix& v2, const DetailWeights& w) {
    Matrix out(v1.rows(), v1.cols());
    for (Eigen::Index j = 0; j < v1.cols(); ++j) {
        const auto k = static_cast<std::size_t>(j);
        out.col(j) = w.w1[k] * v1.col(j) + w.w2[k] * v2.col(j);
    }
    return out;
}

}  // namespace

const char* to_string(DetailNorm norm) noexcept {
    return norm == DetailNorm::nuclear ? "nuclear" : "l1";
}

DetailNorm parse_detail_norm(const std::string& text) {
    if (text == "nuclear") return DetailNorm::nuclear;
    if (text == "l1") return DetailNorm::l1;
    throw ArgumentError("unknown detail norm '" + text + "' (expected nuclear or l1)");
}

void FusionConfig::validate() const {
    if (levels < 1 || levels > kMaxLevels) {
        throw ArgumentError("levels must lie in [1, " + std::to_string(kMaxLevels) + "], got " +
                            std::to_string(levels));
    }
    if (stride < 1) throw ArgumentError("stride must be at least 1");
    if (base_weight1 < 0.0 || base_weight2 < 0.0 ||
        std::abs(base_weight1 + base_weight2 - 1.0) > 1e-12) {
        throw ArgumentError("base weights must be non-negative and sum to 1");
    }
}

Image fuse_base(const Image& b1, const Image& b2, double w1, double w2) {
    if (!b1.same_shape(b2)) throw ArgumentError("fuse_base: base parts differ in shape");
    Image out(b1.height(), b1.width());
    const auto p1 = b1.pixels();
    const auto p2 = b2.pixels();
    auto po = out.pixels();
    for (std::size_t i = 0; i < po.size(); ++i) po[i] = w1 * p1[i] + w2 * p2[i];
    return out;
}

Vector column_saliency(const Matrix& block, std::size_t patch_size, DetailNorm norm) {
    Vector s(block.cols());
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
        if (norm == DetailNorm::l1) {
            s[j] = block.col(j).lpNorm<1>();
        } else {
            // Read column-major, the row-major patch comes out transposed,
            // which has the same singular values.
            const auto n = static_cast<Eigen::Index>(patch_size);
            s[j] = nuclear_norm(Eigen::Map<const Matrix>(block.col(j).data(), n, n));
        }
    }
    return s;
}

DetailWeights weights_from_saliency(const Vector& s1, const Vector& s2) {
    DetailWeights w;
    const auto m = static_cast<std::size_t>(s1.size());
    w.w1.resize(m);
    w.w2.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const auto i = static_cast<Eigen::Index>(j);
        const double total = s1[i] + s2[i];
        if (total == 0.0) {
            w.w1[j] = w.w2[j] = 0.5;
        } else {
            w.w1[j] = s1[i] / total;
            w.w2[j] = s2[i] / total;
        }
    }
    return w;
}

DetailWeights detail_weights(const PatchMatrix& v1, const PatchMatrix& v2, DetailNorm norm) {
    require_same_geometry(v1, v2);
    const std::size_t n = v1.geometry.patch_size;
    return weights_from_saliency(column_saliency(v1.mat, n, norm), column_saliency(v2.mat, n, norm));
}

FusedDetail fuse_details(const PatchMatrix& v1, const PatchMatrix& v2, DetailNorm norm) {
    const DetailWeights w = detail_weights(v1, v2, norm);
    FusedDetail out;
    out.fused.geometry = v1.geometry;
    out.fused.mat = blend_columns(v1.mat, v2.mat, w);
    out.image = reconstruct_image(out.fused);
    return out;
}

std::vector<std::vector<Image>> fuse_images_all_levels(
    const Image& img1, const Image& img2, const ProjectionMatrix& proj, std::size_t max_levels,
    std::size_t stride, std::span<const DetailNorm> norms, double base_weight1,
    double base_weight2, const std::function<void(std::size_t)>& on_level) {
    FusionConfig check;
    check.levels = max_levels;
    check.stride = stride;
    check.base_weight1 = base_weight1;
    check.base_weight2 = base_weight2;
    check.validate();
    if (!img1.same_shape(img2)) {
        throw ArgumentError("fusion inputs differ in shape (" + std::to_string(img1.height()) + "x" +
                            std::to_string(img1.width()) + " vs " + std::to_string(img2.height()) +
                            "x" + std::to_string(img2.width()) + ")");
    }
    if (norms.empty()) throw ArgumentError("fusion: no detail norm requested");

    const std::size_t n = proj.patch_size();
    const PatchGeometry g = PatchGeometry::for_image(img1.height(), img1.width(), n, stride);
    const auto dim = static_cast<Eigen::Index>(g.patch_length());
    const bool want_l1 = std::find(norms.begin(), norms.end(), DetailNorm::l1) != norms.end();
    const bool want_nuclear =
        std::find(norms.begin(), norms.end(), DetailNorm::nuclear) != norms.end();

    Image base1 = img1;
    Image base2 = img2;
    std::vector<Image> detail_sum(norms.size(), Image(img1.height(), img1.width()));
    std::vector<std::vector<Image>> result(norms.size());

    Matrix p1, p2, v1, v2;
    for (std::size_t level = 1; level <= max_levels; ++level) {
        const Image pad1 = pad_image(base1, g);
        const Image pad2 = pad_image(base2, g);
        OverlapAccumulator acc1(g), acc2(g);
        std::vector<OverlapAccumulator> fused_acc(norms.size(), OverlapAccumulator(g));

        for (std::size_t first = 0; first < g.patch_count(); first += kWindowBlock) {
            const auto count =
                static_cast<Eigen::Index>(std::min(kWindowBlock, g.patch_count() - first));
            p1.resize(dim, count);
            p2.resize(dim, count);
            extract_window_block(pad1, g, first, p1);
            extract_window_block(pad2, g, first, p2);
            v1.noalias() = proj.matrix() * p1;
            v2.noalias() = proj.matrix() * p2;
            acc1.add_block(first, v1);
            acc2.add_block(first, v2);

            DetailWeights w_l1, w_nuclear;
            if (want_l1) {
                w_l1 = weights_from_saliency(column_saliency(v1, n, DetailNorm::l1),
                                             column_saliency(v2, n, DetailNorm::l1));
            }
            if (want_nuclear) {
                w_nuclear = weights_from_saliency(column_saliency(v1, n, DetailNorm::nuclear),
                                                  column_saliency(v2, n, DetailNorm::nuclear));
            }
            for (std::size_t k = 0; k < norms.size(); ++k) {
                const DetailWeights& w = norms[k] == DetailNorm::l1 ? w_l1 : w_nuclear;
                fused_acc[k].add_block(first, blend_columns(v1, v2, w));
            }
        }

        base1 -= acc1.finish();
        base2 -= acc2.finish();
        const Image fused_base = fuse_base(base1, base2, base_weight1, base_weight2);
        for (std::size_t k = 0; k < norms.size(); ++k) {
            detail_sum[k] += fused_acc[k].finish();
            result[k].push_back(fused_base + detail_sum[k]);
        }
        if (on_level) on_level(level);
    }
    return result;
}

Image fuse_images(const Image& img1, const Image& img2, const ProjectionMatrix& proj,
                  const FusionConfig& cfg) {
    cfg.validate();
    const DetailNorm norm[] = {cfg.detail_norm};
    auto all = fuse_images_all_levels(img1, img2, proj, cfg.levels, cfg.stride, norm,
                                      cfg.base_weight1, cfg.base_weight2);
    return std::move(all.front().back());
}

}  // namespace mdlatlrr
