#include "mdlatlrr/latlrr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mdlatlrr/error.hpp"
#include "mdlatlrr/patches.hpp"

namespace mdlatlrr {
namespace {

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Calls a linear-algebra step and tags numerical failures with the iteration.
template <typename Fn>
auto at_iteration(std::size_t iter, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw NumericalError("latlrr: iteration " + std::to_string(iter) + ": " + e.what(), iter);
    }
}

std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t bound) {
    // Rejection sampling removes the modulo bias.
    const std::uint64_t limit = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = gen();
        if (r >= limit) return r % bound;
    }
}

struct WindowRef {
    std::size_t image;
    std::size_t window;
};

struct Pools {
    std::vector<WindowRef> detail;
    std::vector<WindowRef> smooth;
};

template <typename Visit>
void classify_windows(std::span<const Image> images, std::size_t n, std::size_t s, double th,
                      Visit&& visit) {
    if (th < 0.0) throw ArgumentError("classification threshold must be non-negative");
    std::vector<double> buffer(n * n);
    for (std::size_t i = 0; i < images.size(); ++i) {
        const PatchGeometry g = PatchGeometry::for_image(images[i].height(), images[i].width(), n, s);
        const Image padded = pad_image(images[i], g);
        for (std::size_t w = 0; w < g.patch_count(); ++w) {
            const std::size_t top = g.window_row(w);
            const std::size_t left = g.window_col(w);
            for (std::size_t r = 0; r < n; ++r) {
                const double* src = padded.row(top + r) + left;
                std::copy(src, src + n, buffer.begin() + static_cast<std::ptrdiff_t>(r * n));
            }
            visit(i, w, patch_sd(buffer) > th ? PatchClass::detail : PatchClass::smooth);
        }
    }
}

}  // namespace

void LatLrrParams::validate() const {
    if (!(lambda > 0.0)) throw ArgumentError("latlrr: lambda must be positive");
    if (!(mu0 > 0.0) || !(mu0 < mu_max)) throw ArgumentError("latlrr: require 0 < mu0 < mu_max");
    if (!(rho > 1.0)) throw ArgumentError("latlrr: rho must exceed 1");
    if (!(tol > 0.0)) throw ArgumentError("latlrr: tol must be positive");
}

LatLrrSolution solve_latlrr(const Matrix& X, const LatLrrParams& params) {
    params.validate();
    if (X.rows() < 2 || X.cols() < 2) {
        throw ArgumentError("latlrr: data matrix must be at least 2x2");
    }
    require_finite(X, "latlrr data");
    const Eigen::Index N = X.rows();
    const Eigen::Index M = X.cols();

    // Z, its splitting variable J and multiplier Y2 always have columns in the
    // row space of X, spanned by V from X = U S V^T. They are carried as
    // r x M coordinates (Z = V * Zr), so the M x M thresholding step shrinks to
    // an r x M one with identical singular values.
    const SvdResult fx = svd(X);
    const Matrix& V = fx.V;
    const Eigen::Index r = fx.s.size();
    const Matrix su_t = fx.s.asDiagonal() * fx.U.transpose();  // S U^T, r x N
    const Matrix us = fx.U * fx.s.asDiagonal();                // U S,   N x r
    const Vector z_scale = (1.0 + fx.s.array().square()).inverse().matrix();
    const Matrix Xt = X.transpose();
    const Matrix l_inverse =
        (Matrix::Identity(N, N) + X * Xt).llt().solve(Matrix::Identity(N, N));

    Matrix Zr = Matrix::Zero(r, M), Jr = Matrix::Zero(r, M), Y2 = Matrix::Zero(r, M);
    Matrix L = Matrix::Zero(N, N), S = Matrix::Zero(N, N), Y3 = Matrix::Zero(N, N);
    Matrix E = Matrix::Zero(N, M), Y1 = Matrix::Zero(N, M);
    Matrix XZ(N, M), leq1(N, M), leq2(r, M), leq3(N, N);

    LatLrrSolution sol;
    double mu = params.mu0;
    double r1 = 0.0, r3 = 0.0;
    for (std::size_t iter = 1; iter <= params.max_iters; ++iter) {
        sol.iterations = iter;
        const double inv_mu = 1.0 / mu;

        Jr = at_iteration(iter, [&] { return svt(Zr + inv_mu * Y2, inv_mu); });
        S = at_iteration(iter, [&] { return svt(L + inv_mu * Y3, inv_mu); });

        Zr = z_scale.asDiagonal() * (su_t * (X - L * X - E + inv_mu * Y1) + Jr - inv_mu * Y2);
        XZ.noalias() = us * Zr;

        L = ((X - XZ - E) * Xt + S + inv_mu * (Y1 * Xt - Y3)) * l_inverse;

        leq1 = X - XZ - L * X;  // X - XZ - LX, becomes the residual below
        E = soft_threshold(leq1 + inv_mu * Y1, params.lambda * inv_mu);
        leq1 -= E;
        leq2 = Zr - Jr;
        leq3 = L - S;

        if (!leq1.allFinite() || !leq2.allFinite() || !leq3.allFinite()) {
            throw NumericalError("latlrr: NaN/Inf at iteration " + std::to_string(iter), iter);
        }

        if (params.record_objective) {
            const double obj = at_iteration(iter, [&] {
                return nuclear_norm(Zr) + nuclear_norm(L) + params.lambda * E.cwiseAbs().sum();
            });
            sol.objective_history.push_back(obj);
        }

        r1 = max_abs(leq1);
        r3 = max_abs(leq3);
        if (std::max(r1, r3) <= params.tol) {
            // Each entry of V * leq2 is bounded by the norm of a leq2 column.
            const double bound = leq2.colwise().norm().maxCoeff();
            if (bound <= params.tol || max_abs(V * leq2) <= params.tol) {
                sol.converged = true;
                break;
            }
        }

        Y1 += mu * leq1;
        Y2 += mu * leq2;
        Y3 += mu * leq3;
        mu = std::min(params.rho * mu, params.mu_max);
    }

    sol.Z = V * Zr;
    sol.final_residual = std::max({r1, r3, max_abs(V * leq2)});
    sol.L = std::move(L);
    sol.E = std::move(E);
    return sol;
}

double patch_sd(std::span<const double> pixels) {
    if (pixels.empty()) return 0.0;
    // Shifted by the first pixel so that flat patches give exactly zero.
    const double shift = pixels[0];
    double sum = 0.0;
    for (double v : pixels) sum += v - shift;
    const double mean = sum / static_cast<double>(pixels.size());
    double sq = 0.0;
    for (double v : pixels) {
        const double d = (v - shift) - mean;
        sq += d * d;
    }
    return std::sqrt(sq);
}

double patch_sd(const Matrix& patch) {
    const Vector flat = vectorize_patch(patch);
    return patch_sd(std::span<const double>(flat.data(), static_cast<std::size_t>(flat.size())));
}

PatchClass classify_patch(const Matrix& patch, double th) {
    if (th < 0.0) throw ArgumentError("classify_patch: threshold must be non-negative");
    return patch_sd(patch) > th ? PatchClass::detail : PatchClass::smooth;
}

PoolSizes count_pools(std::span<const Image> images, std::size_t patch_size, std::size_t stride,
                      double threshold) {
    PoolSizes sizes;
    classify_windows(images, patch_size, stride, threshold,
                     [&](std::size_t, std::size_t, PatchClass c) {
                         ++(c == PatchClass::detail ? sizes.detail : sizes.smooth);
                     });
    return sizes;
}

std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t count,
                                                    std::mt19937_64& gen) {
    if (count > population) {
        throw ArgumentError("cannot sample " + std::to_string(count) + " of " +
                            std::to_string(population));
    }
    std::vector<std::size_t> idx(population);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(bounded(gen, population - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    return idx;
}

TrainingSet build_training_set(std::span<const Image> images, const TrainingConfig& config) {
    if (images.empty()) throw ArgumentError("build_training_set: no training images");
    if (config.detail_count + config.smooth_count < 2) {
        throw ArgumentError("build_training_set: need at least two training patches");
    }
    Pools pools;
    classify_windows(images, config.patch_size, config.stride, config.threshold,
                     [&](std::size_t img, std::size_t w, PatchClass c) {
                         (c == PatchClass::detail ? pools.detail : pools.smooth).push_back({img, w});
                     });
    if (pools.detail.size() < config.detail_count) {
        throw DataError("detail pool " + std::to_string(pools.detail.size()) + " < " +
                        std::to_string(config.detail_count));
    }
    if (pools.smooth.size() < config.smooth_count) {
        throw DataError("smooth pool " + std::to_string(pools.smooth.size()) + " < " +
                        std::to_string(config.smooth_count));
    }

    std::mt19937_64 gen(config.seed);
    const auto detail_pick = sample_without_replacement(pools.detail.size(), config.detail_count, gen);
    const auto smooth_pick = sample_without_replacement(pools.smooth.size(), config.smooth_count, gen);

    std::vector<WindowRef> chosen;
    chosen.reserve(detail_pick.size() + smooth_pick.size());
    for (std::size_t k : detail_pick) chosen.push_back(pools.detail[k]);
    for (std::size_t k : smooth_pick) chosen.push_back(pools.smooth[k]);

    TrainingSet set;
    set.pools = {pools.detail.size(), pools.smooth.size()};
    set.labels.assign(detail_pick.size(), PatchClass::detail);
    set.labels.insert(set.labels.end(), smooth_pick.size(), PatchClass::smooth);

    const std::size_t n = config.patch_size;
    set.X.resize(static_cast<Eigen::Index>(n * n), static_cast<Eigen::Index>(chosen.size()));
    std::vector<Image> padded(images.size());
    for (std::size_t j = 0; j < chosen.size(); ++j) {
        const WindowRef ref = chosen[j];
        const Image& img = images[ref.image];
        const PatchGeometry g = PatchGeometry::for_image(img.height(), img.width(), n, config.stride);
        if (padded[ref.image].empty()) padded[ref.image] = pad_image(img, g);
        Matrix column(static_cast<Eigen::Index>(n * n), 1);
        extract_window_block(padded[ref.image], g, ref.window, column);
        set.X.col(static_cast<Eigen::Index>(j)) = column;
    }
    return set;
}

TrainingResult train_projection(std::span<const Image> images, const TrainingConfig& config,
                                const LatLrrParams& params) {
    params.validate();
    const TrainingSet set = build_training_set(images, config);
    LatLrrSolution sol = solve_latlrr(set.X, params);
    Provenance prov;
    prov.lambda = params.lambda;
    prov.seed = config.seed;
    prov.detail_count = config.detail_count;
    prov.smooth_count = config.smooth_count;
    prov.threshold = config.threshold;
    return TrainingResult{ProjectionMatrix(config.patch_size, std::move(sol.L), prov), set.pools,
                          sol.iterations, sol.final_residual, sol.converged};
}

}  // namespace mdlatlrr
