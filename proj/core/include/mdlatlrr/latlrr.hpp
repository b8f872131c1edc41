#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "mdlatlrr/image.hpp"
#include "mdlatlrr/linalg.hpp"
#include "mdlatlrr/projection.hpp"

namespace mdlatlrr {

/// Inexact ALM settings for min ||Z||_* + ||L||_* + lambda ||E||_1
/// subject to X = XZ + LX + E.
struct LatLrrParams {
    double lambda = 0.4;
    double mu0 = 1e-6;
    double rho = 1.1;
    double mu_max = 1e6;
    double tol = 1e-6;
    std::size_t max_iters = 1000;
    /// Record ||Z||_* + ||L||_* + lambda ||E||_1 after every iteration. Costs
    /// one extra SVD per iteration.
    bool record_objective = false;

    /// Throws ArgumentError unless lambda > 0, 0 < mu0 < mu_max, rho > 1, tol > 0.
    void validate() const;
};

struct LatLrrSolution {
    Matrix Z;  ///< M x M low-rank coefficients
    Matrix L;  ///< N x N projection
    Matrix E;  ///< N x M sparse error
    std::size_t iterations = 0;
    /// Largest max-abs residual over X - XZ - LX - E and the two splitting
    /// constraints at the returned iterate.
    double final_residual = 0.0;
    bool converged = false;
    /// Objective value after iteration k at index k - 1 (empty unless recorded).
    std::vector<double> objective_history;
};

/// Solves the latent low-rank problem on data X (N x M, N, M >= 2) with the
/// two-auxiliary-variable inexact ALM. Stops once every constraint residual is
/// <= tol, or after max_iters with converged = false.
/// Throws NumericalError (carrying the iteration) if NaN/Inf appear.
LatLrrSolution solve_latlrr(const Matrix& X, const LatLrrParams& params = {});

enum class PatchClass { detail, smooth };

/// sqrt(sum (p_ij - mean)^2): the square root of the summed (not averaged)
/// squared deviations.
double patch_sd(const Matrix& patch);
double patch_sd(std::span<const double> pixels);

/// detail iff patch_sd(p) > th (strictly); smooth otherwise.
PatchClass classify_patch(const Matrix& patch, double th);

struct TrainingConfig {
    std::size_t patch_size = 16;
    std::size_t stride = 1;
    std::size_t detail_count = 1000;
    std::size_t smooth_count = 1000;
    double threshold = 0.5;
    std::uint64_t seed = 0;
};

struct PoolSizes {
    std::size_t detail = 0;
    std::size_t smooth = 0;
};

/// Classifies every window of every image without materializing patches.
PoolSizes count_pools(std::span<const Image> images, std::size_t patch_size, std::size_t stride,
                      double threshold);

struct TrainingSet {
    Matrix X;                       ///< N x (detail_count + smooth_count), raw pixels
    std::vector<PatchClass> labels;  ///< one per column; detail columns come first
    PoolSizes pools;
};

/// Builds the training matrix: windows are classified into detail/smooth
/// pools (ordered by image index, then window scan order) and the requested
/// counts are drawn without replacement with a seeded generator.
/// Throws DataError naming the deficient class when a pool is too small.
TrainingSet build_training_set(std::span<const Image> images, const TrainingConfig& config);

struct TrainingResult {
    ProjectionMatrix projection;
    PoolSizes pools;
    std::size_t iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
};

/// build_training_set followed by solve_latlrr; keeps only L.
TrainingResult train_projection(std::span<const Image> images, const TrainingConfig& config,
                                const LatLrrParams& params = {});

/// Draws `count` distinct indices from [0, population) in draw order (partial
/// Fisher-Yates). Uses only the raw mt19937_64 stream, which the standard
/// fixes bit for bit, so samples are identical across standard libraries.
std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t count,
                                                    std::mt19937_64& gen);

}  // namespace mdlatlrr
