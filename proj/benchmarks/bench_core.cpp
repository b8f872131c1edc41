#include <benchmark/benchmark.h>

#include <random>

#include "mdlatlrr/decompose.hpp"
#include "mdlatlrr/fusion.hpp"
#include "mdlatlrr/latlrr.hpp"
#include "mdlatlrr/linalg.hpp"
#include "mdlatlrr/metrics.hpp"
#include "mdlatlrr/patches.hpp"

using namespace mdlatlrr;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(gen);
    return m;
}

Image random_image(std::size_t h, std::size_t w, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Image img(h, w);
    for (double& v : img.pixels()) v = u(gen);
    return img;
}

void BM_NuclearNormPatch(benchmark::State& state) {
    const auto n = state.range(0);
    const Matrix m = random_matrix(n, n, 1);
    for (auto _ : state) benchmark::DoNotOptimize(nuclear_norm(m));
}
BENCHMARK(BM_NuclearNormPatch)->Arg(8)->Arg(16);

void BM_Svd(benchmark::State& state) {
    const auto n = state.range(0);
    const Matrix m = random_matrix(n, n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(svd(m));
}
BENCHMARK(BM_Svd)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_ExtractReconstruct(benchmark::State& state) {
    const Image img = random_image(256, 256, 3);
    const auto stride = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(reconstruct_image(extract_patches(img, 16, stride)));
}
BENCHMARK(BM_ExtractReconstruct)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_SolveLatLrr(benchmark::State& state) {
    const Matrix x = random_matrix(state.range(0), 200, 4, 0.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_latlrr(x));
}
BENCHMARK(BM_SolveLatLrr)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& state) {
    const Image img = random_image(256, 256, 5);
    const ProjectionMatrix proj(16, random_matrix(256, 256, 6, -0.05, 0.05));
    const auto levels = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(mdlatlrr::mdlatlrr(img, proj, levels, 1, false));
}
BENCHMARK(BM_Decompose)->Arg(1)->Arg(4)->Iterations(1)->Unit(benchmark::kMillisecond);

// Sweep guard: stride-1, level-4 fusion of a 256x256 pair.
void BM_FuseLevel4(benchmark::State& state) {
    const Image a = random_image(256, 256, 7), b = random_image(256, 256, 8);
    const ProjectionMatrix proj(16, random_matrix(256, 256, 9, -0.05, 0.05));
    FusionConfig cfg;
    cfg.levels = 4;
    cfg.detail_norm = state.range(0) == 0 ? DetailNorm::l1 : DetailNorm::nuclear;
    for (auto _ : state) benchmark::DoNotOptimize(fuse_images(a, b, proj, cfg));
    state.SetLabel(to_string(cfg.detail_norm));
}
BENCHMARK(BM_FuseLevel4)->Arg(0)->Arg(1)->Iterations(1)->Unit(benchmark::kMillisecond);

void BM_Metrics(benchmark::State& state) {
    const Image a = random_image(256, 256, 10), b = random_image(256, 256, 11);
    const Image f = (0.5 * a + 0.5 * b).clamped();
    for (auto _ : state) benchmark::DoNotOptimize(metrics::evaluate_all(a, b, f));
}
BENCHMARK(BM_Metrics)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
