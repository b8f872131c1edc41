#pragma once

#include <array>
#include <map>
#include <string>

#include "mdlatlrr/image.hpp"

namespace mdlatlrr::metrics {

// Every metric takes images with samples in [0, 1]. Metrics that work on an
// 8-bit scale (En, MI, SD, SSIM) rescale internally.

/// Xydeas-Petrovic sigmoid constants and edge-strength exponent.
struct QabfParams {
    double gamma_g = 0.9994;
    double kappa_g = -15.0;
    double sigma_g = 0.5;
    double gamma_a = 0.9879;
    double kappa_a = -22.0;
    double sigma_a = 0.8;
    double exponent = 1.0;
};

/// Gaussian-window SSIM constants on the 0-255 scale.
struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 255.0;
};

inline constexpr std::array<double, 5> kMsSsimWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

/// Shannon entropy (bits) of the 256-bin histogram of the 8-bit quantized image.
double entropy(const Image& img);

/// MI(src1, fused) + MI(src2, fused) from 256 x 256 joint histograms, in bits.
double mutual_information(const Image& src1, const Image& src2, const Image& fused);

/// Population standard deviation on the 0-255 scale.
double sd(const Image& img);

/// Gradient-based edge preservation. Sobel responses use edge-replicated
/// borders; pixels where neither source has an edge carry zero weight.
double qabf(const Image& src1, const Image& src2, const Image& fused, const QabfParams& p = {});

/// pearson(fused - src2, src1) + pearson(fused - src1, src2); the correlation
/// with a zero-variance argument is 0.
double scd(const Image& src1, const Image& src2, const Image& fused);

/// Mean single-scale SSIM over all fully contained windows.
double ssim(const Image& x, const Image& y, const SsimParams& p = {});

/// (SSIM(src1, fused) + SSIM(src2, fused)) / 2.
double ssim_a(const Image& src1, const Image& src2, const Image& fused, const SsimParams& p = {});

/// Multi-scale SSIM of one pair. Uses up to five scales (2x2 mean
/// downsampling); fewer when the image is smaller than 176 pixels on a side,
/// with the leading weights renormalized. Negative per-scale terms are clamped
/// to 0 before exponentiation. Throws ArgumentError below one scale (11 px).
double ms_ssim_pair(const Image& x, const Image& y, const SsimParams& p = {});

/// Mean of ms_ssim_pair over both sources.
double ms_ssim(const Image& src1, const Image& src2, const Image& fused, const SsimParams& p = {});

/// Number of MS-SSIM scales used for an image of this size (0 if too small).
int ms_ssim_scales(std::size_t height, std::size_t width, int window = 11);

/// Names in report order.
inline constexpr std::array<const char*, 7> kMetricNames = {"En",  "MI",    "SD",     "Qabf",
                                                            "SCD", "SSIMa", "MS-SSIM"};

/// All seven metrics keyed by kMetricNames.
std::map<std::string, double> evaluate_all(const Image& src1, const Image& src2, const Image& fused);

}  // namespace mdlatlrr::metrics
