#include "mdlatlrr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "mdlatlrr/error.hpp"

namespace mdlatlrr::metrics {
namespace {

void require_same_shape(const Image& a, const Image& b, const char* metric) {
    if (!a.same_shape(b)) {
        throw ArgumentError(std::string(metric) + ": image shapes differ");
    }
}

std::vector<int> levels_u8(const Image& img) {
    std::vector<int> q(img.size());
    const auto px = img.pixels();
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = quantize_u8(px[i]);
    return q;
}

double entropy_of(const std::vector<double>& counts, double total) {
    double h = 0.0;
    for (double c : counts) {
        if (c > 0.0) {
            const double p = c / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

double pair_mi(const std::vector<int>& a, const std::vector<int>& f) {
    std::vector<double> joint(256 * 256, 0.0), ha(256, 0.0), hf(256, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[static_cast<std::size_t>(a[i]) * 256 + static_cast<std::size_t>(f[i])] += 1.0;
        ha[static_cast<std::size_t>(a[i])] += 1.0;
        hf[static_cast<std::size_t>(f[i])] += 1.0;
    }
    const auto total = static_cast<double>(a.size());
    return entropy_of(ha, total) + entropy_of(hf, total) - entropy_of(joint, total);
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

// Sobel magnitude and orientation with edge-replicated borders.
struct EdgeField {
    std::vector<double> strength;
    std::vector<double> angle;
};

EdgeField sobel(const Image& img) {
    const auto h = static_cast<long>(img.height());
    const auto w = static_cast<long>(img.width());
    auto at = [&](long r, long c) {
        r = std::clamp(r, 0L, h - 1);
        c = std::clamp(c, 0L, w - 1);
        return img(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    };
    EdgeField e;
    e.strength.resize(img.size());
    e.angle.resize(img.size());
    for (long r = 0; r < h; ++r) {
        for (long c = 0; c < w; ++c) {
            const double gx = (at(r - 1, c + 1) + 2.0 * at(r, c + 1) + at(r + 1, c + 1)) -
                              (at(r - 1, c - 1) + 2.0 * at(r, c - 1) + at(r + 1, c - 1));
            const double gy = (at(r + 1, c - 1) + 2.0 * at(r + 1, c) + at(r + 1, c + 1)) -
                              (at(r - 1, c - 1) + 2.0 * at(r - 1, c) + at(r - 1, c + 1));
            const auto i = static_cast<std::size_t>(r * w + c);
            e.strength[i] = std::sqrt(gx * gx + gy * gy);
            e.angle[i] = gx == 0.0 ? std::numbers::pi / 2.0 : std::atan(gy / gx);
        }
    }
    return e;
}

// Per-pixel edge preservation of source `s` in fused `f`.
std::vector<double> preservation(const EdgeField& s, const EdgeField& f, const QabfParams& p) {
    std::vector<double> q(s.strength.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double gs = s.strength[i];
        const double gf = f.strength[i];
        double g = 1.0;
        if (gs > gf) {
            g = gf / gs;
        } else if (gs < gf) {
            g = gs / gf;
        }
        const double a = 1.0 - std::abs(s.angle[i] - f.angle[i]) / (std::numbers::pi / 2.0);
        const double qg = p.gamma_g / (1.0 + std::exp(p.kappa_g * (g - p.sigma_g)));
        const double qa = p.gamma_a / (1.0 + std::exp(p.kappa_a * (a - p.sigma_a)));
        q[i] = qg * qa;
    }
    return q;
}

std::vector<double> gaussian_kernel(int size, double sigma) {
    std::vector<double> k(static_cast<std::size_t>(size));
    const double centre = (size - 1) / 2.0;
    double total = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - centre;
        k[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
        total += k[static_cast<std::size_t>(i)];
    }
    for (double& v : k) v /= total;
    return k;
}

// Separable 'valid' filtering of a row-major plane.
std::vector<double> filter_valid(const std::vector<double>& plane, std::size_t h, std::size_t w,
                                 const std::vector<double>& k) {
    const std::size_t ks = k.size();
    const std::size_t ow = w - ks + 1;
    const std::size_t oh = h - ks + 1;
    std::vector<double> tmp(h * ow, 0.0);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < ow; ++c) {
            double acc = 0.0;
            for (std::size_t t = 0; t < ks; ++t) acc += k[t] * plane[r * w + c + t];
            tmp[r * ow + c] = acc;
        }
    }
    std::vector<double> out(oh * ow, 0.0);
    for (std::size_t r = 0; r < oh; ++r) {
        for (std::size_t c = 0; c < ow; ++c) {
            double acc = 0.0;
            for (std::size_t t = 0; t < ks; ++t) acc += k[t] * tmp[(r + t) * ow + c];
            out[r * ow + c] = acc;
        }
    }
    return out;
}

struct SsimTerms {
    double ssim = 0.0;  // mean of l * cs
    double cs = 0.0;    // mean of cs
};

SsimTerms ssim_terms(const std::vector<double>& x, const std::vector<double>& y, std::size_t h,
                     std::size_t w, const SsimParams& p) {
    const auto ws = static_cast<std::size_t>(p.window);
    if (h < ws || w < ws) {
        throw ArgumentError("ssim: image " + std::to_string(h) + "x" + std::to_string(w) +
                            " is smaller than the " + std::to_string(ws) + "x" +
                            std::to_string(ws) + " window");
    }
    const auto k = gaussian_kernel(p.window, p.sigma);
    std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    const auto mx = filter_valid(x, h, w, k);
    const auto my = filter_valid(y, h, w, k);
    const auto exx = filter_valid(xx, h, w, k);
    const auto eyy = filter_valid(yy, h, w, k);
    const auto exy = filter_valid(xy, h, w, k);
    const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
    const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
    SsimTerms t;
    for (std::size_t i = 0; i < mx.size(); ++i) {
        const double vx = exx[i] - mx[i] * mx[i];
        const double vy = eyy[i] - my[i] * my[i];
        const double cov = exy[i] - mx[i] * my[i];
        const double cs = (2.0 * cov + c2) / (vx + vy + c2);
        const double l = (2.0 * mx[i] * my[i] + c1) / (mx[i] * mx[i] + my[i] * my[i] + c1);
        t.ssim += l * cs;
        t.cs += cs;
    }
    t.ssim /= static_cast<double>(mx.size());
    t.cs /= static_cast<double>(mx.size());
    return t;
}

std::vector<double> to_255(const Image& img) {
    std::vector<double> out(img.pixels().begin(), img.pixels().end());
    for (double& v : out) v *= 255.0;
    return out;
}

std::vector<double> halve(const std::vector<double>& plane, std::size_t h, std::size_t w) {
    const std::size_t oh = h / 2, ow = w / 2;
    std::vector<double> out(oh * ow);
    for (std::size_t r = 0; r < oh; ++r) {
        for (std::size_t c = 0; c < ow; ++c) {
            out[r * ow + c] = 0.25 * (plane[2 * r * w + 2 * c] + plane[2 * r * w + 2 * c + 1] +
                                      plane[(2 * r + 1) * w + 2 * c] +
                                      plane[(2 * r + 1) * w + 2 * c + 1]);
        }
    }
    return out;
}

}  // namespace

double entropy(const Image& img) {
    if (img.empty()) return 0.0;
    std::vector<double> hist(256, 0.0);
    for (int v : levels_u8(img)) hist[static_cast<std::size_t>(v)] += 1.0;
    return entropy_of(hist, static_cast<double>(img.size()));
}

double mutual_information(const Image& src1, const Image& src2, const Image& fused) {
    require_same_shape(src1, fused, "mutual_information");
    require_same_shape(src2, fused, "mutual_information");
    const auto f = levels_u8(fused);
    return pair_mi(levels_u8(src1), f) + pair_mi(levels_u8(src2), f);
}

double sd(const Image& img) {
    if (img.empty()) return 0.0;
    const auto px = img.pixels();
    double mean = 0.0;
    for (double v : px) mean += 255.0 * v;
    mean /= static_cast<double>(px.size());
    double sq = 0.0;
    for (double v : px) sq += (255.0 * v - mean) * (255.0 * v - mean);
    return std::sqrt(sq / static_cast<double>(px.size()));
}

double qabf(const Image& src1, const Image& src2, const Image& fused, const QabfParams& p) {
    require_same_shape(src1, fused, "qabf");
    require_same_shape(src2, fused, "qabf");
    const EdgeField ea = sobel(src1);
    const EdgeField eb = sobel(src2);
    const EdgeField ef = sobel(fused);
    const auto qa = preservation(ea, ef, p);
    const auto qb = preservation(eb, ef, p);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < qa.size(); ++i) {
        const double wa = std::pow(ea.strength[i], p.exponent);
        const double wb = std::pow(eb.strength[i], p.exponent);
        num += qa[i] * wa + qb[i] * wb;
        den += wa + wb;
    }
    return den == 0.0 ? 0.0 : num / den;
}

double scd(const Image& src1, const Image& src2, const Image& fused) {
    require_same_shape(src1, fused, "scd");
    require_same_shape(src2, fused, "scd");
    const Image d1 = fused - src2;
    const Image d2 = fused - src1;
    return pearson(d1.pixels(), src1.pixels()) + pearson(d2.pixels(), src2.pixels());
}

double ssim(const Image& x, const Image& y, const SsimParams& p) {
    require_same_shape(x, y, "ssim");
    return ssim_terms(to_255(x), to_255(y), x.height(), x.width(), p).ssim;
}

double ssim_a(const Image& src1, const Image& src2, const Image& fused, const SsimParams& p) {
    return 0.5 * (ssim(src1, fused, p) + ssim(src2, fused, p));
}

int ms_ssim_scales(std::size_t height, std::size_t width, int window) {
    std::size_t side = std::min(height, width);
    int scales = 0;
    while (scales < static_cast<int>(kMsSsimWeights.size()) &&
           side >= static_cast<std::size_t>(window)) {
        ++scales;
        side /= 2;
    }
    return scales;
}

double ms_ssim_pair(const Image& x, const Image& y, const SsimParams& p) {
    require_same_shape(x, y, "ms_ssim");
    const int scales = ms_ssim_scales(x.height(), x.width(), p.window);
    if (scales == 0) {
        throw ArgumentError("ms_ssim: image " + std::to_string(x.height()) + "x" +
                            std::to_string(x.width()) + " is too small for one scale");
    }
    double weight_total = 0.0;
    for (int s = 0; s < scales; ++s) weight_total += kMsSsimWeights[static_cast<std::size_t>(s)];

    auto a = to_255(x);
    auto b = to_255(y);
    std::size_t h = x.height(), w = x.width();
    double result = 1.0;
    for (int s = 0; s < scales; ++s) {
        const SsimTerms t = ssim_terms(a, b, h, w, p);
        const double weight = kMsSsimWeights[static_cast<std::size_t>(s)] / weight_total;
        const double term = s + 1 == scales ? t.ssim : t.cs;
        result *= std::pow(std::max(term, 0.0), weight);
        if (s + 1 < scales) {
            a = halve(a, h, w);
            b = halve(b, h, w);
            h /= 2;
            w /= 2;
        }
    }
    return result;
}

double ms_ssim(const Image& src1, const Image& src2, const Image& fused, const SsimParams& p) {
    return 0.5 * (ms_ssim_pair(src1, fused, p) + ms_ssim_pair(src2, fused, p));
}

std::map<std::string, double> evaluate_all(const Image& src1, const Image& src2,
                                           const Image& fused) {
    return {
        {"En", entropy(fused)},
        {"MI", mutual_information(src1, src2, fused)},
        {"SD", sd(fused)},
        {"Qabf", qabf(src1, src2, fused)},
        {"SCD", scd(src1, src2, fused)},
        {"SSIMa", ssim_a(src1, src2, fused)},
        {"MS-SSIM", ms_ssim(src1, src2, fused)},
    };
}

}  // namespace mdlatlrr::metrics
