#include "mdlatlrr/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mdlatlrr/error.hpp"

namespace mdlatlrr {
namespace {

void require_same_shape(const Image& a, const Image& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ArgumentError(std::string(op) + ": image shapes differ (" +
                            std::to_string(a.height()) + "x" + std::to_string(a.width()) + " vs " +
                            std::to_string(b.height()) + "x" + std::to_string(b.width()) + ")");
    }
}

}  // namespace

Image::Image(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width), data_(height * width, fill) {}

Image::Image(std::size_t height, std::size_t width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
    if (data_.size() != height_ * width_) {
        throw ArgumentError("Image: data length " + std::to_string(data_.size()) +
                            " does not match " + std::to_string(height_) + "x" +
                            std::to_string(width_));
    }
}

Image& Image::operator+=(const Image& other) {
    require_same_shape(*this, other, "Image +=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Image& Image::operator-=(const Image& other) {
    require_same_shape(*this, other, "Image -=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Image& Image::operator*=(double factor) {
    for (double& v : data_) v *= factor;
    return *this;
}

double Image::min() const {
    return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end());
}

double Image::max() const {
    return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end());
}

Image Image::clamped() const {
    Image out = *this;
    for (double& v : out.data_) v = std::clamp(v, 0.0, 1.0);
    return out;
}

Image Image::rescaled_to_unit() const {
    Image out(height_, width_, 0.0);
    const double lo = min();
    const double range = max() - lo;
    if (range <= 0.0) return out;
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = (data_[i] - lo) / range;
    return out;
}

Image operator+(Image lhs, const Image& rhs) { return lhs += rhs; }
Image operator-(Image lhs, const Image& rhs) { return lhs -= rhs; }
Image operator*(double factor, Image img) { return img *= factor; }

double max_abs_difference(const Image& a, const Image& b) {
    require_same_shape(a, b, "max_abs_difference");
    double worst = 0.0;
    const auto pa = a.pixels();
    const auto pb = b.pixels();
    for (std::size_t i = 0; i < pa.size(); ++i) worst = std::max(worst, std::abs(pa[i] - pb[i]));
    return worst;
}

unsigned char quantize_u8(double value) {
    const double scaled = std::clamp(value, 0.0, 1.0) * 255.0;
    return static_cast<unsigned char>(std::round(scaled));
}

Image quantized(const Image& img) {
    Image out(img.height(), img.width());
    const auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = quantize_u8(src[i]) / 255.0;
    return out;
}

}  // namespace mdlatlrr
