#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mdlatlrr {

/// Grayscale raster, row-major, 64-bit samples. Source images live in [0, 1];
/// intermediate detail/base parts may leave that range.
class Image {
public:
    Image() = default;
    Image(std::size_t height, std::size_t width, double fill = 0.0);
    Image(std::size_t height, std::size_t width, std::vector<double> data);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t row, std::size_t col) { return data_[row * width_ + col]; }
    double operator()(std::size_t row, std::size_t col) const { return data_[row * width_ + col]; }

    double* row(std::size_t r) noexcept { return data_.data() + r * width_; }
    const double* row(std::size_t r) const noexcept { return data_.data() + r * width_; }

    std::span<double> pixels() noexcept { return data_; }
    std::span<const double> pixels() const noexcept { return data_; }

    bool same_shape(const Image& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_;
    }

    Image& operator+=(const Image& other);
    Image& operator-=(const Image& other);
    Image& operator*=(double factor);

    double min() const;
    double max() const;

    /// Copy with every sample clamped into [0, 1].
    Image clamped() const;

    /// Affine min-max rescale into [0, 1]; a constant image maps to all zeros.
    Image rescaled_to_unit() const;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<double> data_;
};

Image operator+(Image lhs, const Image& rhs);
Image operator-(Image lhs, const Image& rhs);
Image operator*(double factor, Image img);

/// Largest absolute pixel difference; shapes must match.
double max_abs_difference(const Image& a, const Image& b);

/// Quantizes a [0,1] sample to 8 bits: clamp, scale by 255, round half away
/// from zero.
unsigned char quantize_u8(double value);

/// Clamped, 8-bit quantized copy with samples k / 255: what write_image stores.
Image quantized(const Image& img);

}  // namespace mdlatlrr
