#pragma once

#include <filesystem>

#include "mdlatlrr/image.hpp"

namespace mdlatlrr {

/// Reads an 8-bit grayscale PNG or binary PGM (P5, maxval <= 255); the format
/// is detected from the file signature. Pixels are mapped to [0, 1] by /255.
/// Colour, 16-bit and palette images are rejected with DataError naming the
/// file.
Image read_image(const std::filesystem::path& path);

/// Clamps to [0, 1], quantizes to 8 bits (round half away from zero) and
/// writes PNG or PGM depending on the extension (.png, .pgm). Written via a
/// temporary file and renamed into place.
void write_image(const std::filesystem::path& path, const Image& img);

/// Unclamped float dump: "MDRW" | u32 height | u32 width | h*w f64, all
/// little-endian, row-major.
void write_raw(const std::filesystem::path& path, const Image& img);
Image read_raw(const std::filesystem::path& path);

/// True for extensions read_image understands.
bool is_image_file(const std::filesystem::path& path);

}  // namespace mdlatlrr
