#include "mdlatlrr/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "mdlatlrr/error.hpp"

namespace mdlatlrr {
namespace {

std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

Image read_png(const std::filesystem::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (png_image_begin_read_from_file(&image, path.c_str()) == 0) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw DataError(path.string() + ": malformed PNG (" + msg + ")");
    }
    if (image.format != PNG_FORMAT_GRAY) {
        png_image_free(&image);
        throw DataError(path.string() + ": only 8-bit grayscale PNG is supported");
    }
    std::vector<unsigned char> pixels(PNG_IMAGE_SIZE(image));
    if (png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr) == 0) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw DataError(path.string() + ": malformed PNG (" + msg + ")");
    }
    std::vector<double> data(pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) data[i] = pixels[i] / 255.0;
    return Image(image.height, image.width, std::move(data));
}

void write_png(const std::filesystem::path& tmp, std::size_t height, std::size_t width,
               const std::vector<unsigned char>& pixels) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = PNG_FORMAT_GRAY;
    if (png_image_write_to_file(&image, tmp.c_str(), 0, pixels.data(), 0, nullptr) == 0) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw DataError(tmp.string() + ": PNG encoding failed (" + msg + ")");
    }
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::size_t pgm_header_value(const std::string& bytes, std::size_t& pos, const std::string& name) {
    for (;;) {
        while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
        if (pos < bytes.size() && bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            continue;
        }
        break;
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (start == pos) throw DataError(name + ": malformed PGM header");
    return std::stoul(bytes.substr(start, pos - start));
}

Image read_pgm(const std::filesystem::path& path, const std::string& bytes) {
    const std::string name = path.string();
    std::size_t pos = 2;
    const std::size_t width = pgm_header_value(bytes, pos, name);
    const std::size_t height = pgm_header_value(bytes, pos, name);
    const std::size_t maxval = pgm_header_value(bytes, pos, name);
    if (width == 0 || height == 0) throw DataError(name + ": empty PGM");
    if (maxval == 0 || maxval > 255) {
        throw DataError(name + ": only 8-bit PGM is supported (maxval " + std::to_string(maxval) + ")");
    }
    ++pos;  // single whitespace byte before the raster
    if (bytes.size() < pos + width * height) throw DataError(name + ": truncated PGM raster");
    std::vector<double> data(width * height);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto v = static_cast<unsigned char>(bytes[pos + i]);
        if (v > maxval) throw DataError(name + ": PGM sample exceeds maxval");
        // Rescale to the 0-255 code range first so maxval 255 maps by /255.
        data[i] = (maxval == 255 ? v : std::round(v * 255.0 / static_cast<double>(maxval))) / 255.0;
    }
    return Image(height, width, std::move(data));
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

std::uint64_t get_le(const std::string& bytes, std::size_t pos, int width) {
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + static_cast<std::size_t>(i)])) << (8 * i);
    }
    return v;
}

void commit(const std::filesystem::path& tmp, const std::filesystem::path& path) {
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw DataError("cannot move output into place at '" + path.string() + "': " + ec.message());
}

}  // namespace

bool is_image_file(const std::filesystem::path& path) {
    const std::string ext = lower_extension(path);
    return ext == ".png" || ext == ".pgm";
}

Image read_image(const std::filesystem::path& path) {
    const std::string bytes = slurp(path);
    static constexpr unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    if (bytes.size() >= 8 && std::equal(kPngSig, kPngSig + 8, bytes.begin(),
                                        [](unsigned char a, char b) { return a == static_cast<unsigned char>(b); })) {
        return read_png(path);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return read_pgm(path, bytes);
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '6' || bytes[1] == '3')) {
        throw DataError(path.string() + ": colour images are not supported");
    }
    throw DataError(path.string() + ": unrecognised image format (expected 8-bit PNG or P5 PGM)");
}

void write_image(const std::filesystem::path& path, const Image& img) {
    if (img.empty()) throw ArgumentError("write_image: empty image");
    std::vector<unsigned char> pixels(img.size());
    const auto px = img.pixels();
    for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = quantize_u8(px[i]);

    const std::string ext = lower_extension(path);
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    if (ext == ".png") {
        write_png(tmp, img.height(), img.width(), pixels);
    } else if (ext == ".pgm") {
        std::string out = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
        out.append(pixels.begin(), pixels.end());
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw DataError("cannot open '" + tmp.string() + "' for writing");
        f.write(out.data(), static_cast<std::streamsize>(out.size()));
        if (!f) throw DataError("failed writing '" + tmp.string() + "'");
    } else {
        throw ArgumentError("unsupported output extension '" + ext + "' (use .png or .pgm)");
    }
    commit(tmp, path);
}

void write_raw(const std::filesystem::path& path, const Image& img) {
    std::string out = "MDRW";
    put_u32(out, static_cast<std::uint32_t>(img.height()));
    put_u32(out, static_cast<std::uint32_t>(img.width()));
    for (double v : img.pixels()) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFu));
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw DataError("cannot open '" + tmp.string() + "' for writing");
        f.write(out.data(), static_cast<std::streamsize>(out.size()));
        if (!f) throw DataError("failed writing '" + tmp.string() + "'");
    }
    commit(tmp, path);
}

Image read_raw(const std::filesystem::path& path) {
    const std::string bytes = slurp(path);
    if (bytes.size() < 12 || bytes.compare(0, 4, "MDRW") != 0) {
        throw DataError(path.string() + ": not a raw image dump");
    }
    const auto h = static_cast<std::size_t>(get_le(bytes, 4, 4));
    const auto w = static_cast<std::size_t>(get_le(bytes, 8, 4));
    if (bytes.size() != 12 + h * w * 8) throw DataError(path.string() + ": raw dump size mismatch");
    std::vector<double> data(h * w);
    for (std::size_t i = 0; i < data.size(); ++i) {
        data[i] = std::bit_cast<double>(get_le(bytes, 12 + 8 * i, 8));
    }
    return Image(h, w, std::move(data));
}

}  // namespace mdlatlrr
