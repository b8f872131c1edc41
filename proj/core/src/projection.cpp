#include "mdlatlrr/projection.hpp"

#include <bit>
#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string_view>
#include <system_error>

#include "mdlatlrr/error.hpp"

namespace mdlatlrr {
namespace {

constexpr std::string_view kMagic = "MDLL";
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_f64(std::string& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFu));
}

class Reader {
public:
    explicit Reader(const std::string& bytes) : bytes_(bytes) {}

    std::uint64_t take(int width) {
        if (pos_ + static_cast<std::size_t>(width) > bytes_.size()) {
            throw DataError("projection file truncated at byte " + std::to_string(pos_));
        }
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_++])) << (8 * i);
        }
        return v;
    }
    std::uint32_t u32() { return static_cast<std::uint32_t>(take(4)); }
    double f64() { return std::bit_cast<double>(take(8)); }

    std::string text(std::size_t len) {
        if (pos_ + len > bytes_.size()) throw DataError("projection file truncated in provenance");
        std::string s = bytes_.substr(pos_, len);
        pos_ += len;
        return s;
    }
    bool at_end() const { return pos_ == bytes_.size(); }

private:
    const std::string& bytes_;
    std::size_t pos_ = 0;
};

template <typename T>
std::string format_number(T value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw DataError("provenance: malformed value for '" + std::string(key) + "': '" +
                        std::string(text) + "'");
    }
    return value;
}

}  // namespace

std::string Provenance::to_string() const {
    return "lambda=" + format_number(lambda) + ";seed=" + format_number(seed) +
           ";detail_count=" + format_number(detail_count) +
           ";smooth_count=" + format_number(smooth_count) +
           ";threshold=" + format_number(threshold);
}

Provenance Provenance::parse(const std::string& text) {
    Provenance p;
    unsigned seen = 0;
    std::string_view rest = text;
    while (!rest.empty()) {
        const auto end = rest.find(';');
        const std::string_view item = rest.substr(0, end);
        rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end + 1);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) continue;
        const std::string_view key = item.substr(0, eq);
        const std::string_view value = item.substr(eq + 1);
        if (key == "lambda") {
            p.lambda = parse_number<double>(key, value);
            seen |= 1u;
        } else if (key == "seed") {
            p.seed = parse_number<std::uint64_t>(key, value);
            seen |= 2u;
        } else if (key == "detail_count") {
            p.detail_count = parse_number<std::size_t>(key, value);
            seen |= 4u;
        } else if (key == "smooth_count") {
            p.smooth_count = parse_number<std::size_t>(key, value);
            seen |= 8u;
        } else if (key == "threshold") {
            p.threshold = parse_number<double>(key, value);
            seen |= 16u;
        }
    }
    if (seen != 31u) throw DataError("provenance: missing keys in '" + text + "'");
    return p;
}

ProjectionMatrix::ProjectionMatrix(std::size_t patch_size, Matrix mat, Provenance provenance)
    : patch_size_(patch_size), mat_(std::move(mat)), provenance_(provenance) {
    const auto dim = static_cast<Eigen::Index>(patch_size_ * patch_size_);
    if (patch_size_ < 2 || mat_.rows() != dim || mat_.cols() != dim) {
        throw ArgumentError("projection matrix must be n^2 x n^2 for patch size " +
                            std::to_string(patch_size_) + ", got " + std::to_string(mat_.rows()) +
                            "x" + std::to_string(mat_.cols()));
    }
    require_finite(mat_, "projection matrix");
}

std::string encode_projection(const ProjectionMatrix& proj) {
    const Matrix& m = proj.matrix();
    const std::string prov = proj.provenance().to_string();
    std::string out;
    out.reserve(16 + static_cast<std::size_t>(m.size()) * 8 + prov.size());
    out.append(kMagic);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(proj.patch_size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64(out, m(r, c));
    }
    put_u32(out, static_cast<std::uint32_t>(prov.size()));
    out.append(prov);
    return out;
}

ProjectionMatrix decode_projection(const std::string& bytes) {
    if (bytes.size() < kMagic.size() || std::string_view(bytes).substr(0, 4) != kMagic) {
        throw DataError("not a projection file (bad magic)");
    }
    Reader in(bytes);
    in.text(4);
    const std::uint32_t version = in.u32();
    if (version != kVersion) {
        throw DataError("unsupported projection file version " + std::to_string(version));
    }
    const std::uint32_t n = in.u32();
    if (n < 2 || n > 4096) throw DataError("projection file: implausible patch size " + std::to_string(n));
    const auto dim = static_cast<Eigen::Index>(n) * n;
    Matrix m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = in.f64();
    }
    const std::uint32_t len = in.u32();
    const Provenance prov = Provenance::parse(in.text(len));
    if (!in.at_end()) throw DataError("projection file has trailing bytes");
    if (!m.allFinite()) throw DataError("projection file contains non-finite values");
    return ProjectionMatrix(n, std::move(m), prov);
}

void save_projection(const ProjectionMatrix& proj, const std::filesystem::path& path) {
    const std::string bytes = encode_projection(proj);
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open '" + tmp.string() + "' for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw DataError("failed writing '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

ProjectionMatrix load_projection(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open projection file '" + path.string() + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_projection(bytes);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

}  // namespace mdlatlrr
