#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "mdlatlrr/linalg.hpp"

namespace mdlatlrr {

/// How a projection matrix was trained.
struct Provenance {
    double lambda = 0.4;
    std::uint64_t seed = 0;
    std::size_t detail_count = 0;
    std::size_t smooth_count = 0;
    double threshold = 0.5;

    /// `key=value` pairs joined by ';', doubles in shortest round-trip form.
    std::string to_string() const;

    /// Parses to_string() output. Unknown keys are ignored; missing or
    /// malformed known keys throw DataError.
    static Provenance parse(const std::string& text);

    bool operator==(const Provenance&) const = default;
};

/// Learned N x N projection (N = n^2) that maps vectorized n x n patches to
/// their salient part. Immutable once built.
class ProjectionMatrix {
public:
    /// Throws ArgumentError unless `mat` is n^2 x n^2 with finite entries.
    ProjectionMatrix(std::size_t patch_size, Matrix mat, Provenance provenance = {});

    std::size_t patch_size() const noexcept { return patch_size_; }
    std::size_t dimension() const noexcept { return patch_size_ * patch_size_; }
    const Matrix& matrix() const noexcept { return mat_; }
    const Provenance& provenance() const noexcept { return provenance_; }

private:
    std::size_t patch_size_;
    Matrix mat_;
    Provenance provenance_;
};

/// Binary `.mdll` encoding:
///   "MDLL" | u32 version (=1) | u32 n | n^4 f64 row-major | u32 len | provenance
/// All integers and floats little-endian.
std::string encode_projection(const ProjectionMatrix& proj);
ProjectionMatrix decode_projection(const std::string& bytes);

void save_projection(const ProjectionMatrix& proj, const std::filesystem::path& path);
ProjectionMatrix load_projection(const std::filesystem::path& path);

}  // namespace mdlatlrr
