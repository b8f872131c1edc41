#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mdlatlrr/image.hpp"

namespace mdlatlrr::app {

struct ImagePair {
    std::string id;
    std::filesystem::path ir;
    std::filesystem::path vis;
};

struct Triple {
    std::string id;
    std::filesystem::path src1;
    std::filesystem::path src2;
    std::filesystem::path fused;
};

/// Every readable image under `dir` (recursively), sorted by path.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

/// Registered infrared/visible pairs in `dir`. Two layouts are recognised:
///   dir/ir/<name>.png + dir/vis/<name>.png   (paired by file stem)
///   dir/IR<key>.png   + dir/VIS<key>.png     (prefix is case-insensitive,
///                                             an optional '_' or '-' follows)
/// Pairs are ordered by id, numerically when both ids are numbers.
std::vector<ImagePair> discover_pairs(const std::filesystem::path& dir);

/// Manifest lines: "<id> <src1> <src2> <fused>", whitespace separated; blank
/// lines and lines starting with '#' are skipped. Relative paths resolve
/// against the manifest's directory.
std::vector<Triple> read_manifest(const std::filesystem::path& manifest);

std::vector<Image> load_images(const std::vector<std::filesystem::path>& paths);

}  // namespace mdlatlrr::app
