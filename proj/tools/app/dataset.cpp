#include "dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "mdlatlrr/error.hpp"
#include "mdlatlrr/image_io.hpp"

namespace fs = std::filesystem;

namespace mdlatlrr::app {
namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool id_less(const std::string& a, const std::string& b) {
    if (all_digits(a) && all_digits(b) && a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

void require_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw DataError("'" + dir.string() + "' is not a directory");
}

fs::path find_subdir(const fs::path& dir, const std::string& name) {
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory() && lower(entry.path().filename().string()) == name) return entry.path();
    }
    return {};
}

std::map<std::string, fs::path> images_by_stem(const fs::path& dir) {
    std::map<std::string, fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) {
            out[entry.path().stem().string()] = entry.path();
        }
    }
    return out;
}

std::vector<ImagePair> join(const std::map<std::string, fs::path>& ir,
                            const std::map<std::string, fs::path>& vis, const fs::path& dir) {
    std::vector<ImagePair> pairs;
    for (const auto& [key, path] : ir) {
        const auto it = vis.find(key);
        if (it == vis.end()) throw DataError("'" + path.string() + "' has no visible counterpart");
        pairs.push_back({key, path, it->second});
    }
    for (const auto& [key, path] : vis) {
        if (!ir.count(key)) throw DataError("'" + path.string() + "' has no infrared counterpart");
    }
    if (pairs.empty()) throw DataError("no infrared/visible pairs found in '" + dir.string() + "'");
    std::sort(pairs.begin(), pairs.end(), [](const ImagePair& a, const ImagePair& b) { return id_less(a.id, b.id); });
    return pairs;
}

std::string strip_prefix(const std::string& stem, std::size_t len) {
    std::string key = stem.substr(len);
    if (!key.empty() && (key.front() == '_' || key.front() == '-')) key.erase(0, 1);
    return key;
}

}  // namespace

std::vector<fs::path> list_images(const fs::path& dir) {
    require_dir(dir);
    std::vector<fs::path> out;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) throw DataError("no PNG/PGM images found in '" + dir.string() + "'");
    return out;
}

std::vector<ImagePair> discover_pairs(const fs::path& dir) {
    require_dir(dir);
    const fs::path ir_dir = find_subdir(dir, "ir");
    const fs::path vis_dir = find_subdir(dir, "vis");
    if (!ir_dir.empty() && !vis_dir.empty()) {
        return join(images_by_stem(ir_dir), images_by_stem(vis_dir), dir);
    }

    std::map<std::string, fs::path> ir, vis;
    for (const auto& [stem, path] : images_by_stem(dir)) {
        const std::string low = lower(stem);
        if (low.rfind("vis", 0) == 0) {
            vis[strip_prefix(stem, 3)] = path;
        } else if (low.rfind("ir", 0) == 0) {
            ir[strip_prefix(stem, 2)] = path;
        }
    }
    return join(ir, vis, dir);
}

std::vector<Triple> read_manifest(const fs::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw DataError("cannot open manifest '" + manifest.string() + "'");
    const fs::path base = manifest.parent_path();
    auto resolve = [&](const std::string& p) {
        const fs::path path(p);
        return path.is_absolute() ? path : base / path;
    };
    std::vector<Triple> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string id, a, b, f, extra;
        if (!(fields >> id) || id.front() == '#') continue;
        if (!(fields >> a >> b >> f) || (fields >> extra)) {
            throw DataError(manifest.string() + ":" + std::to_string(line_no) +
                            ": expected '<id> <src1> <src2> <fused>'");
        }
        out.push_back({id, resolve(a), resolve(b), resolve(f)});
    }
    if (out.empty()) throw DataError("manifest '" + manifest.string() + "' lists no triples");
    return out;
}

std::vector<Image> load_images(const std::vector<fs::path>& paths) {
    std::vector<Image> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back(read_image(p));
    return out;
}

}  // namespace mdlatlrr::app
