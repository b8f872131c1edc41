#include "commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dataset.hpp"
#include "mdlatlrr/decompose.hpp"
#include "mdlatlrr/error.hpp"
#include "mdlatlrr/fusion.hpp"
#include "mdlatlrr/image_io.hpp"
#include "mdlatlrr/latlrr.hpp"
#include "mdlatlrr/metrics.hpp"
#include "mdlatlrr/projection.hpp"
#include "report.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace mdlatlrr::app {
namespace {

struct TrainArgs {
    std::string data, out;
    std::size_t patch_size = 16, stride = 1, detail = 1000, smooth = 1000, max_iters = 1000;
    double threshold = 0.5, lambda = 0.4, tol = 1e-6;
    std::uint64_t seed = 0;
};

struct DecomposeArgs {
    std::string image, proj, out_dir;
    std::size_t levels = 2, stride = 1;
    bool raw = false;
};

struct FuseArgs {
    std::string a, b, proj, out, raw;
    std::size_t levels = 2, stride = 1;
    std::string norm = "nuclear";
    std::vector<double> base_weights = {0.5, 0.5};
};

struct EvalArgs {
    std::string a, b, fused, id = "pair", manifest, out, format = "json";
};

struct BenchArgs {
    std::string data, proj, out, format = "json", sweep = "all", stride_norm = "nuclear";
    std::size_t max_pairs = 0, max_levels = 8, stride_levels = 4;
    std::vector<std::size_t> strides = {1, 2, 4, 6, 8, 10, 12, 14};
};

void require_input(const std::string& path) {
    if (!fs::exists(path)) throw DataError("'" + path + "' does not exist");
}

void require_output_parent(const fs::path& path) {
    const fs::path parent = path.parent_path();
    if (!parent.empty() && !fs::is_directory(parent)) {
        throw ArgumentError("output directory '" + parent.string() + "' does not exist");
    }
}

// Opens `path` for report output, or returns `fallback` when it is empty.
class ReportSink {
public:
    ReportSink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            require_output_parent(path);
            file_.open(path);
            if (!file_) throw ArgumentError("cannot open '" + path + "' for writing");
            stream_ = &file_;
        }
    }
    std::ostream& stream() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

std::vector<std::string> metric_columns(std::vector<std::string> leading) {
    for (const char* name : metrics::kMetricNames) leading.emplace_back(name);
    return leading;
}

void put_metrics(json& record, const std::map<std::string, double>& values) {
    for (const char* name : metrics::kMetricNames) record[name] = values.at(name);
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
    require_output_parent(a.out);
    const std::vector<Image> images = load_images(list_images(a.data));
    TrainingConfig cfg;
    cfg.patch_size = a.patch_size;
    cfg.stride = a.stride;
    cfg.detail_count = a.detail;
    cfg.smooth_count = a.smooth;
    cfg.threshold = a.threshold;
    cfg.seed = a.seed;
    LatLrrParams params;
    params.lambda = a.lambda;
    params.tol = a.tol;
    params.max_iters = a.max_iters;

    const auto start = std::chrono::steady_clock::now();
    const TrainingResult result = train_projection(images, cfg, params);
    save_projection(result.projection, a.out);

    json record;
    record["command"] = "train";
    record["seed"] = a.seed;
    record["images"] = images.size();
    record["patch_size"] = a.patch_size;
    record["stride"] = a.stride;
    record["threshold"] = a.threshold;
    record["lambda"] = a.lambda;
    record["detail_pool"] = result.pools.detail;
    record["smooth_pool"] = result.pools.smooth;
    record["detail_count"] = a.detail;
    record["smooth_count"] = a.smooth;
    record["iterations"] = result.iterations;
    record["final_residual"] = result.final_residual;
    record["converged"] = result.converged;
    record["wall_ms"] = elapsed_ms(start);
    record["out"] = a.out;
    out << record.dump() << '\n';
    if (!result.converged) {
        err << "warning: solver stopped at max_iters=" << a.max_iters
            << " with residual " << result.final_residual << " > tol " << a.tol << '\n';
    }
    return 0;
}

int cmd_decompose(const DecomposeArgs& a, std::ostream& out) {
    require_input(a.image);
    require_input(a.proj);
    fs::create_directories(a.out_dir);
    const Image img = read_image(a.image);
    const ProjectionMatrix proj = load_projection(a.proj);
    const Decomposition d = mdlatlrr(img, proj, a.levels, a.stride, false);

    json files = json::array();
    auto emit = [&](const std::string& stem, const Image& shown, const Image& raw) {
        const fs::path png = fs::path(a.out_dir) / (stem + ".png");
        write_image(png, shown);
        files.push_back(png.string());
        if (a.raw) {
            const fs::path dump = fs::path(a.out_dir) / (stem + ".raw");
            write_raw(dump, raw);
            files.push_back(dump.string());
        }
    };
    for (std::size_t i = 0; i < d.levels; ++i) {
        emit("detail_" + std::to_string(i + 1), d.detail_images[i].rescaled_to_unit(), d.detail_images[i]);
    }
    emit("base", d.base, d.base);

    json record;
    record["command"] = "decompose";
    record["seed"] = proj.provenance().seed;
    record["image"] = a.image;
    record["levels"] = a.levels;
    record["stride"] = a.stride;
    record["patch_size"] = proj.patch_size();
    record["files"] = files;
    out << record.dump() << '\n';
    return 0;
}

int cmd_fuse(const FuseArgs& a, std::ostream& out) {
    FusionConfig cfg;
    cfg.levels = a.levels;
    cfg.stride = a.stride;
    cfg.detail_norm = parse_detail_norm(a.norm);
    cfg.base_weight1 = a.base_weights.at(0);
    cfg.base_weight2 = a.base_weights.at(1);
    cfg.validate();
    require_input(a.a);
    require_input(a.b);
    require_input(a.proj);
    require_output_parent(a.out);
    if (!a.raw.empty()) require_output_parent(a.raw);

    const Image img1 = read_image(a.a);
    const Image img2 = read_image(a.b);
    const ProjectionMatrix proj = load_projection(a.proj);
    const auto start = std::chrono::steady_clock::now();
    const Image fused = fuse_images(img1, img2, proj, cfg);
    const double ms = elapsed_ms(start);
    write_image(a.out, fused);
    if (!a.raw.empty()) write_raw(a.raw, fused);

    json record;
    record["command"] = "fuse";
    record["seed"] = proj.provenance().seed;
    record["a"] = a.a;
    record["b"] = a.b;
    record["levels"] = a.levels;
    record["stride"] = a.stride;
    record["norm"] = a.norm;
    record["base_weights"] = a.base_weights;
    record["wall_ms"] = ms;
    record["out"] = a.out;
    out << record.dump() << '\n';
    return 0;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
    const ReportFormat format = parse_report_format(a.format);
    std::vector<Triple> triples;
    if (!a.manifest.empty()) {
        if (!a.a.empty() || !a.b.empty() || !a.fused.empty()) {
            throw ArgumentError("eval: use either --manifest or --a/--b/--fused, not both");
        }
        triples = read_manifest(a.manifest);
    } else {
        if (a.a.empty() || a.b.empty() || a.fused.empty()) {
            throw ArgumentError("eval: --a, --b and --fused are required without --manifest");
        }
        triples.push_back({a.id, a.a, a.b, a.fused});
    }
    for (const Triple& t : triples) {
        require_input(t.src1.string());
        require_input(t.src2.string());
        require_input(t.fused.string());
    }

    ReportSink sink(a.out, out);
    ReportWriter writer(sink.stream(), format, metric_columns({"record", "pair_id", "pairs"}));
    std::map<std::string, double> sums;
    for (const Triple& t : triples) {
        const auto values = metrics::evaluate_all(read_image(t.src1), read_image(t.src2), read_image(t.fused));
        json record;
        record["record"] = "pair";
        record["pair_id"] = t.id;
        record["pairs"] = 1;
        put_metrics(record, values);
        writer.write(record);
        for (const auto& [k, v] : values) sums[k] += v;
    }
    if (!a.manifest.empty()) {
        json record;
        record["record"] = "aggregate";
        record["pair_id"] = "mean";
        record["pairs"] = triples.size();
        for (auto& [k, v] : sums) v /= static_cast<double>(triples.size());
        put_metrics(record, sums);
        writer.write(record);
    }
    return 0;
}

// Running per-cell means plus accumulated wall time.
struct Cell {
    std::map<std::string, double> sums;
    double wall_ms = 0.0;
    std::size_t pairs = 0;

    void add(const std::map<std::string, double>& values, double ms) {
        for (const auto& [k, v] : values) sums[k] += v;
        wall_ms += ms;
        ++pairs;
    }
};

// One shared pass per pair: fuses levels 1..max_levels for every norm and
// scores each cell. A cell's wall time is the time the pass needed to reach
// its level (shared by the norms of that pass) plus its own metric time.
void sweep_pair(const Image& ir, const Image& vis, const ProjectionMatrix& proj,
                std::size_t max_levels, std::size_t stride, const std::vector<DetailNorm>& norms,
                std::vector<std::vector<Cell>>& cells) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<double> reached(max_levels, 0.0);
    const auto fused = fuse_images_all_levels(ir, vis, proj, max_levels, stride, norms, 0.5, 0.5,
                                              [&](std::size_t level) { reached[level - 1] = elapsed_ms(start); });
    for (std::size_t k = 0; k < norms.size(); ++k) {
        for (std::size_t r = 0; r < max_levels; ++r) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto values = metrics::evaluate_all(ir, vis, quantized(fused[k][r]));
            cells[k][r].add(values, reached[r] + elapsed_ms(t0));
        }
    }
}

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
    const ReportFormat format = parse_report_format(a.format);
    if (a.sweep != "levels" && a.sweep != "strides" && a.sweep != "all") {
        throw ArgumentError("bench: --sweep must be levels, strides or all");
    }
    require_input(a.proj);
    const ProjectionMatrix proj = load_projection(a.proj);
    const DetailNorm stride_norm = parse_detail_norm(a.stride_norm);
    if (a.max_levels < 1 || a.max_levels > kMaxLevels || a.stride_levels < 1 || a.stride_levels > kMaxLevels) {
        throw ArgumentError("bench: level counts must be in [1, " + std::to_string(kMaxLevels) + "]");
    }
    for (std::size_t s : a.strides) {
        if (s < 1 || s > proj.patch_size()) {
            throw ArgumentError("bench: stride " + std::to_string(s) + " outside [1, " +
                                std::to_string(proj.patch_size()) + "] for this projection");
        }
    }
    std::vector<ImagePair> pairs = discover_pairs(a.data);
    if (a.max_pairs > 0 && pairs.size() > a.max_pairs) pairs.resize(a.max_pairs);

    ReportSink sink(a.out, out);
    ReportWriter writer(sink.stream(), format,
                        metric_columns({"sweep", "level", "norm", "stride", "pairs", "wall_ms", "seed"}));
    auto emit = [&](const char* sweep, std::size_t level, DetailNorm norm, std::size_t stride, const Cell& c) {
        json record;
        record["sweep"] = sweep;
        record["level"] = level;
        record["norm"] = to_string(norm);
        record["stride"] = stride;
        record["pairs"] = c.pairs;
        record["wall_ms"] = c.wall_ms;
        record["seed"] = proj.provenance().seed;
        for (const char* name : metrics::kMetricNames) {
            record[name] = c.sums.at(name) / static_cast<double>(c.pairs);
        }
        writer.write(record);
    };

    const bool levels = a.sweep != "strides";
    const bool strides = a.sweep != "levels";
    const std::vector<DetailNorm> level_norms = {DetailNorm::l1, DetailNorm::nuclear};
    std::vector<std::vector<Cell>> level_cells(level_norms.size(), std::vector<Cell>(a.max_levels));
    std::vector<std::vector<std::vector<Cell>>> stride_cells(
        a.strides.size(), std::vector<std::vector<Cell>>(1, std::vector<Cell>(a.stride_levels)));

    for (const ImagePair& pair : pairs) {
        const Image ir = read_image(pair.ir);
        const Image vis = read_image(pair.vis);
        if (!ir.same_shape(vis)) {
            throw DataError("pair '" + pair.id + "': '" + pair.ir.string() + "' and '" + pair.vis.string() +
                            "' differ in size");
        }
        err << "bench: pair " << pair.id << '\n';
        if (levels) sweep_pair(ir, vis, proj, a.max_levels, 1, level_norms, level_cells);
        if (strides) {
            for (std::size_t i = 0; i < a.strides.size(); ++i) {
                sweep_pair(ir, vis, proj, a.stride_levels, a.strides[i], {stride_norm}, stride_cells[i]);
            }
        }
    }

    if (levels) {
        for (std::size_t k = 0; k < level_norms.size(); ++k)
            for (std::size_t r = 0; r < a.max_levels; ++r) emit("levels", r + 1, level_norms[k], 1, level_cells[k][r]);
    }
    if (strides) {
        for (std::size_t i = 0; i < a.strides.size(); ++i)
            for (std::size_t r = 0; r < a.stride_levels; ++r)
                emit("strides", r + 1, stride_norm, a.strides[i], stride_cells[i][0][r]);
    }
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-level latent low-rank decomposition and infrared/visible image fusion", "mdlatlrr"};
    app.require_subcommand(1);

    TrainArgs train;
    CLI::App* t = app.add_subcommand("train", "Learn a projection matrix from a directory of images");
    t->add_option("--data", train.data, "Directory of grayscale training images")->required();
    t->add_option("--out", train.out, "Output projection file (.mdll)")->required();
    t->add_option("--patch-size", train.patch_size, "Patch side n")->capture_default_str();
    t->add_option("--stride", train.stride, "Window stride when pooling patches")->capture_default_str();
    t->add_option("--detail", train.detail, "Detail patches to sample")->capture_default_str();
    t->add_option("--smooth", train.smooth, "Smooth patches to sample")->capture_default_str();
    t->add_option("--threshold", train.threshold, "Patch SD threshold between smooth and detail")->capture_default_str();
    t->add_option("--lambda", train.lambda, "Sparse-error weight")->capture_default_str();
    t->add_option("--tol", train.tol, "Solver residual tolerance")->capture_default_str();
    t->add_option("--max-iters", train.max_iters, "Solver iteration cap")->capture_default_str();
    t->add_option("--seed", train.seed, "Sampling seed")->capture_default_str();

    DecomposeArgs dec;
    CLI::App* d = app.add_subcommand("decompose", "Split an image into detail levels and a base");
    d->add_option("--image", dec.image, "Input image")->required();
    d->add_option("--proj", dec.proj, "Projection file")->required();
    d->add_option("--out-dir", dec.out_dir, "Directory for detail_<i>.png and base.png")->required();
    d->add_option("--levels", dec.levels, "Decomposition levels r")->capture_default_str();
    d->add_option("--stride", dec.stride, "Window stride")->capture_default_str();
    d->add_flag("--raw", dec.raw, "Also write unclamped .raw dumps");

    FuseArgs fuse;
    CLI::App* f = app.add_subcommand("fuse", "Fuse a registered infrared/visible pair");
    f->add_option("--a", fuse.a, "First source image (infrared)")->required();
    f->add_option("--b", fuse.b, "Second source image (visible)")->required();
    f->add_option("--proj", fuse.proj, "Projection file")->required();
    f->add_option("--out", fuse.out, "Fused image (.png or .pgm)")->required();
    f->add_option("--levels", fuse.levels, "Decomposition levels r")->capture_default_str();
    f->add_option("--stride", fuse.stride, "Window stride")->capture_default_str();
    f->add_option("--norm", fuse.norm, "Detail weighting norm: nuclear or l1")->capture_default_str();
    f->add_option("--base-weights", fuse.base_weights, "Base weights w1 w2")->expected(2)->capture_default_str();
    f->add_option("--raw", fuse.raw, "Also write the unclamped result as a raw dump");

    EvalArgs ev;
    CLI::App* e = app.add_subcommand("eval", "Score fused images with the seven fusion metrics");
    e->add_option("--a", ev.a, "First source image");
    e->add_option("--b", ev.b, "Second source image");
    e->add_option("--fused", ev.fused, "Fused image");
    e->add_option("--id", ev.id, "Pair id for a single triple")->capture_default_str();
    e->add_option("--manifest", ev.manifest, "File of '<id> <src1> <src2> <fused>' lines");
    e->add_option("--format", ev.format, "json or csv")->capture_default_str();
    e->add_option("--out", ev.out, "Report file (default: stdout)");

    BenchArgs bench;
    CLI::App* b = app.add_subcommand("bench", "Level and stride sweeps over a dataset of pairs");
    b->add_option("--data", bench.data, "Directory of infrared/visible pairs")->required();
    b->add_option("--proj", bench.proj, "Projection file")->required();
    b->add_option("--sweep", bench.sweep, "levels, strides or all")->capture_default_str();
    b->add_option("--max-levels", bench.max_levels, "Deepest level of the level sweep")->capture_default_str();
    b->add_option("--strides", bench.strides, "Strides of the stride sweep")->delimiter(',')->capture_default_str();
    b->add_option("--stride-levels", bench.stride_levels, "Levels per stride")->capture_default_str();
    b->add_option("--stride-norm", bench.stride_norm, "Norm for the stride sweep")->capture_default_str();
    b->add_option("--max-pairs", bench.max_pairs, "Use only the first N pairs (0: all)")->capture_default_str();
    b->add_option("--format", bench.format, "json or csv")->capture_default_str();
    b->add_option("--out", bench.out, "Report file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*t) return cmd_train(train, out, err);
        if (*d) return cmd_decompose(dec, out);
        if (*f) return cmd_fuse(fuse, out);
        if (*e) return cmd_eval(ev, out);
        if (*b) return cmd_bench(bench, out, err);
    } catch (const ArgumentError& ex) {
        err << "error: " << ex.what() << '\n';
        return 2;
    } catch (const DataError& ex) {
        err << "error: " << ex.what() << '\n';
        return 3;
    } catch (const NumericalError& ex) {
        err << "error: " << ex.what() << '\n';
        return 4;
    } catch (const fs::filesystem_error& ex) {
        err << "error: " << ex.what() << '\n';
        return 3;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace mdlatlrr::app
