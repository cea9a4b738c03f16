// Command-line front end: track / synth / eval subcommands over the sequence,
// scene and box-CSV file formats.

#include <bit>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hstrack/hstrack.hpp"

namespace {

using namespace hstrack;

BoundingBox parse_init_box(const std::string& s) {
    int vals[4];
    char extra;
    if (std::sscanf(s.c_str(), "%d,%d,%d,%d%c", &vals[0], &vals[1], &vals[2], &vals[3], &extra) != 4) {
        throw ConfigError("--init must be four integers x,y,w,h (got '" + s + "')");
    }
    return BoundingBox{vals[0], vals[1], vals[2], vals[3]};
}

void require_file(const std::string& path, const std::string& flag) {
    if (!std::filesystem::exists(path)) {
        throw IoError(flag + ": no such file: " + path);
    }
}

void apply_config_file(TrackerConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
        cfg.filter_count = j.value("filters", cfg.filter_count);
        cfg.filter_w = j.value("filter_size", cfg.filter_w);
        cfg.padding = j.value("padding", cfg.padding);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.kcf.sigma = j.value("sigma", cfg.kcf.sigma);
        cfg.kcf.lambda = j.value("lambda", cfg.kcf.lambda);
        cfg.kcf.interp_factor = j.value("interp", cfg.kcf.interp_factor);
        cfg.kcf.label.sigma1 = j.value("label_sigma", cfg.kcf.label.sigma1);
        cfg.kcf.label.beta = j.value("label_beta", cfg.kcf.label.beta);
        cfg.search_scale_min = j.value("search_scale_min", cfg.search_scale_min);
        cfg.search_scale_max = j.value("search_scale_max", cfg.search_scale_max);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void echo_config(const TrackerConfig& cfg, int band) {
    nlohmann::json j{
        {"filters", cfg.filter_count},
        {"filter_size", cfg.filter_w},
        {"padding", cfg.padding},
        {"seed", cfg.seed},
        {"sigma", cfg.kcf.sigma},
        {"lambda", cfg.kcf.lambda},
        {"interp", cfg.kcf.interp_factor},
        {"label_sigma", cfg.kcf.label.sigma1},
        {"label_beta", cfg.kcf.label.beta},
        {"band", band},
    };
    std::cerr << "[track] config " << j.dump() << "\n";
}

void write_response_dump(const std::string& dir, int frame, const Mat2& response) {
    char name[32];
    std::snprintf(name, sizeof(name), "response_%06d.f32", frame);
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write response dump: " + path.string());
    std::vector<unsigned char> buf(response.size() * 4);
    for (std::size_t k = 0; k < response.size(); ++k) {
        const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(response.v[k]));
        buf[4 * k] = static_cast<unsigned char>(bits);
        buf[4 * k + 1] = static_cast<unsigned char>(bits >> 8);
        buf[4 * k + 2] = static_cast<unsigned char>(bits >> 16);
        buf[4 * k + 3] = static_cast<unsigned char>(bits >> 24);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

struct TrackArgs {
    std::string seq;
    std::string init;
    std::string gt;
    std::string out;
    std::string config_file;
    std::string dump_dir;
    int filters = 0;
    int filter_size = 0;
    double padding = 0;
    double sigma = 0;
    double lambda = 0;
    double interp = 0;
    std::uint64_t seed = 0;
    int band = -1;
};

int cmd_track(const CLI::App& cmd, const TrackArgs& a) {
    require_file(a.seq, "--seq");
    SequenceReader reader(a.seq);

    BoundingBox init_box;
    if (cmd.count("--init")) {
        init_box = parse_init_box(a.init);
    } else if (cmd.count("--gt")) {
        require_file(a.gt, "--gt");
        const auto gt = read_boxes_csv(a.gt);
        if (gt.empty()) throw ConfigError("--gt: ground-truth file is empty");
        init_box = gt[0];
    } else {
        throw ConfigError("track: need --init x,y,w,h or --gt file");
    }

    TrackerConfig cfg;
    if (cmd.count("--config")) apply_config_file(cfg, a.config_file);
    if (cmd.count("--filters")) cfg.filter_count = a.filters;
    if (cmd.count("--filter-size")) cfg.filter_w = a.filter_size;
    if (cmd.count("--padding")) cfg.padding = a.padding;
    if (cmd.count("--sigma")) cfg.kcf.sigma = a.sigma;
    if (cmd.count("--lambda")) cfg.kcf.lambda = a.lambda;
    if (cmd.count("--interp")) cfg.kcf.interp_factor = a.interp;
    if (cmd.count("--seed")) cfg.seed = a.seed;

    int band = -1;
    if (cmd.count("--band")) {
        band = a.band;
        if (band < 0 || band >= reader.header().bands) {
            throw ConfigError("--band " + std::to_string(band) + " out of range [0, " +
                              std::to_string(reader.header().bands) + ")");
        }
    }
    echo_config(cfg, band);

    if (!a.dump_dir.empty()) std::filesystem::create_directories(a.dump_dir);

    auto frame_at = [&](int i) {
        HyperCube cube = reader.read_frame(i);
        return band >= 0 ? select_band(cube, band) : cube;
    };
    FrameObserver observer;
    if (!a.dump_dir.empty()) {
        observer = [&](int frame, const BoundingBox&, const Mat2& response) {
            if (frame > 0) write_response_dump(a.dump_dir, frame, response);
        };
    }

    const auto t0 = std::chrono::steady_clock::now();
    const auto boxes = run(frame_at, reader.frame_count(), init_box, cfg, observer);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "[track] %d frames in %.2f s (%.1f fps)\n", reader.frame_count(), secs,
                 reader.frame_count() / std::max(secs, 1e-9));

    write_boxes_csv(a.out, boxes);
    return 0;
}

int cmd_synth(const std::string& scene_path, const std::string& out_hdr, std::string truth_path) {
    require_file(scene_path, "--scene");
    const SceneSpec scene = load_scene(scene_path);
    if (truth_path.empty()) {
        auto p = std::filesystem::path(out_hdr);
        p.replace_extension("");
        truth_path = p.string() + "_gt.csv";
    }
    render(scene, out_hdr, truth_path);
    std::fprintf(stderr, "[synth] wrote %d frames (%dx%dx%d) to %s, truth to %s\n", scene.frames,
                 scene.width, scene.height, scene.bands, out_hdr.c_str(), truth_path.c_str());
    return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& gt_path, const std::string& out_path,
             int max_threshold, bool skip_first) {
    require_file(pred_path, "--pred");
    require_file(gt_path, "--gt");
    auto preds = read_boxes_csv(pred_path);
    auto truths = read_boxes_csv(gt_path);
    if (preds.size() != truths.size()) {
        throw ConfigError("eval: " + std::to_string(preds.size()) + " predictions vs " +
                          std::to_string(truths.size()) + " truth boxes");
    }
    if (skip_first) {
        if (preds.size() < 2) throw ConfigError("eval: nothing left after --skip-first");
        preds.erase(preds.begin());
        truths.erase(truths.begin());
    }
    const PrecisionCurve curve = precision_curve(preds, truths, default_thresholds(max_threshold));
    if (!out_path.empty()) write_curve_csv(out_path, curve);
    std::printf("precision@20=%.3f\n", precision_at(preds, truths, 20.0));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyperspectral correlation-filter tracking toolkit"};
    app.require_subcommand(1);

    TrackArgs ta;
    auto* track = app.add_subcommand("track", "run the tracker over a sequence");
    track->add_option("--seq", ta.seq, "sequence header file")->required();
    track->add_option("--init", ta.init, "initial box as x,y,w,h");
    track->add_option("--gt", ta.gt, "ground-truth CSV; frame 0 provides the initial box");
    track->add_option("--out", ta.out, "output box CSV")->required();
    track->add_option("--config", ta.config_file, "JSON config file (flags override it)");
    track->add_option("--filters", ta.filters, "number of convolution filters (default 10)");
    track->add_option("--filter-size", ta.filter_size, "filter spatial size (default 6)");
    track->add_option("--padding", ta.padding, "search window scale (default 2.5)");
    track->add_option("--sigma", ta.sigma, "Gaussian kernel bandwidth (default 0.5)");
    track->add_option("--lambda", ta.lambda, "ridge regularization (default 1e-4)");
    track->add_option("--interp", ta.interp, "model update rate (default 0.02)");
    track->add_option("--seed", ta.seed, "filter sampling seed (default 0)");
    track->add_option("--band", ta.band, "track on a single band (grayscale baseline)");
    track->add_option("--dump-responses", ta.dump_dir, "dump per-frame response maps (f32le) here");

    std::string scene_path, synth_out, synth_truth;
    auto* synth = app.add_subcommand("synth", "render a synthetic scene to a sequence + ground truth");
    synth->add_option("--scene", scene_path, "scene config (JSON)")->required();
    synth->add_option("--out", synth_out, "output sequence header path")->required();
    synth->add_option("--truth", synth_truth, "output ground-truth CSV (default <out>_gt.csv)");

    std::string pred_path, eval_gt, eval_out;
    int max_threshold = 50;
    bool skip_first = false;
    auto* eval = app.add_subcommand("eval", "precision curve from prediction and truth CSVs");
    eval->add_option("--pred", pred_path, "predicted boxes CSV")->required();
    eval->add_option("--gt", eval_gt, "ground-truth boxes CSV")->required();
    eval->add_option("--out", eval_out, "output curve CSV (threshold,precision)");
    eval->add_option("--thresholds", max_threshold, "largest threshold in px (grid 1..MAX, default 50)");
    eval->add_flag("--skip-first", skip_first, "exclude the initialization frame");

    try {
        app.parse(argc, argv);
        if (track->parsed()) return cmd_track(*track, ta);
        if (synth->parsed()) return cmd_synth(scene_path, synth_out, synth_truth);
        if (eval->parsed()) return cmd_eval(pred_path, eval_gt, eval_out, max_threshold, skip_first);
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const hstrack::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 2;
    } catch (const hstrack::DegeneracyError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    } catch (const hstrack::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
