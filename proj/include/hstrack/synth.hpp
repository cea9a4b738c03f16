#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hstrack/cube.hpp"
#include "hstrack/cube_io.hpp"
#include "hstrack/detail/rng.hpp"
#include "hstrack/types.hpp"

namespace hstrack {

// Object motion: either start+velocity (optionally reflecting at the frame
// border) or an explicit per-frame list of centers.
struct PathSpec {
    enum class Kind { linear, bounce, points };
    Kind kind = Kind::linear;
    int x0 = 0, y0 = 0;
    int vx = 0, vy = 0;
    std::vector<std::pair<int, int>> points;
};

struct ObjectSpec {
    enum class Shape { rect, disk };
    Shape shape = Shape::rect;
    int w = 0, h = 0; // rect extent
    int radius = 0;   // disk radius; painted extent is (2r+1) square
    std::vector<double> spectrum;
    PathSpec path;

    int extent_w() const { return shape == Shape::rect ? w : 2 * radius + 1; }
    int extent_h() const { return shape == Shape::rect ? h : 2 * radius + 1; }
};

struct SceneSpec {
    int width = 0;
    int height = 0;
    int bands = 0;
    int frames = 0;
    std::vector<double> background;
    std::vector<ObjectSpec> objects;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

namespace detail {

inline void check_spectrum(const std::vector<double>& s, int bands, const std::string& what) {
    if (static_cast<int>(s.size()) != bands) {
        throw ConfigError(what + ": spectrum must have " + std::to_string(bands) + " values");
    }
    for (double v : s) {
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(what + ": spectrum values must be in [0,1]");
    }
}

// Top-left corner of the painted extent for an object centered at (cx, cy).
inline BoundingBox object_box(const ObjectSpec& o, int cx, int cy) {
    const int w = o.extent_w();
    const int h = o.extent_h();
    return BoundingBox{cx - w / 2, cy - h / 2, w, h};
}

// Per-frame centers, with bounds checking (the painted extent must stay
// inside the frame on every frame).
inline std::vector<std::pair<int, int>> resolve_path(const SceneSpec& scene, const ObjectSpec& o,
                                                     std::size_t obj_index) {
    std::vector<std::pair<int, int>> centers;
    centers.reserve(scene.frames);
    const auto& p = o.path;
    if (p.kind == PathSpec::Kind::points) {
        if (static_cast<int>(p.points.size()) < scene.frames) {
            throw ConfigError("object " + std::to_string(obj_index) + ": path has " +
                              std::to_string(p.points.size()) + " points for " +
                              std::to_string(scene.frames) + " frames");
        }
        centers.assign(p.points.begin(), p.points.begin() + scene.frames);
    } else {
        int x = p.x0, y = p.y0, vx = p.vx, vy = p.vy;
        const int w = o.extent_w(), h = o.extent_h();
        const int cx_lo = w / 2, cx_hi = scene.width - w + w / 2;
        const int cy_lo = h / 2, cy_hi = scene.height - h + h / 2;
        for (int t = 0; t < scene.frames; ++t) {
            centers.emplace_back(x, y);
            if (p.kind == PathSpec::Kind::bounce) {
                int nx = x + vx;
                if (nx < cx_lo || nx > cx_hi) { vx = -vx; nx = x + vx; }
                int ny = y + vy;
                if (ny < cy_lo || ny > cy_hi) { vy = -vy; ny = y + vy; }
                x = nx;
                y = ny;
            } else {
                x += vx;
                y += vy;
            }
        }
    }
    for (int t = 0; t < scene.frames; ++t) {
        const BoundingBox b = object_box(o, centers[t].first, centers[t].second);
        if (b.x < 0 || b.y < 0 || b.x + b.w > scene.width || b.y + b.h > scene.height) {
            throw ConfigError("object " + std::to_string(obj_index) + ": path out of bounds at frame " +
                              std::to_string(t));
        }
    }
    return centers;
}

inline void paint_object(HyperCube& frame, const ObjectSpec& o, int cx, int cy) {
    const BoundingBox b = object_box(o, cx, cy);
    for (int bidx = 0; bidx < frame.bands; ++bidx) {
        const double val = o.spectrum[bidx];
        for (int r = b.y; r < b.y + b.h; ++r) {
            for (int c = b.x; c < b.x + b.w; ++c) {
                if (o.shape == ObjectSpec::Shape::disk) {
                    const long dx = c - cx, dy = r - cy;
                    if (dx * dx + dy * dy > static_cast<long>(o.radius) * o.radius) continue;
                }
                frame.at(r, c, bidx) = val;
            }
        }
    }
}

} // namespace detail

inline void validate_scene(const SceneSpec& scene) {
    if (scene.width < 1 || scene.height < 1) throw ConfigError("scene: width/height must be >= 1");
    if (scene.bands < 1) throw ConfigError("scene: bands must be >= 1");
    if (scene.frames < 1) throw ConfigError("scene: frames must be >= 1");
    if (!(scene.noise_sigma >= 0.0)) throw ConfigError("scene: noise_sigma must be >= 0");
    detail::check_spectrum(scene.background, scene.bands, "background");
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        const auto& o = scene.objects[i];
        const std::string what = "object " + std::to_string(i);
        detail::check_spectrum(o.spectrum, scene.bands, what);
        if (o.shape == ObjectSpec::Shape::rect) {
            if (o.w < 1 || o.h < 1) throw ConfigError(what + ": rect size must be >= 1");
        } else if (o.radius < 0) {
            throw ConfigError(what + ": disk radius must be >= 0");
        }
    }
}

// Renders frame t: background, then objects in list order (later occludes
// earlier), then seeded i.i.d. Gaussian noise, clamped to [0,1]. The noise
// substream depends only on (seed, t), so frames render independently.
inline HyperCube render_frame(const SceneSpec& scene, int t,
                              const std::vector<std::vector<std::pair<int, int>>>& centers) {
    HyperCube frame(scene.height, scene.width, scene.bands);
    for (int b = 0; b < scene.bands; ++b) {
        double* plane = frame.band_ptr(b);
        std::fill(plane, plane + frame.size() / scene.bands, scene.background[b]);
    }
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        detail::paint_object(frame, scene.objects[i], centers[i][t].first, centers[i][t].second);
    }
    if (scene.noise_sigma > 0.0) {
        auto rng = detail::make_rng(scene.seed, static_cast<std::uint64_t>(t) + 1);
        for (auto& v : frame.data) {
            v = std::clamp(v + scene.noise_sigma * detail::gaussian(rng), 0.0, 1.0);
        }
    }
    return frame;
}

// In-memory render: frames plus the first object's box per frame.
inline std::pair<std::vector<HyperCube>, std::vector<BoundingBox>> render_scene(const SceneSpec& scene) {
    validate_scene(scene);
    std::vector<std::vector<std::pair<int, int>>> centers;
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        centers.push_back(detail::resolve_path(scene, scene.objects[i], i));
    }
    std::vector<HyperCube> frames;
    std::vector<BoundingBox> truth;
    frames.reserve(scene.frames);
    for (int t = 0; t < scene.frames; ++t) {
        frames.push_back(render_frame(scene, t, centers));
        if (!scene.objects.empty()) {
            truth.push_back(detail::object_box(scene.objects[0], centers[0][t].first, centers[0][t].second));
        }
    }
    return {std::move(frames), std::move(truth)};
}

// File render: sequence (f32le) + ground-truth CSV for the first object.
inline void render(const SceneSpec& scene, const std::string& header_path, const std::string& truth_csv_path) {
    validate_scene(scene);
    std::vector<std::vector<std::pair<int, int>>> centers;
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        centers.push_back(detail::resolve_path(scene, scene.objects[i], i));
    }
    SequenceHeader h;
    h.width = scene.width;
    h.height = scene.height;
    h.bands = scene.bands;
    h.frame_count = scene.frames;
    h.dtype = Dtype::f32le;
    SequenceWriter writer(header_path, h);
    std::vector<BoundingBox> truth;
    for (int t = 0; t < scene.frames; ++t) {
        writer.write_frame(render_frame(scene, t, centers));
        if (!scene.objects.empty()) {
            truth.push_back(detail::object_box(scene.objects[0], centers[0][t].first, centers[0][t].second));
        }
    }
    writer.close();
    if (!scene.objects.empty()) write_boxes_csv(truth_csv_path, truth);
}

struct MetamerPair {
    std::vector<double> a;
    std::vector<double> b;
    // Band where both spectra agree (the grayscale-baseline band); -1 when
    // bands == 2, where only the means agree.
    int gray_band = -1;
};

// Two distinct spectra with identical band means whose difference has
// max-norm >= 0.3. For bands >= 3 one band (index bands/2) carries the common
// value band_mean on both. The +/- band assignment is shuffled by seed.
inline MetamerPair make_metamer_pair(int bands, double band_mean, std::uint64_t seed) {
    if (bands < 2) throw ConfigError("make_metamer_pair: bands must be >= 2");
    if (!(band_mean > 0.0 && band_mean < 1.0)) {
        throw ConfigError("make_metamer_pair: band_mean must be in (0,1)");
    }
    const double delta = std::min({0.3, band_mean, 1.0 - band_mean});
    if (2.0 * delta < 0.3) {
        throw ConfigError("make_metamer_pair: band_mean too close to 0/1 for 0.3 separation");
    }
    MetamerPair out;
    out.a.assign(bands, band_mean);
    out.b.assign(bands, band_mean);

    std::vector<int> free_bands;
    if (bands >= 3) {
        out.gray_band = bands / 2;
        for (int i = 0; i < bands; ++i) {
            if (i != out.gray_band) free_bands.push_back(i);
        }
    } else {
        for (int i = 0; i < bands; ++i) free_bands.push_back(i);
    }
    // Equal numbers of +delta and -delta bands keep the means identical; any
    // leftover band stays at the mean.
    std::vector<int> signs(free_bands.size(), 0);
    const std::size_t pairs = free_bands.size() / 2;
    for (std::size_t i = 0; i < pairs; ++i) {
        signs[2 * i] = 1;
        signs[2 * i + 1] = -1;
    }
    auto rng = detail::make_rng(seed, 0x6d657461u);
    detail::shuffle(signs, rng);
    for (std::size_t i = 0; i < free_bands.size(); ++i) {
        out.a[free_bands[i]] = band_mean + signs[i] * delta;
        out.b[free_bands[i]] = band_mean - signs[i] * delta;
    }
    return out;
}

// --- scene config file (JSON) ---------------------------------------------
//
// {
//   "width": 64, "height": 64, "bands": 8, "frames": 100,
//   "noise_sigma": 0.01, "seed": 7,
//   "background": [0.1, ...],
//   "objects": [
//     {"shape": "disk", "radius": 5, "spectrum": [...],
//      "path": {"kind": "bounce", "start": [12, 32], "velocity": [2, 0]}},
//     {"shape": "rect", "size": [10, 8], "spectrum": [...],
//      "path": {"kind": "points", "points": [[x, y], ...]}}
//   ]
// }

inline SceneSpec parse_scene_json(const nlohmann::json& j) {
    try {
        SceneSpec s;
        s.width = j.at("width").get<int>();
        s.height = j.at("height").get<int>();
        s.bands = j.at("bands").get<int>();
        s.frames = j.at("frames").get<int>();
        s.noise_sigma = j.value("noise_sigma", 0.0);
        s.seed = j.value("seed", 0ull);
        s.background = j.at("background").get<std::vector<double>>();
        for (const auto& jo : j.value("objects", nlohmann::json::array())) {
            ObjectSpec o;
            const std::string shape = jo.at("shape").get<std::string>();
            if (shape == "rect") {
                o.shape = ObjectSpec::Shape::rect;
                const auto size = jo.at("size").get<std::vector<int>>();
                if (size.size() != 2) throw ConfigError("object size must be [w, h]");
                o.w = size[0];
                o.h = size[1];
            } else if (shape == "disk") {
                o.shape = ObjectSpec::Shape::disk;
                o.radius = jo.at("radius").get<int>();
            } else {
                throw ConfigError("unknown object shape '" + shape + "'");
            }
            o.spectrum = jo.at("spectrum").get<std::vector<double>>();
            const auto& jp = jo.at("path");
            const std::string kind = jp.value("kind", jp.contains("points") ? "points" : "linear");
            if (kind == "points") {
                o.path.kind = PathSpec::Kind::points;
                for (const auto& pt : jp.at("points")) {
                    const auto v = pt.get<std::vector<int>>();
                    if (v.size() != 2) throw ConfigError("path points must be [x, y]");
                    o.path.points.emplace_back(v[0], v[1]);
                }
            } else {
                o.path.kind = kind == "bounce" ? PathSpec::Kind::bounce : PathSpec::Kind::linear;
                if (kind != "bounce" && kind != "linear") {
                    throw ConfigError("unknown path kind '" + kind + "'");
                }
                const auto start = jp.at("start").get<std::vector<int>>();
                const auto vel = jp.value("velocity", std::vector<int>{0, 0});
                if (start.size() != 2 || vel.size() != 2) {
                    throw ConfigError("path start/velocity must be [x, y]");
                }
                o.path.x0 = start[0];
                o.path.y0 = start[1];
                o.path.vx = vel[0];
                o.path.vy = vel[1];
            }
            s.objects.push_back(std::move(o));
        }
        validate_scene(s);
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scene config: ") + e.what());
    }
}

inline SceneSpec load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scene config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_scene_json(j);
}

} // namespace hstrack
