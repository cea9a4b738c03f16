#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include "hstrack/convfeat.hpp"
#include "hstrack/cube.hpp"
#include "hstrack/kcf.hpp"
#include "hstrack/types.hpp"

namespace hstrack {

struct TrackerConfig {
    int filter_w = 6;
    int filter_count = 10;
    double padding = 2.5; // search window scale relative to the target box
    std::uint64_t seed = 0;
    KcfParams kcf;
    // Permitted base-sample scale envelope relative to the initial target.
    // Tracking itself is single-scale; the bounds are validated and kept for
    // config compatibility.
    double search_scale_min = 0.2;
    double search_scale_max = 3.0;

    void validate() const {
        if (filter_w < 1) throw std::invalid_argument("TrackerConfig: filter_w must be >= 1");
        if (filter_count < 1) throw std::invalid_argument("TrackerConfig: filter_count must be >= 1");
        if (!(padding >= 1.0)) throw std::invalid_argument("TrackerConfig: padding must be >= 1");
        if (!(search_scale_min <= 1.0 && 1.0 <= search_scale_max)) {
            throw std::invalid_argument("TrackerConfig: search scale bounds must bracket 1");
        }
    }
};

// Separable Hann taper; corners 0, center ~1.
inline Mat2 hann_window(int h, int w) {
    auto axis = [](int n) {
        std::vector<double> v(n, 1.0);
        if (n > 1) {
            for (int i = 0; i < n; ++i) {
                v[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (n - 1)));
            }
        }
        return v;
    };
    const std::vector<double> wr = axis(h);
    const std::vector<double> wc = axis(w);
    Mat2 out(h, w);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) out.at(r, c) = wr[r] * wc[c];
    }
    return out;
}

struct TrackState {
    int frame_index = 0;
    BoundingBox box;       // w,h fixed from frame 1
    TrackerModel model;
    FilterBank bank;
    Mat2 cosine_window;    // matches the search window
    int win_w = 0;
    int win_h = 0;
    int frame_w = 0;
    int frame_h = 0;
    TrackerConfig config;
};

namespace detail {

inline void apply_window(FeatureStack& fs, const Mat2& win) {
    for (int ch = 0; ch < fs.channels; ++ch) {
        double* plane = fs.plane_ptr(ch);
        for (std::size_t k = 0; k < win.size(); ++k) plane[k] *= win.v[k];
    }
}

inline BoundingBox window_at(int icx, int icy, int win_w, int win_h) {
    return BoundingBox{icx - win_w / 2, icy - win_h / 2, win_w, win_h};
}

inline FeatureStack windowed_features(const HyperCube& frame, const TrackState& st, int icx, int icy) {
    const HyperCube patch = crop_window(frame, window_at(icx, icy, st.win_w, st.win_h));
    FeatureStack fs = extract_features(patch, st.bank);
    apply_window(fs, st.cosine_window);
    return fs;
}

} // namespace detail

// Samples the filter bank from the init box crop and trains the model on the
// padded search window centered there.
inline TrackState init(const HyperCube& first_frame, BoundingBox init_box, const TrackerConfig& config) {
    config.validate();
    if (init_box.w < 1 || init_box.h < 1) throw std::invalid_argument("init: empty box");
    if (init_box.w > first_frame.width || init_box.h > first_frame.height) {
        throw std::invalid_argument("init: box larger than frame");
    }
    if (init_box.w < config.filter_w || init_box.h < config.filter_w) {
        throw std::invalid_argument("init: box smaller than filter size " + std::to_string(config.filter_w));
    }
    init_box.x = std::clamp(init_box.x, 0, first_frame.width - init_box.w);
    init_box.y = std::clamp(init_box.y, 0, first_frame.height - init_box.h);

    TrackState st;
    st.config = config;
    st.frame_w = first_frame.width;
    st.frame_h = first_frame.height;
    st.box = init_box;
    st.win_w = std::max(config.filter_w, static_cast<int>(std::lround(init_box.w * config.padding)));
    st.win_h = std::max(config.filter_w, static_cast<int>(std::lround(init_box.h * config.padding)));
    st.cosine_window = hann_window(st.win_h, st.win_w);

    const HyperCube target = crop_window(first_frame, init_box);
    st.bank = sample_filter_bank(target, config.filter_w, config.filter_count, config.seed);

    if (st.config.kcf.label.sigma1 <= 0.0) {
        // Output-sigma convention: label scale from the target area.
        st.config.kcf.label.sigma1 = std::sqrt(static_cast<double>(init_box.w) * init_box.h) / 10.0;
    }

    FeatureStack feats = detail::windowed_features(first_frame, st, init_box.icx(), init_box.icy());
    st.model = train(std::move(feats), st.config.kcf);
    st.frame_index = 0;
    return st;
}

// One tracking step: detect around the previous center, move the box, then
// re-extract at the new center and blend the model. The optional response
// output receives the detection map (search-window sized).
inline std::pair<TrackState, BoundingBox> step(TrackState state, const HyperCube& frame,
                                               Mat2* response_out = nullptr) {
    if (frame.width != state.frame_w || frame.height != state.frame_h ||
        frame.bands != state.bank.bands) {
        throw std::invalid_argument("step: frame shape does not match sequence");
    }
    const int icx = state.box.icx();
    const int icy = state.box.icy();

    const FeatureStack feats = detail::windowed_features(frame, state, icx, icy);
    Detection det = detect(state.model, feats, state.config.kcf);
    if (response_out) *response_out = std::move(det.response);

    const int new_cx = std::clamp(icx + det.dx, 0, state.frame_w - 1);
    const int new_cy = std::clamp(icy + det.dy, 0, state.frame_h - 1);
    state.box.x = new_cx - state.box.w / 2;
    state.box.y = new_cy - state.box.h / 2;

    FeatureStack new_feats = detail::windowed_features(frame, state, new_cx, new_cy);
    state.model = update(state.model, std::move(new_feats), state.config.kcf);
    state.frame_index += 1;
    const BoundingBox out_box = state.box;
    return {std::move(state), out_box};
}

// Per-frame observer for the full run; response is empty for frame 0.
using FrameObserver = std::function<void(int frame, const BoundingBox& box, const Mat2& response)>;

// Full pipeline: init on frame 0, step on the rest. Output size equals
// frame_count; entry 0 is the (clamped) init box.
inline std::vector<BoundingBox> run(const std::function<HyperCube(int)>& frame_at, int frame_count,
                                    const BoundingBox& init_box, const TrackerConfig& config,
                                    const FrameObserver& observer = nullptr) {
    if (frame_count < 1) throw std::invalid_argument("run: frame_count must be >= 1");
    std::vector<BoundingBox> boxes;
    boxes.reserve(frame_count);
    TrackState st = init(frame_at(0), init_box, config);
    boxes.push_back(st.box);
    if (observer) observer(0, st.box, Mat2{});
    Mat2 response;
    for (int i = 1; i < frame_count; ++i) {
        auto [next, box] = step(std::move(st), frame_at(i), observer ? &response : nullptr);
        st = std::move(next);
        boxes.push_back(box);
        if (observer) observer(i, box, response);
    }
    return boxes;
}

} // namespace hstrack
