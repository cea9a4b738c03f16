#pragma once

#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "hstrack/types.hpp"

namespace hstrack {

// Euclidean distance between box centers, in pixels.
inline double center_error(const BoundingBox& pred, const BoundingBox& truth) {
    return std::hypot(pred.cx() - truth.cx(), pred.cy() - truth.cy());
}

struct PrecisionCurve {
    std::vector<double> thresholds;
    std::vector<double> precision; // fraction of frames within each threshold
    int n_frames = 0;
};

// 1..max_px step 1.
inline std::vector<double> default_thresholds(int max_px = 50) {
    std::vector<double> t(max_px);
    std::iota(t.begin(), t.end(), 1.0);
    return t;
}

// precision(t) = |{i : center_error(pred_i, truth_i) <= t}| / N.
inline PrecisionCurve precision_curve(const std::vector<BoundingBox>& preds,
                                      const std::vector<BoundingBox>& truths,
                                      std::vector<double> thresholds = default_thresholds()) {
    if (preds.size() != truths.size()) {
        throw std::invalid_argument("precision_curve: " + std::to_string(preds.size()) +
                                    " predictions vs " + std::to_string(truths.size()) + " truths");
    }
    if (preds.empty()) throw std::invalid_argument("precision_curve: empty input");
    std::vector<double> errors(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
        errors[i] = center_error(preds[i], truths[i]);
    }
    PrecisionCurve curve;
    curve.n_frames = static_cast<int>(preds.size());
    curve.thresholds = std::move(thresholds);
    curve.precision.reserve(curve.thresholds.size());
    for (double t : curve.thresholds) {
        std::size_t hits = 0;
        for (double e : errors) {
            if (e <= t) ++hits;
        }
        curve.precision.push_back(static_cast<double>(hits) / static_cast<double>(errors.size()));
    }
    return curve;
}

// Fraction of frames within a single threshold (the headline precision@20).
inline double precision_at(const std::vector<BoundingBox>& preds,
                           const std::vector<BoundingBox>& truths, double threshold) {
    if (preds.size() != truths.size() || preds.empty()) {
        throw std::invalid_argument("precision_at: prediction/truth lists must be equal and non-empty");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (center_error(preds[i], truths[i]) <= threshold) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(preds.size());
}

// Per-threshold arithmetic mean across sequences; grids must be identical.
inline PrecisionCurve mean_precision(const std::vector<PrecisionCurve>& curves) {
    if (curves.empty()) throw std::invalid_argument("mean_precision: no curves");
    const auto& grid = curves[0].thresholds;
    PrecisionCurve out;
    out.thresholds = grid;
    out.precision.assign(grid.size(), 0.0);
    out.n_frames = 0;
    for (const auto& c : curves) {
        if (c.thresholds != grid) throw std::invalid_argument("mean_precision: threshold grid mismatch");
        for (std::size_t k = 0; k < grid.size(); ++k) out.precision[k] += c.precision[k];
        out.n_frames += c.n_frames;
    }
    for (auto& p : out.precision) p /= static_cast<double>(curves.size());
    return out;
}

inline void write_curve_csv(const std::string& path, const PrecisionCurve& curve) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write precision curve: " + path);
    out << "threshold,precision\n";
    char buf[64];
    for (std::size_t k = 0; k < curve.thresholds.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%g,%.6f\n", curve.thresholds[k], curve.precision[k]);
        out << buf;
    }
    if (!out) throw IoError("write failed: " + path);
}

} // namespace hstrack
