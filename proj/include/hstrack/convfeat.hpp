#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "hstrack/cube.hpp"
#include "hstrack/detail/rng.hpp"
#include "hstrack/types.hpp"

namespace hstrack {

// Filter responses are computed without the kernel flip, i.e. as
// cross-correlation; with randomly sampled filters the two are statistically
// interchangeable. Kept as a named constant so the choice is auditable.
inline constexpr bool kFlipFilterKernel = false;

// d' fixed convolution kernels sampled from the first-frame target region.
// Every filter is w x w x bands, zero-mean, unit L2 norm.
struct FilterBank {
    int w = 0;
    int bands = 0;
    std::uint64_t seed = 0;
    std::vector<HyperCube> filters;

    int count() const { return static_cast<int>(filters.size()); }
};

// Multichannel feature image: one plane per filter, same spatial size as the
// input window. Layout: data[(ch*rows + r)*cols + c].
struct FeatureStack {
    int rows = 0;
    int cols = 0;
    int channels = 0;
    std::vector<double> data;

    FeatureStack() = default;
    FeatureStack(int r, int c, int ch)
        : rows(r), cols(c), channels(ch),
          data(static_cast<std::size_t>(r) * c * ch, 0.0) {}

    double& at(int r, int c, int ch) {
        return data[(static_cast<std::size_t>(ch) * rows + r) * cols + c];
    }
    double at(int r, int c, int ch) const {
        return data[(static_cast<std::size_t>(ch) * rows + r) * cols + c];
    }

    double* plane_ptr(int ch) {
        return data.data() + static_cast<std::size_t>(ch) * rows * cols;
    }
    const double* plane_ptr(int ch) const {
        return data.data() + static_cast<std::size_t>(ch) * rows * cols;
    }

    std::size_t size() const { return data.size(); }
    std::size_t plane_size() const { return static_cast<std::size_t>(rows) * cols; }

    bool operator==(const FeatureStack&) const = default;
};

// Draws `count` patches uniformly without replacement from all fully interior
// w x w sliding-window positions of the target cube, then normalizes each to
// zero mean and unit L2 norm. Constant (zero-variance) patches are rejected
// and redrawn from the remaining positions.
inline FilterBank sample_filter_bank(const HyperCube& target, int w, int count, std::uint64_t seed) {
    if (w < 1 || count < 1) throw std::invalid_argument("sample_filter_bank: w and count must be >= 1");
    if (target.height < w || target.width < w) {
        throw std::invalid_argument("sample_filter_bank: target " + std::to_string(target.width) + "x" +
                                    std::to_string(target.height) + " smaller than filter size " +
                                    std::to_string(w));
    }
    const int pos_h = target.height - w + 1;
    const int pos_w = target.width - w + 1;
    const std::size_t n_positions = static_cast<std::size_t>(pos_h) * pos_w;
    if (static_cast<std::size_t>(count) > n_positions) {
        throw std::invalid_argument("sample_filter_bank: " + std::to_string(count) + " filters requested but only " +
                                    std::to_string(n_positions) + " candidate positions");
    }

    std::vector<std::uint32_t> order(n_positions);
    std::iota(order.begin(), order.end(), 0u);
    auto rng = detail::make_rng(seed);
    detail::shuffle(order, rng);

    FilterBank bank;
    bank.w = w;
    bank.bands = target.bands;
    bank.seed = seed;
    bank.filters.reserve(count);

    const std::size_t numel = static_cast<std::size_t>(w) * w * target.bands;
    for (std::uint32_t idx : order) {
        if (bank.count() == count) break;
        const int r0 = static_cast<int>(idx) / pos_w;
        const int c0 = static_cast<int>(idx) % pos_w;
        HyperCube f = crop_window(target, BoundingBox{c0, r0, w, w});
        const double mean = std::accumulate(f.data.begin(), f.data.end(), 0.0) / static_cast<double>(numel);
        double norm_sq = 0.0;
        for (auto& v : f.data) {
            v -= mean;
            norm_sq += v * v;
        }
        if (norm_sq < 1e-24) continue; // constant patch, no structure to match
        const double inv_norm = 1.0 / std::sqrt(norm_sq);
        for (auto& v : f.data) v *= inv_norm;
        bank.filters.push_back(std::move(f));
    }
    if (bank.count() < count) {
        throw DegeneracyError("degenerate target region: only " + std::to_string(bank.count()) +
                              " of " + std::to_string(count) + " candidate patches have nonzero variance");
    }
    return bank;
}

namespace detail {

// Same-size response with edge-replicated window borders, accumulated into
// `out` (size rows*cols, pre-zeroed).
inline void convolve3d_into(const HyperCube& window, const HyperCube& filter, double* out) {
    static_assert(!kFlipFilterKernel, "filter taps are applied unflipped");
    if (window.bands != filter.bands) {
        throw std::invalid_argument("convolve3d: window has " + std::to_string(window.bands) +
                                    " bands, filter has " + std::to_string(filter.bands));
    }
    const int H = window.height, W = window.width;
    const int fh = filter.height, fw = filter.width;
    const int off_r = fh / 2, off_c = fw / 2;
    for (int b = 0; b < window.bands; ++b) {
        const double* plane = window.band_ptr(b);
        for (int i = 0; i < fh; ++i) {
            for (int j = 0; j < fw; ++j) {
                const double wgt = filter.at(i, j, b);
                if (wgt == 0.0) continue;
                const int shift = j - off_c;
                for (int r = 0; r < H; ++r) {
                    const int sr = std::clamp(r + i - off_r, 0, H - 1);
                    const double* src = plane + static_cast<std::size_t>(sr) * W;
                    double* dst = out + static_cast<std::size_t>(r) * W;
                    int c = 0;
                    const int left = std::min(W, std::max(0, -shift));
                    for (; c < left; ++c) dst[c] += wgt * src[0];
                    const int right = std::clamp(W - shift, 0, W);
                    for (; c < right; ++c) dst[c] += wgt * src[c + shift];
                    for (; c < W; ++c) dst[c] += wgt * src[W - 1];
                }
            }
        }
    }
}

} // namespace detail

// Spectral-spatial response: out(r,c) = sum_{i,j,b} window(r+i-floor(fh/2),
// c+j-floor(fw/2), b) * filter(i,j,b), window indices clamped to the border.
// All bands collapse to a single plane.
inline Mat2 convolve3d(const HyperCube& window, const HyperCube& filter) {
    Mat2 out(window.height, window.width);
    detail::convolve3d_into(window, filter, out.v.data());
    return out;
}

// Channel j of the result is convolve3d(window, bank.filters[j]).
inline FeatureStack extract_features(const HyperCube& window, const FilterBank& bank) {
    FeatureStack fs(window.height, window.width, bank.count());
    for (int j = 0; j < bank.count(); ++j) {
        detail::convolve3d_into(window, bank.filters[j], fs.plane_ptr(j));
    }
    return fs;
}

// Bank file: one ASCII line "w,D,d',seed" then the filters as f32le, each in
// cube order (band plane, then row, then column). Enables exact re-runs.
inline void save_filter_bank(const std::string& path, const FilterBank& bank) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write filter bank: " + path);
    out << bank.w << "," << bank.bands << "," << bank.count() << "," << bank.seed << "\n";
    std::vector<unsigned char> buf;
    for (const auto& f : bank.filters) {
        buf.resize(f.size() * 4);
        for (std::size_t k = 0; k < f.size(); ++k) {
            const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(f.data[k]));
            buf[4 * k] = static_cast<unsigned char>(bits);
            buf[4 * k + 1] = static_cast<unsigned char>(bits >> 8);
            buf[4 * k + 2] = static_cast<unsigned char>(bits >> 16);
            buf[4 * k + 3] = static_cast<unsigned char>(bits >> 24);
        }
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    }
    if (!out) throw IoError("write failed: " + path);
}

inline FilterBank load_filter_bank(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open filter bank: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": missing header line");
    FilterBank bank;
    int count = 0;
    {
        std::stringstream ss(line);
        std::string tok;
        long vals[4];
        for (int k = 0; k < 4; ++k) {
            if (!std::getline(ss, tok, ',')) throw IoError(path + ": header line must be w,D,d',seed");
            try {
                vals[k] = std::stol(tok);
            } catch (const std::exception&) {
                throw IoError(path + ": bad header value '" + tok + "'");
            }
        }
        bank.w = static_cast<int>(vals[0]);
        bank.bands = static_cast<int>(vals[1]);
        count = static_cast<int>(vals[2]);
        bank.seed = static_cast<std::uint64_t>(vals[3]);
    }
    if (bank.w < 1 || bank.bands < 1 || count < 1) throw IoError(path + ": bad bank dimensions");
    const std::size_t numel = static_cast<std::size_t>(bank.w) * bank.w * bank.bands;
    std::vector<unsigned char> buf(numel * 4);
    for (int j = 0; j < count; ++j) {
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
            throw IoError(path + ": truncated filter payload");
        }
        HyperCube f(bank.w, bank.w, bank.bands);
        for (std::size_t k = 0; k < numel; ++k) {
            const std::uint32_t bits = static_cast<std::uint32_t>(buf[4 * k]) |
                                       (static_cast<std::uint32_t>(buf[4 * k + 1]) << 8) |
                                       (static_cast<std::uint32_t>(buf[4 * k + 2]) << 16) |
                                       (static_cast<std::uint32_t>(buf[4 * k + 3]) << 24);
            f.data[k] = static_cast<double>(std::bit_cast<float>(bits));
        }
        bank.filters.push_back(std::move(f));
    }
    return bank;
}

} // namespace hstrack
