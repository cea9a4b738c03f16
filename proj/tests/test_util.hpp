#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "hstrack/convfeat.hpp"
#include "hstrack/cube.hpp"
#include "hstrack/detail/rng.hpp"
#include "hstrack/types.hpp"

namespace hstest {

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("hstrack_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::vector<unsigned char> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

inline hstrack::HyperCube random_cube(int h, int w, int d, std::uint64_t seed) {
    auto rng = hstrack::detail::make_rng(seed);
    hstrack::HyperCube cube(h, w, d);
    for (auto& v : cube.data) v = hstrack::detail::uniform01(rng);
    return cube;
}

inline hstrack::Mat2 random_mat(int h, int w, std::uint64_t seed) {
    auto rng = hstrack::detail::make_rng(seed);
    hstrack::Mat2 m(h, w);
    for (auto& v : m.v) v = 2.0 * hstrack::detail::uniform01(rng) - 1.0;
    return m;
}

inline hstrack::FeatureStack random_stack(int rows, int cols, int ch, std::uint64_t seed) {
    auto rng = hstrack::detail::make_rng(seed);
    hstrack::FeatureStack fs(rows, cols, ch);
    for (auto& v : fs.data) v = 2.0 * hstrack::detail::uniform01(rng) - 1.0;
    return fs;
}

// Content moved by (dy, dx): out(r, c) = in((r - dy) mod h, (c - dx) mod w).
inline hstrack::Mat2 cyclic_shift(const hstrack::Mat2& in, int dy, int dx) {
    hstrack::Mat2 out(in.rows, in.cols);
    for (int r = 0; r < in.rows; ++r) {
        for (int c = 0; c < in.cols; ++c) {
            const int sr = ((r - dy) % in.rows + in.rows) % in.rows;
            const int sc = ((c - dx) % in.cols + in.cols) % in.cols;
            out.at(r, c) = in.at(sr, sc);
        }
    }
    return out;
}

inline hstrack::FeatureStack cyclic_shift(const hstrack::FeatureStack& in, int dy, int dx) {
    hstrack::FeatureStack out(in.rows, in.cols, in.channels);
    for (int ch = 0; ch < in.channels; ++ch) {
        for (int r = 0; r < in.rows; ++r) {
            for (int c = 0; c < in.cols; ++c) {
                const int sr = ((r - dy) % in.rows + in.rows) % in.rows;
                const int sc = ((c - dx) % in.cols + in.cols) % in.cols;
                out.at(r, c, ch) = in.at(sr, sc, ch);
            }
        }
    }
    return out;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace hstest
