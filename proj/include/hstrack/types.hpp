#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hstrack {

// Thrown for missing/truncated/unwritable files and malformed headers.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown for invalid user-facing configuration (CLI flags, scene specs).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when the numerics collapse (degenerate target region,
// vanishing ridge denominator, non-real response).
struct DegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense row-major 2D array of doubles.
struct Mat2 {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Mat2() = default;
    Mat2(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }

    double* row_ptr(int r) { return v.data() + static_cast<std::size_t>(r) * cols; }
    const double* row_ptr(int r) const { return v.data() + static_cast<std::size_t>(r) * cols; }

    std::size_t size() const { return v.size(); }
};

// Axis-aligned box. 0-based pixel coordinates, x -> column, y -> row,
// top-left origin. The (real-valued) center is the quantity every
// distance metric in this library works with.
struct BoundingBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    double cx() const { return x + w / 2.0; }
    double cy() const { return y + h / 2.0; }

    // Integer center used for pixel-grid window placement (floored).
    int icx() const { return x + w / 2; }
    int icy() const { return y + h / 2; }

    bool operator==(const BoundingBox&) const = default;
};

} // namespace hstrack
