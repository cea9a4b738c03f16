#pragma once

// Independent reference implementations used by the unit and acceptance
// suites. Everything here works by direct summation or dense linear algebra;
// nothing goes through the FFT paths it is checking.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hstrack/convfeat.hpp"
#include "hstrack/cube.hpp"
#include "hstrack/dft.hpp"
#include "hstrack/types.hpp"

namespace hstest {

// Dense circulant product: C(x) rows are successive cyclic shifts of x,
// C[i][j] = x[(j - i) mod n].
inline std::vector<double> circulant_apply_dense(const std::vector<double>& x,
                                                 const std::vector<double>& v) {
    const int n = static_cast<int>(x.size());
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            out[i] += x[((j - i) % n + n) % n] * v[j];
        }
    }
    return out;
}

// Triple-loop 3D convolution with edge-replicated window borders.
inline hstrack::Mat2 convolve3d_direct(const hstrack::HyperCube& win, const hstrack::HyperCube& filt) {
    const int H = win.height, W = win.width;
    const int off_r = filt.height / 2, off_c = filt.width / 2;
    hstrack::Mat2 out(H, W);
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            double acc = 0.0;
            for (int i = 0; i < filt.height; ++i) {
                for (int j = 0; j < filt.width; ++j) {
                    const int sr = std::clamp(r + i - off_r, 0, H - 1);
                    const int sc = std::clamp(c + j - off_c, 0, W - 1);
                    for (int b = 0; b < filt.bands; ++b) {
                        acc += win.at(sr, sc, b) * filt.at(i, j, b);
                    }
                }
            }
            out.at(r, c) = acc;
        }
    }
    return out;
}

// All-shifts Gaussian kernel: k(tau) = exp(-max(0, |x|^2 + |z|^2
// - 2*sum_{s,d} x_d(s) z_d(s+tau)) / sigma^2).
inline hstrack::Mat2 kernel_correlation_direct(const hstrack::FeatureStack& x,
                                               const hstrack::FeatureStack& z, double sigma) {
    double xx = 0.0, zz = 0.0;
    for (double v : x.data) xx += v * v;
    for (double v : z.data) zz += v * v;
    hstrack::Mat2 out(x.rows, x.cols);
    for (int dy = 0; dy < x.rows; ++dy) {
        for (int dx = 0; dx < x.cols; ++dx) {
            double corr = 0.0;
            for (int ch = 0; ch < x.channels; ++ch) {
                for (int r = 0; r < x.rows; ++r) {
                    const int zr = (r + dy) % x.rows;
                    for (int c = 0; c < x.cols; ++c) {
                        corr += x.at(r, c, ch) * z.at(zr, (c + dx) % x.cols, ch);
                    }
                }
            }
            const double d = std::max(0.0, xx + zz - 2.0 * corr);
            out.at(dy, dx) = std::exp(-d / (sigma * sigma));
        }
    }
    return out;
}

// Gaussian elimination with partial pivoting; A is n x n row-major.
inline std::vector<double> solve_dense(std::vector<double> A, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(A[r * n + col]) > std::abs(A[pivot * n + col])) pivot = r;
        }
        if (std::abs(A[pivot * n + col]) < 1e-14) throw std::runtime_error("solve_dense: singular matrix");
        if (pivot != col) {
            for (int c = 0; c < n; ++c) std::swap(A[col * n + c], A[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = A[r * n + col] / A[col * n + col];
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < n; ++c) acc -= A[r * n + c] * x[c];
        x[r] = acc / A[r * n + r];
    }
    return x;
}

// Dense ridge-regression dual solve over all cyclic shifts of the base
// sample: K[i][j] = exp(-|s_i - s_j|^2 / sigma^2) with s_i the base features
// content-moved by (i / cols, i % cols); returns alpha in the same shift
// order. Multichannel stacks shift every channel together.
inline std::vector<double> train_alpha_dense(const hstrack::FeatureStack& x, double sigma,
                                             double lambda, const hstrack::Mat2& label) {
    const int rows = x.rows, cols = x.cols;
    const int n = rows * cols;
    // samples[i] = x content-moved by tau_i, flattened
    std::vector<std::vector<double>> samples(n);
    for (int i = 0; i < n; ++i) {
        const int dy = i / cols, dx = i % cols;
        auto& s = samples[i];
        s.reserve(x.size());
        for (int ch = 0; ch < x.channels; ++ch) {
            for (int r = 0; r < rows; ++r) {
                for (int c = 0; c < cols; ++c) {
                    const int sr = ((r - dy) % rows + rows) % rows;
                    const int sc = ((c - dx) % cols + cols) % cols;
                    s.push_back(x.at(sr, sc, ch));
                }
            }
        }
    }
    std::vector<double> K(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double dist = 0.0;
            for (std::size_t k = 0; k < samples[i].size(); ++k) {
                const double d = samples[i][k] - samples[j][k];
                dist += d * d;
            }
            K[static_cast<std::size_t>(i) * n + j] = std::exp(-dist / (sigma * sigma));
        }
    }
    for (int i = 0; i < n; ++i) K[static_cast<std::size_t>(i) * n + i] += lambda;
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) y[i] = label.at(i / cols, i % cols);
    return solve_dense(std::move(K), std::move(y));
}

// Direct cyclic 2D convolution (for the convolution-theorem check).
inline hstrack::Mat2 cyclic_convolve_direct(const hstrack::Mat2& a, const hstrack::Mat2& b) {
    hstrack::Mat2 out(a.rows, a.cols);
    for (int r = 0; r < a.rows; ++r) {
        for (int c = 0; c < a.cols; ++c) {
            double acc = 0.0;
            for (int i = 0; i < a.rows; ++i) {
                for (int j = 0; j < a.cols; ++j) {
                    acc += a.at(i, j) * b.at(((r - i) % a.rows + a.rows) % a.rows,
                                             ((c - j) % a.cols + a.cols) % a.cols);
                }
            }
            out.at(r, c) = acc;
        }
    }
    return out;
}

} // namespace hstest
