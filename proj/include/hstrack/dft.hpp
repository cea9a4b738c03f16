#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <fftw3.h>

#include "hstrack/types.hpp"

namespace hstrack {

// Complex 2D spectrum, row-major, same extent as the spatial signal.
struct Spectrum2D {
    int rows = 0;
    int cols = 0;
    std::vector<std::complex<double>> v;

    Spectrum2D() = default;
    Spectrum2D(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c) {}

    std::complex<double>& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    const std::complex<double>& at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }

    std::size_t size() const { return v.size(); }
};

namespace detail {

// Shared FFTW plan cache. Plans are created once per (rows, cols, sign) with
// FFTW_ESTIMATE (deterministic) | FFTW_UNALIGNED (valid for any buffer), then
// reused via the new-array execute interface, which is thread-safe. Only plan
// creation needs the lock.
class FftwPlans {
public:
    static FftwPlans& instance() {
        static FftwPlans p;
        return p;
    }

    fftw_plan get(int rows, int cols, int sign) {
        const auto key = std::make_tuple(rows, cols, sign);
        std::lock_guard<std::mutex> lock(mu_);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<std::complex<double>> scratch(static_cast<std::size_t>(rows) * std::max(cols, 1));
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan p = cols > 0
            ? fftw_plan_dft_2d(rows, cols, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
            : fftw_plan_dft_1d(rows, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw std::runtime_error("fftw plan creation failed");
        plans_.emplace(key, p);
        return p;
    }

    ~FftwPlans() {
        for (auto& [k, p] : plans_) fftw_destroy_plan(p);
    }

private:
    std::mutex mu_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

inline void dft2_inplace(std::complex<double>* data, int rows, int cols, int sign) {
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(FftwPlans::instance().get(rows, cols, sign), buf, buf);
}

inline void dft1_inplace(std::complex<double>* data, int n, int sign) {
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(FftwPlans::instance().get(n, 0, sign), buf, buf);
}

} // namespace detail

// Unnormalized forward 2D DFT.
inline Spectrum2D fft2(const double* data, int rows, int cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("fft2: dims must be >= 1");
    Spectrum2D s(rows, cols);
    for (std::size_t k = 0; k < s.size(); ++k) s.v[k] = data[k];
    detail::dft2_inplace(s.v.data(), rows, cols, FFTW_FORWARD);
    return s;
}

inline Spectrum2D fft2(const Mat2& m) { return fft2(m.v.data(), m.rows, m.cols); }

// 1/(HW)-normalized inverse; returns the real part. The largest |imaginary|
// component (after normalization) is reported through imag_residue when given.
inline Mat2 ifft2(const Spectrum2D& s, double* imag_residue = nullptr) {
    if (s.rows < 1 || s.cols < 1) throw std::invalid_argument("ifft2: dims must be >= 1");
    std::vector<std::complex<double>> buf(s.v);
    detail::dft2_inplace(buf.data(), s.rows, s.cols, FFTW_BACKWARD);
    const double scale = 1.0 / (static_cast<double>(s.rows) * s.cols);
    Mat2 out(s.rows, s.cols);
    double max_imag = 0.0;
    for (std::size_t k = 0; k < buf.size(); ++k) {
        out.v[k] = buf[k].real() * scale;
        max_imag = std::max(max_imag, std::abs(buf[k].imag()) * scale);
    }
    if (imag_residue) *imag_residue = max_imag;
    return out;
}

// Full complex inverse, for callers that need the imaginary part.
inline Spectrum2D ifft2_complex(const Spectrum2D& s) {
    Spectrum2D out(s.rows, s.cols);
    out.v = s.v;
    detail::dft2_inplace(out.v.data(), s.rows, s.cols, FFTW_BACKWARD);
    const double scale = 1.0 / (static_cast<double>(s.rows) * s.cols);
    for (auto& z : out.v) z *= scale;
    return out;
}

// C(x) * v where C(x) is the circulant matrix whose rows are successive
// cyclic shifts of x (row i, column j holds x[(j - i) mod n]); computed in
// the frequency domain.
inline std::vector<double> circulant_apply(const std::vector<double>& x, const std::vector<double>& v) {
    if (x.size() != v.size()) throw std::invalid_argument("circulant_apply: length mismatch");
    if (x.empty()) throw std::invalid_argument("circulant_apply: empty input");
    const int n = static_cast<int>(x.size());
    std::vector<std::complex<double>> xs(x.begin(), x.end());
    std::vector<std::complex<double>> vs(v.begin(), v.end());
    detail::dft1_inplace(xs.data(), n, FFTW_FORWARD);
    detail::dft1_inplace(vs.data(), n, FFTW_FORWARD);
    for (int k = 0; k < n; ++k) vs[k] *= std::conj(xs[k]);
    detail::dft1_inplace(vs.data(), n, FFTW_BACKWARD);
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) out[k] = vs[k].real() / n;
    return out;
}

// Regression target shape: y = b * exp(-(D / sigma1)^beta).
struct LabelParams {
    double sigma1 = 0.0; // spatial scale in pixels; tracker derives it from the target size
    double beta = 2.0;
    double b = 1.0;
};

// Label map with the peak at (0,0) and D the cyclic wrap-around Euclidean
// distance, aligned with the circulant shift structure: the detection
// displacement reads directly off the response argmax.
inline Mat2 gaussian_label(int h, int w, const LabelParams& p) {
    if (h < 1 || w < 1) throw std::invalid_argument("gaussian_label: dims must be >= 1");
    if (!(p.sigma1 > 0.0) || !(p.beta > 0.0) || !(p.b > 0.0)) {
        throw std::invalid_argument("gaussian_label: sigma1, beta, b must be > 0");
    }
    Mat2 out(h, w);
    for (int r = 0; r < h; ++r) {
        const int dy = std::min(r, h - r);
        for (int c = 0; c < w; ++c) {
            const int dx = std::min(c, w - c);
            const double dist = std::hypot(static_cast<double>(dy), static_cast<double>(dx));
            out.at(r, c) = p.b * std::exp(-std::pow(dist / p.sigma1, p.beta));
        }
    }
    return out;
}

} // namespace hstrack
