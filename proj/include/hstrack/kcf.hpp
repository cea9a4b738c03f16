#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

#include "hstrack/convfeat.hpp"
#include "hstrack/dft.hpp"
#include "hstrack/types.hpp"

namespace hstrack {

struct KcfParams {
    double lambda = 1e-4;       // ridge regularization
    double sigma = 0.5;         // Gaussian kernel bandwidth, element-count normalized
    double interp_factor = 0.02; // model update rate in [0,1]
    LabelParams label;

    void validate() const {
        if (!(lambda > 0.0)) throw std::invalid_argument("KcfParams: lambda must be > 0");
        if (!(sigma > 0.0)) throw std::invalid_argument("KcfParams: sigma must be > 0");
        if (interp_factor < 0.0 || interp_factor > 1.0) {
            throw std::invalid_argument("KcfParams: interp_factor must be in [0,1]");
        }
    }
};

// Learned frequency-domain state: appearance x and dual coefficients alpha.
struct TrackerModel {
    FeatureStack model_x;
    Spectrum2D alpha_hat;
    Spectrum2D label_hat; // cached DFT of the regression target
    int rows = 0;
    int cols = 0;
};

namespace detail {

inline double stack_norm_sq(const FeatureStack& x) {
    double s = 0.0;
    for (double v : x.data) s += v * v;
    return s;
}

// sum_d conj(FFT(x_d)) .* FFT(z_d); the conjugate sits on the reference
// argument so that the correlation peak lands at the displacement of z's
// content relative to x.
inline Spectrum2D cross_spectrum(const FeatureStack& x, const FeatureStack& z) {
    Spectrum2D acc(x.rows, x.cols);
    for (int ch = 0; ch < x.channels; ++ch) {
        const Spectrum2D xs = fft2(x.plane_ptr(ch), x.rows, x.cols);
        const Spectrum2D zs = fft2(z.plane_ptr(ch), z.rows, z.cols);
        for (std::size_t k = 0; k < acc.size(); ++k) {
            acc.v[k] += std::conj(xs.v[k]) * zs.v[k];
        }
    }
    return acc;
}

// The configured sigma applies to squared distances normalized by the feature
// element count; fold that into the bandwidth so the kernel itself stays a
// plain Gaussian.
inline double effective_sigma(const FeatureStack& x, double sigma) {
    return sigma * std::sqrt(static_cast<double>(x.size()));
}

inline Spectrum2D solve_alpha(const Mat2& kxx, const Spectrum2D& label_hat, double lambda) {
    Spectrum2D k_hat = fft2(kxx);
    Spectrum2D alpha(k_hat.rows, k_hat.cols);
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        const std::complex<double> denom = k_hat.v[k] + lambda;
        if (std::abs(denom) < 1e-12) {
            throw DegeneracyError("train: ridge denominator vanished (|F(kxx)+lambda| < 1e-12)");
        }
        alpha.v[k] = label_hat.v[k] / denom;
    }
    return alpha;
}

} // namespace detail

// Gaussian kernel between x and every cyclic shift of z:
//   k(tau) = exp(-(|x|^2 + |z|^2 - 2*corr(tau)) / sigma^2),
//   corr(tau) = sum_{s,d} x_d(s) * z_d(s + tau).
// The exponent argument is clamped at 0 from above, so values stay in (0, 1].
inline Mat2 kernel_correlation(const FeatureStack& x, const FeatureStack& z, double sigma) {
    if (x.rows != z.rows || x.cols != z.cols || x.channels != z.channels) {
        throw std::invalid_argument("kernel_correlation: shape mismatch");
    }
    if (!(sigma > 0.0)) throw std::invalid_argument("kernel_correlation: sigma must be > 0");
    const double xx = detail::stack_norm_sq(x);
    const double zz = detail::stack_norm_sq(z);
    Mat2 corr = ifft2(detail::cross_spectrum(x, z));
    const double inv_sigma_sq = 1.0 / (sigma * sigma);
    for (auto& v : corr.v) {
        const double d = std::max(0.0, xx + zz - 2.0 * v);
        v = std::exp(-d * inv_sigma_sq);
    }
    return corr;
}

// Frequency-domain ridge solve: alpha_hat = label_hat / (F(kxx) + lambda).
inline TrackerModel train(FeatureStack features, const KcfParams& params) {
    params.validate();
    TrackerModel m;
    m.rows = features.rows;
    m.cols = features.cols;
    m.label_hat = fft2(gaussian_label(m.rows, m.cols, params.label));
    const double sig = detail::effective_sigma(features, params.sigma);
    const Mat2 kxx = kernel_correlation(features, features, sig);
    m.alpha_hat = detail::solve_alpha(kxx, m.label_hat, params.lambda);
    m.model_x = std::move(features);
    return m;
}

struct Detection {
    Mat2 response;
    int dy = 0;
    int dx = 0;
    double peak = 0.0;
};

// Response map over all cyclic shifts plus its argmax, converted to a signed
// displacement in (-h/2, h/2] x (-w/2, w/2]. Ties break toward the smaller
// displacement magnitude, then row-major order.
inline Detection detect(const TrackerModel& model, const FeatureStack& z, const KcfParams& params) {
    params.validate();
    if (z.rows != model.rows || z.cols != model.cols || z.channels != model.model_x.channels) {
        throw std::invalid_argument("detect: feature stack does not match model window");
    }
    const double sig = detail::effective_sigma(z, params.sigma);
    const Mat2 kxz = kernel_correlation(model.model_x, z, sig);
    Spectrum2D prod = fft2(kxz);
    for (std::size_t k = 0; k < prod.size(); ++k) prod.v[k] *= model.alpha_hat.v[k];
    double imag_residue = 0.0;
    Detection det;
    det.response = ifft2(prod, &imag_residue);

    double max_abs = 0.0;
    for (double v : det.response.v) max_abs = std::max(max_abs, std::abs(v));
    if (imag_residue > 1e-6 * std::max(max_abs, 1e-300)) {
        throw DegeneracyError("detect: response is not real (imaginary residue " +
                              std::to_string(imag_residue) + ")");
    }

    const int h = det.response.rows, w = det.response.cols;
    double best = det.response.at(0, 0);
    int best_dy = 0, best_dx = 0;
    long best_mag = 0;
    for (int r = 0; r < h; ++r) {
        const int dy = r <= h / 2 ? r : r - h;
        for (int c = 0; c < w; ++c) {
            const int dx = c <= w / 2 ? c : c - w;
            const double v = det.response.at(r, c);
            const long mag = static_cast<long>(dy) * dy + static_cast<long>(dx) * dx;
            if (v > best || (v == best && mag < best_mag)) {
                best = v;
                best_dy = dy;
                best_dx = dx;
                best_mag = mag;
            }
        }
    }
    det.dy = best_dy;
    det.dx = best_dx;
    det.peak = best;
    return det;
}

// Linear interpolation of appearance and coefficients toward a model freshly
// trained on the new features. The eta = 0 / eta = 1 limits return the old /
// new model exactly.
inline TrackerModel update(const TrackerModel& model, FeatureStack new_features, const KcfParams& params) {
    params.validate();
    if (new_features.rows != model.rows || new_features.cols != model.cols ||
        new_features.channels != model.model_x.channels) {
        throw std::invalid_argument("update: feature stack does not match model window");
    }
    const double eta = params.interp_factor;
    if (eta == 0.0) return model;

    TrackerModel fresh;
    fresh.rows = model.rows;
    fresh.cols = model.cols;
    fresh.label_hat = model.label_hat;
    const double sig = detail::effective_sigma(new_features, params.sigma);
    const Mat2 kxx = kernel_correlation(new_features, new_features, sig);
    fresh.alpha_hat = detail::solve_alpha(kxx, model.label_hat, params.lambda);
    fresh.model_x = std::move(new_features);
    if (eta == 1.0) return fresh;

    TrackerModel out;
    out.rows = model.rows;
    out.cols = model.cols;
    out.label_hat = model.label_hat;
    out.model_x = FeatureStack(model.rows, model.cols, model.model_x.channels);
    for (std::size_t k = 0; k < out.model_x.size(); ++k) {
        out.model_x.data[k] = (1.0 - eta) * model.model_x.data[k] + eta * fresh.model_x.data[k];
    }
    out.alpha_hat = Spectrum2D(model.rows, model.cols);
    for (std::size_t k = 0; k < out.alpha_hat.size(); ++k) {
        out.alpha_hat.v[k] = (1.0 - eta) * model.alpha_hat.v[k] + eta * fresh.alpha_hat.v[k];
    }
    return out;
}

} // namespace hstrack
