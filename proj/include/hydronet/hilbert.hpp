#pragma once

#include <complex>
#include <span>
#include <vector>

#include "hydronet/emd.hpp"
#include "hydronet/fft.hpp"

namespace hydronet {

// FFT-based analytic signal: zero negative frequencies, double positive ones,
// keep DC and Nyquist unscaled. Input is zero-padded to the next power of two
// and the result truncated back; the real part reproduces the input.
inline std::vector<std::complex<double>> analytic_signal(std::span<const double> series) {
    const std::size_t n = series.size();
    if (n < 4) throw Error("analytic_signal: need at least 4 samples");
    const std::size_t m = next_pow2(n);
    std::vector<std::complex<double>> a(m, {0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) a[i] = {series[i], 0.0};
    fft_inplace(a, false);
    for (std::size_t k = 1; k < m / 2; ++k) a[k] *= 2.0;
    for (std::size_t k = m / 2 + 1; k < m; ++k) a[k] = {0.0, 0.0};
    fft_inplace(a, true);
    a.resize(n);
    return a;
}

// Instantaneous amplitude, unwrapped phase [rad], and frequency
// [cycles/sample] for one IMF.
struct HhtRow {
    std::vector<double> amplitude;
    std::vector<double> phase;
    std::vector<double> frequency;
};

struct HhtFrame {
    std::vector<HhtRow> rows;  // one per IMF
};

inline HhtRow instantaneous(std::span<const double> imf,
                            std::span<const std::complex<double>> analytic) {
    const std::size_t n = analytic.size();
    if (imf.size() != n) throw Error("instantaneous: imf/analytic length mismatch");
    HhtRow row;
    row.amplitude.resize(n);
    row.phase.resize(n);
    row.frequency.resize(n);
    const double two_pi = 6.283185307179586476925286766559;
    double prev_arg = 0.0, offset = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        row.amplitude[t] = std::abs(analytic[t]);
        const double arg = std::arg(analytic[t]);
        if (t > 0) {
            double d = arg - prev_arg;
            while (d > 3.141592653589793238462643383280) { d -= two_pi; offset -= two_pi; }
            while (d <= -3.141592653589793238462643383280) { d += two_pi; offset += two_pi; }
        }
        prev_arg = arg;
        row.phase[t] = arg + offset;
    }
    if (n == 1) {
        row.frequency[0] = 0.0;
        return row;
    }
    row.frequency[0] = (row.phase[1] - row.phase[0]) / two_pi;
    row.frequency[n - 1] = (row.phase[n - 1] - row.phase[n - 2]) / two_pi;
    for (std::size_t t = 1; t + 1 < n; ++t)
        row.frequency[t] = (row.phase[t + 1] - row.phase[t - 1]) / (2.0 * two_pi);
    return row;
}

inline HhtFrame hht_frame(const ImfSet& set) {
    HhtFrame frame;
    for (const auto& imf : set.imfs) {
        const auto analytic = analytic_signal(imf);
        frame.rows.push_back(instantaneous(imf, analytic));
    }
    return frame;
}

}  // namespace hydronet
