#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hydronet/spline.hpp"

namespace hydronet {

struct Extrema {
    std::vector<std::size_t> maxima;
    std::vector<std::size_t> minima;
};

// Interior local extrema. A flat run bordered by lower (higher) values yields
// its midpoint, rounded down, as one maximum (minimum). Endpoints are never
// extrema.
inline Extrema find_extrema(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 3) throw Error("find_extrema: need at least 3 samples");
    Extrema ex;
    std::size_t i = 1;
    while (i + 1 < n) {
        if (x[i] == x[i - 1]) { ++i; continue; }
        // run of equal values starting at i
        std::size_t j = i;
        while (j + 1 < n && x[j + 1] == x[i]) ++j;
        if (j + 1 >= n) break;  // run touches the end
        const bool rising = x[i] > x[i - 1];
        const bool falling_after = x[j + 1] < x[i];
        const std::size_t mid = (i + j) / 2;
        if (rising && falling_after) ex.maxima.push_back(mid);
        if (!rising && !falling_after) ex.minima.push_back(mid);
        i = j + 1;
    }
    return ex;
}

// Sign changes, with zero runs bounded by opposite signs counted once.
inline std::size_t count_zero_crossings(std::span<const double> x) {
    std::size_t count = 0;
    int prev_sign = 0;
    for (double v : x) {
        const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
        if (s != 0) {
            if (prev_sign != 0 && s != prev_sign) ++count;
            prev_sign = s;
        }
    }
    return count;
}

enum class EnvelopeSide { upper, lower };

// Natural cubic spline through (index, value) knots, evaluated at every
// sample index. The first/last two extrema are mirrored across the series
// endpoints before fitting to tame end swings.
inline std::vector<double> spline_envelope(std::span<const double> series,
                                           std::span<const std::size_t> extrema,
                                           EnvelopeSide side) {
    const std::size_t n = series.size();
    const std::size_t k = extrema.size();
    const char* side_name = side == EnvelopeSide::upper ? "upper" : "lower";
    if (k < 1 || (k < 2 && n < 2))
        throw Error(std::string("spline_envelope(") + side_name + "): fewer than 2 knots even after augmentation");

    std::vector<double> xs, ys;
    const double last = static_cast<double>(n - 1);
    const std::size_t head = k >= 2 ? 2 : 1;
    for (std::size_t j = head; j-- > 0;) {
        xs.push_back(-static_cast<double>(extrema[j]));
        ys.push_back(series[extrema[j]]);
    }
    for (std::size_t j = 0; j < k; ++j) {
        xs.push_back(static_cast<double>(extrema[j]));
        ys.push_back(series[extrema[j]]);
    }
    const std::size_t tail = k >= 2 ? 2 : 1;
    for (std::size_t c = 0; c < tail; ++c) {
        const std::size_t j = k - 1 - c;
        xs.push_back(2.0 * last - static_cast<double>(extrema[j]));
        ys.push_back(series[extrema[j]]);
    }
    CubicSpline spline(xs, ys);
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) out[t] = spline(static_cast<double>(t));
    return out;
}

// Upper/lower spline envelopes and their pointwise mean.
struct EnvelopePair {
    std::vector<double> upper;
    std::vector<double> lower;
    std::vector<double> mean;
};

inline EnvelopePair envelopes(std::span<const double> series, const Extrema& ex) {
    EnvelopePair env;
    env.upper = spline_envelope(series, ex.maxima, EnvelopeSide::upper);
    env.lower = spline_envelope(series, ex.minima, EnvelopeSide::lower);
    env.mean.resize(series.size());
    for (std::size_t t = 0; t < series.size(); ++t)
        env.mean[t] = (env.upper[t] + env.lower[t]) / 2.0;
    return env;
}

struct SiftConfig {
    int max_iter = 50;
    double sd_threshold = 0.2;
};

struct SiftResult {
    std::vector<double> imf;
    int iterations = 0;
    bool converged = false;
};

// Iterates h <- h - m(t) until the candidate satisfies both IMF criteria:
// |#extrema - #zero-crossings| <= 1 and normalized envelope-mean energy
// sum(m^2)/sum(h^2) < sd_threshold.
inline SiftResult sift(std::span<const double> series, const SiftConfig& cfg = {}) {
    SiftResult res;
    res.imf.assign(series.begin(), series.end());
    auto& h = res.imf;
    while (true) {
        const Extrema ex = find_extrema(h);
        if (ex.maxima.size() < 2 || ex.minima.size() < 2) {
            if (res.iterations == 0)
                throw Error("sift: series needs at least 2 maxima and 2 minima");
            break;
        }
        const EnvelopePair env = envelopes(h, ex);
        const std::size_t n_extrema = ex.maxima.size() + ex.minima.size();
        const std::size_t n_cross = count_zero_crossings(h);
        const bool count_ok =
            (n_extrema > n_cross ? n_extrema - n_cross : n_cross - n_extrema) <= 1;
        double energy_h = 0.0, energy_m = 0.0;
        for (std::size_t t = 0; t < h.size(); ++t) {
            energy_h += h[t] * h[t];
            energy_m += env.mean[t] * env.mean[t];
        }
        if (count_ok && energy_h > 0.0 && energy_m < cfg.sd_threshold * energy_h) {
            res.converged = true;
            break;
        }
        if (res.iterations >= cfg.max_iter) break;
        for (std::size_t t = 0; t < h.size(); ++t) h[t] -= env.mean[t];
        ++res.iterations;
    }
    return res;
}

struct EmdConfig {
    int max_imfs = 10;
    SiftConfig sift;
};

// Intrinsic mode functions plus residual for one series; summing them
// reproduces the input to floating-point accuracy.
struct ImfSet {
    std::vector<std::vector<double>> imfs;
    std::vector<double> residual;
    std::size_t source_length = 0;
    std::vector<int> sift_counts;

    std::size_t count() const { return imfs.size(); }

    std::vector<double> reconstruct() const {
        std::vector<double> y = residual;
        for (const auto& imf : imfs)
            for (std::size_t t = 0; t < y.size(); ++t) y[t] += imf[t];
        return y;
    }
};

// Empirical mode decomposition: repeatedly sift and subtract IMFs until the
// residual is a monotonic trend (fewer than 2 maxima or minima) or max_imfs
// is reached.
inline ImfSet decompose(std::span<const double> series, const EmdConfig& cfg = {}) {
    if (series.size() < 8) throw Error("decompose: series must have at least 8 samples");
    ImfSet set;
    set.source_length = series.size();
    set.residual.assign(series.begin(), series.end());
    while (static_cast<int>(set.imfs.size()) < cfg.max_imfs) {
        const Extrema ex = find_extrema(set.residual);
        if (ex.maxima.size() < 2 || ex.minima.size() < 2) break;
        SiftResult s = sift(set.residual, cfg.sift);
        for (std::size_t t = 0; t < set.residual.size(); ++t) set.residual[t] -= s.imf[t];
        set.imfs.push_back(std::move(s.imf));
        set.sift_counts.push_back(s.iterations);
    }
    return set;
}

}  // namespace hydronet
