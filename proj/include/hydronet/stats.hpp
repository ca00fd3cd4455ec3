#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "hydronet/common.hpp"

namespace hydronet {

// Autocorrelation, biased estimator: rho(k) = sum (x_t - m)(x_{t+k} - m) /
// sum (x_t - m)^2. Returns rho(0..max_lag), rho(0) = 1.
inline std::vector<double> acf(std::span<const double> series, std::size_t max_lag) {
    const std::size_t n = series.size();
    if (n == 0 || max_lag >= n) throw Error("acf: max_lag must be < series length");
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);
    double denom = 0.0;
    for (double v : series) denom += (v - mean) * (v - mean);
    if (denom <= 0.0) throw Error("acf: series has zero variance");
    std::vector<double> rho(max_lag + 1, 0.0);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double s = 0.0;
        for (std::size_t t = 0; t + k < n; ++t)
            s += (series[t] - mean) * (series[t + k] - mean);
        rho[k] = s / denom;
    }
    rho[0] = 1.0;
    return rho;
}

// Partial autocorrelation phi_kk for k = 1..max_lag via the Durbin-Levinson
// recursion on the biased acf.
inline std::vector<double> pacf(std::span<const double> series, std::size_t max_lag) {
    if (max_lag < 1) throw Error("pacf: max_lag must be >= 1");
    const auto rho = acf(series, max_lag);
    std::vector<double> out(max_lag, 0.0);
    std::vector<double> phi(max_lag + 1, 0.0), prev(max_lag + 1, 0.0);
    double v = 1.0;
    phi[1] = rho[1];
    out[0] = rho[1];
    v *= 1.0 - phi[1] * phi[1];
    for (std::size_t k = 2; k <= max_lag; ++k) {
        if (v <= 0.0) throw Error("pacf: Durbin-Levinson breakdown (numerical degeneracy) at lag " +
                                  std::to_string(k));
        prev = phi;
        double num = rho[k];
        for (std::size_t j = 1; j < k; ++j) num -= prev[j] * rho[k - j];
        phi[k] = num / v;
        for (std::size_t j = 1; j < k; ++j) phi[j] = prev[j] - phi[k] * prev[k - j];
        out[k - 1] = phi[k];
        v *= 1.0 - phi[k] * phi[k];
    }
    return out;
}

}  // namespace hydronet
