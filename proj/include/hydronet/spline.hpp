#pragma once

#include <span>
#include <vector>

#include "hydronet/common.hpp"

namespace hydronet {

// Natural cubic spline: zero second derivative at both end knots. With two
// knots this degenerates to the straight line through them.
class CubicSpline {
public:
    CubicSpline(std::span<const double> xs, std::span<const double> ys) {
        const std::size_t n = xs.size();
        if (n < 2 || ys.size() != n) throw Error("CubicSpline: need at least 2 knots");
        for (std::size_t i = 1; i < n; ++i)
            if (!(xs[i] > xs[i - 1])) throw Error("CubicSpline: knots must be strictly increasing");
        x_.assign(xs.begin(), xs.end());
        y_.assign(ys.begin(), ys.end());
        m_.assign(n, 0.0);
        if (n == 2) return;

        // Tridiagonal solve for interior second derivatives (Thomas algorithm).
        const std::size_t m = n - 2;
        std::vector<double> diag(m), rhs(m), upper(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double h0 = x_[i + 1] - x_[i];
            const double h1 = x_[i + 2] - x_[i + 1];
            diag[i] = (h0 + h1) / 3.0;
            upper[i] = h1 / 6.0;
            rhs[i] = (y_[i + 2] - y_[i + 1]) / h1 - (y_[i + 1] - y_[i]) / h0;
        }
        for (std::size_t i = 1; i < m; ++i) {
            const double lower = (x_[i + 1] - x_[i]) / 6.0;
            const double w = lower / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        m_[m] = rhs[m - 1] / diag[m - 1];
        for (std::size_t i = m - 1; i-- > 0;)
            m_[i + 1] = (rhs[i] - upper[i] * m_[i + 2]) / diag[i];
    }

    double operator()(double x) const {
        const std::size_t n = x_.size();
        // Interval lookup; clamps to the end cubics outside the knot range.
        std::size_t lo = 0, hi = n - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if (x_[mid] <= x) lo = mid; else hi = mid;
        }
        const double h = x_[lo + 1] - x_[lo];
        const double a = (x_[lo + 1] - x) / h;
        const double b = (x - x_[lo]) / h;
        return a * y_[lo] + b * y_[lo + 1] +
               ((a * a * a - a) * m_[lo] + (b * b * b - b) * m_[lo + 1]) * h * h / 6.0;
    }

private:
    std::vector<double> x_, y_, m_;
};

}  // namespace hydronet
