#include <gtest/gtest.h>

#include <cmath>

#include "hydronet/stats.hpp"

using namespace hydronet;

TEST(Acf, LagZeroIsOne) {
    const std::vector<double> x = {1.0, 3.0, 2.0, 5.0, 4.0};
    EXPECT_DOUBLE_EQ(acf(x, 2)[0], 1.0);
}

TEST(Acf, WhiteNoiseStaysInsideConfidenceBand) {
    const std::size_t n = 10000;
    Rng rng(404);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    const auto rho = acf(x, 20);
    const double band = 2.0 / std::sqrt(static_cast<double>(n));
    int inside = 0;
    for (std::size_t k = 1; k <= 20; ++k)
        if (std::abs(rho[k]) < band) ++inside;
    EXPECT_GE(inside, 19);
}

TEST(Acf, ConstantSeriesIsAnError) {
    const std::vector<double> x(50, 3.0);
    EXPECT_THROW(acf(x, 5), Error);
    const std::vector<double> y = {1.0, 2.0, 3.0};
    EXPECT_THROW(acf(y, 3), Error);  // max_lag >= length
}

TEST(Acf, AffineInvariance) {
    Rng rng(17);
    std::vector<double> x(500), y(500);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.normal() + 0.3 * std::sin(0.05 * static_cast<double>(i));
        y[i] = -2.5 * x[i] + 7.0;
    }
    const auto rx = acf(x, 10);
    const auto ry = acf(y, 10);
    for (std::size_t k = 0; k <= 10; ++k) EXPECT_NEAR(rx[k], ry[k], 1e-9);
}

TEST(Pacf, FirstValueEqualsAcfLagOne) {
    Rng rng(2);
    std::vector<double> x(300);
    double prev = 0.0;
    for (auto& v : x) {
        prev = 0.5 * prev + rng.normal();
        v = prev;
    }
    EXPECT_DOUBLE_EQ(pacf(x, 5)[0], acf(x, 5)[1]);
}

TEST(Pacf, Ar1SimulationRecoversCoefficient) {
    // Oracle: simulate x_t = 0.7 x_{t-1} + eps with seeded noise.
    const std::size_t n = 20000;
    Rng rng(99);
    std::vector<double> x(n);
    double prev = 0.0;
    for (auto& v : x) {
        prev = 0.7 * prev + rng.normal();
        v = prev;
    }
    const auto phi = pacf(x, 5);
    EXPECT_NEAR(phi[0], 0.7, 0.03);
    for (std::size_t k = 2; k <= 5; ++k) EXPECT_LT(std::abs(phi[k - 1]), 0.03);
}

TEST(Pacf, WhiteNoisePartialsSmall) {
    const std::size_t n = 20000;
    Rng rng(1236);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    const auto phi = pacf(x, 10);
    const double band = 2.0 / std::sqrt(static_cast<double>(n));
    int inside = 0;
    for (double p : phi)
        if (std::abs(p) < band) ++inside;
    EXPECT_GE(inside, 9);
}
