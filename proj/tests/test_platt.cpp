#include <cmath>
#include <random>

#include "doctest.h"
#include "transduct/calibration.hpp"

using namespace transduct;

namespace {

// Regularized cross-entropy written out directly.
double nll(const std::vector<double>& f, const std::vector<int>& y, double A, double B) {
    double npos = 0, nneg = 0;
    for (int v : y) (v > 0 ? npos : nneg) += 1;
    const double tp = (npos + 1) / (npos + 2), tn = 1 / (nneg + 2);
    double total = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double t = y[i] > 0 ? tp : tn;
        const double z = A * f[i] + B;
        // p = 1/(1+e^z): -t log p - (1-t) log(1-p)
        const double log1pez = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        total += t * log1pez + (1 - t) * (log1pez - z);
    }
    return total;
}

// Fine grid, then plain Newton with finite-difference derivatives.
std::pair<double, double> grid_newton(const std::vector<double>& f, const std::vector<int>& y) {
    double bestA = 0, bestB = 0, best = nll(f, y, 0, 0);
    for (double A = -10; A <= 10; A += 0.02)
        for (double B = -5; B <= 5; B += 0.02) {
            const double v = nll(f, y, A, B);
            if (v < best) best = v, bestA = A, bestB = B;
        }
    const double h = 1e-5;
    for (int it = 0; it < 50; ++it) {
        auto F = [&](double a, double b) { return nll(f, y, a, b); };
        const double gA = (F(bestA + h, bestB) - F(bestA - h, bestB)) / (2 * h);
        const double gB = (F(bestA, bestB + h) - F(bestA, bestB - h)) / (2 * h);
        const double hAA = (F(bestA + h, bestB) - 2 * F(bestA, bestB) + F(bestA - h, bestB)) / (h * h);
        const double hBB = (F(bestA, bestB + h) - 2 * F(bestA, bestB) + F(bestA, bestB - h)) / (h * h);
        const double hAB = (F(bestA + h, bestB + h) - F(bestA + h, bestB - h) - F(bestA - h, bestB + h) +
                            F(bestA - h, bestB - h)) / (4 * h * h);
        const double det = hAA * hBB - hAB * hAB;
        if (det <= 0) break;
        const double dA = (hBB * gA - hAB * gB) / det;
        const double dB = (hAA * gB - hAB * gA) / det;
        if (nll(f, y, bestA - dA, bestB - dB) > nll(f, y, bestA, bestB)) break;
        bestA -= dA;
        bestB -= dB;
    }
    return {bestA, bestB};
}

}  // namespace

TEST_CASE("regularized targets") {
    const auto t = platt_targets(3, 1);
    CHECK(t.positive == doctest::Approx(0.8));
    CHECK(t.negative == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("symmetric margins give B = 0 and a decreasing sigmoid") {
    const std::vector<double> f{2, 2, -2, -2};
    const std::vector<int> y{1, 1, -1, -1};
    const auto s = platt_calibrate(f, y);
    CHECK(s.A < 0.0);
    CHECK(std::abs(s.B) < 1e-6);
    CHECK(s(2.0) > 0.5);
    CHECK(s(-2.0) < 0.5);
}

TEST_CASE("fit reaches the grid+Newton optimum") {
    std::mt19937_64 gen(21);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> f(20);
        std::vector<int> y(20);
        for (std::size_t i = 0; i < f.size(); ++i) {
            y[i] = i % 2 ? 1 : -1;
            f[i] = 0.8 * y[i] + noise(gen) + 0.2 * trial;
        }
        const auto s = platt_calibrate(f, y);
        const auto [A, B] = grid_newton(f, y);
        CHECK(nll(f, y, s.A, s.B) <= nll(f, y, A, B) + 1e-8);
        CHECK(platt_nll(f, y, s) == doctest::Approx(nll(f, y, s.A, s.B)).epsilon(1e-12));
    }
}

TEST_CASE("sigmoid is numerically safe at extreme margins") {
    const Sigmoid s{-5.0, 0.0};
    CHECK(s(1e6) == doctest::Approx(1.0));
    CHECK(s(-1e6) == doctest::Approx(0.0));
    CHECK(std::isfinite(s(1e300)));
}
