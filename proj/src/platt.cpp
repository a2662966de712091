#include <cmath>
#include <stdexcept>

#include "transduct/calibration.hpp"

namespace transduct {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kGradientEps = 1e-10;
constexpr double kMinStep = 1e-10;
constexpr double kHessianRidge = 1e-12;

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z >= 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double Sigmoid::operator()(double margin) const {
    const double z = A * margin + B;
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

PlattTargets platt_targets(std::size_t n_positive, std::size_t n_negative) {
    return {(static_cast<double>(n_positive) + 1.0) / (static_cast<double>(n_positive) + 2.0),
            1.0 / (static_cast<double>(n_negative) + 2.0)};
}

double platt_nll(std::span<const double> margins, std::span<const int> y, const Sigmoid& sigmoid) {
    std::size_t pos = 0;
    for (int label : y) pos += label > 0;
    const auto targets = platt_targets(pos, y.size() - pos);
    double nll = 0.0;
    for (std::size_t i = 0; i < margins.size(); ++i) {
        const double t = y[i] > 0 ? targets.positive : targets.negative;
        const double z = sigmoid.A * margins[i] + sigmoid.B;
        // -[t log p + (1 - t) log(1 - p)] with p = 1 / (1 + e^z)
        nll += t * softplus(z) + (1.0 - t) * softplus(-z);
    }
    return nll;
}

Sigmoid platt_calibrate(std::span<const double> margins, std::span<const int> y) {
    if (margins.empty()) throw std::invalid_argument("platt calibration needs at least one margin");
    if (margins.size() != y.size()) throw std::invalid_argument("margins and labels differ in length");

    std::size_t pos = 0;
    for (int label : y) pos += label > 0;
    const std::size_t neg = y.size() - pos;
    const auto targets = platt_targets(pos, neg);

    Sigmoid s{0.0, std::log((static_cast<double>(neg) + 1.0) / (static_cast<double>(pos) + 1.0))};
    double fval = platt_nll(margins, y, s);

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        double h11 = kHessianRidge, h22 = kHessianRidge, h21 = 0.0, g1 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < margins.size(); ++i) {
            const double t = y[i] > 0 ? targets.positive : targets.negative;
            const double p = s(margins[i]);
            const double q = 1.0 - p;
            const double d2 = p * q;
            h11 += margins[i] * margins[i] * d2;
            h22 += d2;
            h21 += margins[i] * d2;
            const double d1 = t - p;
            g1 += margins[i] * d1;
            g2 += d1;
        }
        if (std::abs(g1) < kGradientEps && std::abs(g2) < kGradientEps) break;

        const double det = h11 * h22 - h21 * h21;
        const double dA = -(h22 * g1 - h21 * g2) / det;
        const double dB = -(-h21 * g1 + h11 * g2) / det;
        const double gd = g1 * dA + g2 * dB;

        double step = 1.0;
        bool moved = false;
        while (step >= kMinStep) {
            const Sigmoid trial{s.A + step * dA, s.B + step * dB};
            const double trial_f = platt_nll(margins, y, trial);
            if (trial_f < fval + 1e-4 * step * gd) {
                s = trial;
                fval = trial_f;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    return s;
}

}  // namespace transduct
