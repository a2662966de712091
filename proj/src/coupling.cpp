#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "transduct/calibration.hpp"

namespace transduct {

namespace {

double log_sigmoid(double z) { return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

std::vector<double> softmax(const std::vector<double>& theta) {
    const double top = *std::max_element(theta.begin(), theta.end());
    std::vector<double> p(theta.size());
    double total = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) total += p[i] = std::exp(theta[i] - top);
    for (auto& v : p) v /= total;
    return p;
}

// Solves A x = b in place by Gaussian elimination with partial pivoting.
std::vector<double> solve(std::vector<double> A, std::vector<double> b, std::size_t n) {
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t pivot = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(A[r * n + c]) > std::abs(A[pivot * n + c])) pivot = r;
        if (pivot != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(A[c * n + j], A[pivot * n + j]);
            std::swap(b[c], b[pivot]);
        }
        const double d = A[c * n + c];
        if (d == 0.0) return std::vector<double>(n, 0.0);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = A[r * n + c] / d;
            for (std::size_t j = c; j < n; ++j) A[r * n + j] -= f * A[c * n + j];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t c = n; c-- > 0;) {
        double s = b[c];
        for (std::size_t j = c + 1; j < n; ++j) s -= A[c * n + j] * x[j];
        x[c] = s / A[c * n + c];
    }
    return x;
}

}  // namespace

std::vector<double> pairwise_couple(std::span<const double> r, std::size_t k, double tolerance,
                                    int max_iterations) {
    if (k == 0) throw std::invalid_argument("pairwise coupling needs k >= 1");
    if (r.size() != k * k) throw std::invalid_argument("pairwise matrix must be k*k");

    // Full matrix from the upper triangle, r_ji = 1 - r_ij.
    std::vector<double> full(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const double rij = r[i * k + j];
            if (!(rij >= 0.0 && rij <= 1.0))
                throw std::invalid_argument("pairwise probability r[" + std::to_string(i) + "][" +
                                            std::to_string(j) + "] outside [0,1]");
            full[i * k + j] = rij;
            full[j * k + i] = 1.0 - rij;
        }
    }
    if (k == 1) return {1.0};
    if (k == 2) return {full[1], full[2]};  // the fixed point is the pairwise estimate itself

    // The coupling fixed point sum_j r_ij = sum_j p_i / (p_i + p_j) is the
    // stationarity condition of a Bradley-Terry likelihood in log-odds theta,
    // p = softmax(theta). Plain fixed-point sweeps crawl when some r_ij are
    // near 0 or 1, so the same equations are solved by damped Newton steps
    // with the last coordinate pinned at zero.
    const std::size_t m = k - 1;
    std::vector<double> theta(k, 0.0);
    auto likelihood = [&](const std::vector<double>& t) {
        double l = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                if (i != j && full[i * k + j] > 0.0) l += full[i * k + j] * log_sigmoid(t[i] - t[j]);
        return l;
    };

    std::vector<double> p = softmax(theta);
    double current = likelihood(theta);
    for (int iter = 0; iter < max_iterations; ++iter) {
        std::vector<double> grad(m, 0.0), lap(m * m, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                if (i == j) continue;
                const double mu = sigmoid(theta[i] - theta[j]);
                const double w = mu * (1.0 - mu);
                if (i < m) {
                    grad[i] += full[i * k + j] - mu;
                    lap[i * m + i] += w;
                    if (j < m) lap[i * m + j] -= w;
                }
            }
        }
        for (std::size_t i = 0; i < m; ++i) lap[i * m + i] += 1e-300;
        const auto step = solve(lap, grad, m);

        double scale = 1.0;
        std::vector<double> trial(k, 0.0);
        for (int back = 0; back < 60; ++back) {
            for (std::size_t i = 0; i < m; ++i) trial[i] = theta[i] + scale * step[i];
            const double value = likelihood(trial);
            if (value >= current - 1e-15 * std::abs(current)) {
                current = std::max(current, value);
                break;
            }
            scale *= 0.5;
        }
        theta = trial;
        const auto next = softmax(theta);
        double change = 0.0;
        for (std::size_t i = 0; i < k; ++i) change = std::max(change, std::abs(next[i] - p[i]));
        p = next;
        if (change < tolerance) break;
    }
    return p;
}

}  // namespace transduct
