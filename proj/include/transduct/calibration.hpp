#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace transduct {

/// p(+1 | f) = 1 / (1 + exp(A f + B)).
struct Sigmoid {
    double A = 0.0;
    double B = 0.0;

    double operator()(double margin) const;
};

struct PlattTargets {
    double positive = 0.0;
    double negative = 0.0;
};

/// Regularized targets (N+ + 1) / (N+ + 2) and 1 / (N- + 2).
PlattTargets platt_targets(std::size_t n_positive, std::size_t n_negative);

/// Cross-entropy of the sigmoid against the regularized targets.
double platt_nll(std::span<const double> margins, std::span<const int> y, const Sigmoid& sigmoid);

/// Newton's method with backtracking on the regularized likelihood. Stops when
/// both gradient components fall below 1e-10 or after 200 iterations.
Sigmoid platt_calibrate(std::span<const double> margins, std::span<const int> y);

/// Hastie-Tibshirani coupling of pairwise probabilities into a k-class
/// posterior. `r` is a k*k row-major matrix where r[i*k+j] estimates
/// P(class i | i or j); only entries with i < j are read, r_ji = 1 - r_ij.
/// Iterates until the largest component change drops below `tolerance` or
/// `max_iterations` is reached.
std::vector<double> pairwise_couple(std::span<const double> r, std::size_t k, double tolerance = 1e-6,
                                    int max_iterations = 200);

}  // namespace transduct
