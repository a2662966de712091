#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace transduct {

/// Dense symmetric matrix stored row-major.
class Gram {
public:
    Gram() = default;
    Gram(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    /// Linear kernel over row-major samples of width `dim`.
    static Gram linear(std::span<const double> samples, std::size_t dim);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct SmoOptions {
    double C = 1.0;
    double tolerance = 1e-3;
    /// Upper bound on full sweeps over the training set.
    int max_passes = 100;
};

struct SmoResult {
    std::vector<double> alphas;
    double b = 0.0;
    int sweeps = 0;

    /// f(i) = sum_j alpha_j y_j K(j, i) + b for a training point i.
    double decision(const Gram& gram, std::span<const int> y, std::size_t i) const;
};

/// Sequential minimal optimization of the soft-margin SVM dual
///   max sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij,  0 <= a_i <= C,  sum a_i y_i = 0.
///
/// Outer loop walks examples in index order and picks the first KKT violator;
/// the partner maximizes |E1 - E2|, falling back to every other index when that
/// pair makes no progress. Sweeps alternate between the full set and the
/// non-bound subset as in Platt's original scheme. Labels must be -1 or +1.
SmoResult smo_solve(const Gram& gram, std::span<const int> y, const SmoOptions& options = {});

/// Value of the dual objective above.
double dual_objective(const Gram& gram, std::span<const int> y, std::span<const double> alphas);

}  // namespace transduct
