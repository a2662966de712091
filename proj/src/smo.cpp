#include "transduct/smo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace transduct {

Gram Gram::linear(std::span<const double> samples, std::size_t dim) {
    if (dim == 0 || samples.size() % dim != 0) throw std::invalid_argument("sample buffer is not a multiple of dim");
    const std::size_t n = samples.size() / dim;
    Gram gram(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t d = 0; d < dim; ++d) dot += samples[i * dim + d] * samples[j * dim + d];
            gram(i, j) = gram(j, i) = dot;
        }
    }
    return gram;
}

double SmoResult::decision(const Gram& gram, std::span<const int> y, std::size_t i) const {
    double f = b;
    for (std::size_t j = 0; j < alphas.size(); ++j) {
        if (alphas[j] != 0.0) f += alphas[j] * y[j] * gram(j, i);
    }
    return f;
}

double dual_objective(const Gram& gram, std::span<const int> y, std::span<const double> alphas) {
    double linear = 0.0;
    double quad = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        linear += alphas[i];
        for (std::size_t j = 0; j < alphas.size(); ++j) quad += alphas[i] * alphas[j] * y[i] * y[j] * gram(i, j);
    }
    return linear - 0.5 * quad;
}

namespace {

constexpr double kStepEps = 1e-12;
constexpr int kMaxSweeps = 100000;

class SmoSolver {
public:
    SmoSolver(const Gram& gram, std::span<const int> y, const SmoOptions& options)
        : K_(gram), y_(y), C_(options.C), tol_(options.tolerance), n_(y.size()),
          alpha_(n_, 0.0), error_(n_) {
        // f = 0 initially, so E_i = -y_i.
        for (std::size_t i = 0; i < n_; ++i) error_[i] = -static_cast<double>(y_[i]);
    }

    // Only full sweeps count against max_passes; the non-bound sweeps between
    // them are bounded separately so a numerically stuck inner loop still ends.
    SmoResult run(int max_passes) {
        int sweeps = 0;
        int full_sweeps = 0;
        bool examine_all = true;
        std::size_t changed = 0;
        while ((changed > 0 || examine_all) && sweeps < kMaxSweeps) {
            if (examine_all && full_sweeps >= max_passes) break;
            changed = 0;
            for (std::size_t i = 0; i < n_; ++i) {
                if (examine_all || !at_bound(alpha_[i])) changed += examine(i);
            }
            ++sweeps;
            if (examine_all) ++full_sweeps;
            if (examine_all)
                examine_all = false;
            else if (changed == 0)
                examine_all = true;
        }
        return {alpha_, final_threshold(), sweeps};
    }

private:
    bool at_bound(double a) const { return a <= 0.0 || a >= C_; }

    bool violates_kkt(std::size_t i) const {
        const double r = error_[i] * y_[i];
        return (r < -tol_ && alpha_[i] < C_) || (r > tol_ && alpha_[i] > 0.0);
    }

    std::size_t examine(std::size_t i2) {
        if (!violates_kkt(i2)) return 0;

        std::size_t best = n_;
        double best_gap = -1.0;
        for (std::size_t j = 0; j < n_; ++j) {
            if (j == i2) continue;
            const double gap = std::abs(error_[j] - error_[i2]);
            if (gap > best_gap) {
                best_gap = gap;
                best = j;
            }
        }
        if (best < n_ && take_step(best, i2)) return 1;

        for (std::size_t j = 0; j < n_; ++j) {
            if (j != best && !at_bound(alpha_[j]) && take_step(j, i2)) return 1;
        }
        for (std::size_t j = 0; j < n_; ++j) {
            if (j != best && at_bound(alpha_[j]) && take_step(j, i2)) return 1;
        }
        return 0;
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double a1 = alpha_[i1];
        const double a2 = alpha_[i2];
        const double y1 = y_[i1];
        const double y2 = y_[i2];
        const double e1 = error_[i1];
        const double e2 = error_[i2];
        const double s = y1 * y2;

        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(C_, C_ + a2 - a1);
        } else {
            lo = std::max(0.0, a1 + a2 - C_);
            hi = std::min(C_, a1 + a2);
        }
        if (hi - lo <= kStepEps) return false;

        const double k11 = K_(i1, i1);
        const double k12 = K_(i1, i2);
        const double k22 = K_(i2, i2);
        const double eta = k11 + k22 - 2.0 * k12;

        double a2_new;
        if (eta > kStepEps) {
            a2_new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
        } else {
            // Flat or concave direction: take whichever end improves the dual.
            const double f1 = y1 * (e1 - b_) - a1 * k11 - s * a2 * k12;
            const double f2 = y2 * (e2 - b_) - s * a1 * k12 - a2 * k22;
            const double l1 = a1 + s * (a2 - lo);
            const double h1 = a1 + s * (a2 - hi);
            const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 + s * lo * l1 * k12;
            const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 + s * hi * h1 * k12;
            if (obj_lo < obj_hi - kStepEps)
                a2_new = lo;
            else if (obj_lo > obj_hi + kStepEps)
                a2_new = hi;
            else
                return false;
        }
        if (std::abs(a2_new - a2) < kStepEps * (a2_new + a2 + kStepEps)) return false;

        double a1_new = a1 + s * (a2 - a2_new);
        a1_new = std::clamp(a1_new, 0.0, C_);
        if (a1_new < kStepEps * C_) a1_new = 0.0;
        if (a1_new > C_ * (1.0 - kStepEps)) a1_new = C_;

        const double d1 = y1 * (a1_new - a1);
        const double d2 = y2 * (a2_new - a2);
        const double b1 = b_ - e1 - d1 * k11 - d2 * k12;
        const double b2 = b_ - e2 - d1 * k12 - d2 * k22;
        double b_new;
        if (a1_new > 0.0 && a1_new < C_)
            b_new = b1;
        else if (a2_new > 0.0 && a2_new < C_)
            b_new = b2;
        else
            b_new = 0.5 * (b1 + b2);

        const double db = b_new - b_;
        for (std::size_t i = 0; i < n_; ++i) error_[i] += d1 * K_(i1, i) + d2 * K_(i2, i) + db;
        alpha_[i1] = a1_new;
        alpha_[i2] = a2_new;
        b_ = b_new;
        return true;
    }

    // Threshold from the converged multipliers: mean over free vectors, else
    // the midpoint of the interval allowed by the bound ones.
    double final_threshold() const {
        double sum = 0.0;
        std::size_t free = 0;
        double lower = -std::numeric_limits<double>::infinity();
        double upper = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n_; ++i) {
            double g = static_cast<double>(y_[i]);
            for (std::size_t j = 0; j < n_; ++j) {
                if (alpha_[j] != 0.0) g -= alpha_[j] * y_[j] * K_(j, i);
            }
            if (alpha_[i] > 0.0 && alpha_[i] < C_) {
                sum += g;
                ++free;
            } else if ((alpha_[i] <= 0.0) == (y_[i] > 0)) {
                lower = std::max(lower, g);
            } else {
                upper = std::min(upper, g);
            }
        }
        if (free > 0) return sum / static_cast<double>(free);
        if (std::isfinite(lower) && std::isfinite(upper)) return 0.5 * (lower + upper);
        if (std::isfinite(lower)) return lower;
        if (std::isfinite(upper)) return upper;
        return 0.0;
    }

    const Gram& K_;
    std::span<const int> y_;
    double C_;
    double tol_;
    std::size_t n_;
    std::vector<double> alpha_;
    std::vector<double> error_;
    double b_ = 0.0;
};

}  // namespace

SmoResult smo_solve(const Gram& gram, std::span<const int> y, const SmoOptions& options) {
    if (gram.rows() != gram.cols())
        throw std::invalid_argument("gram matrix is not square (" + std::to_string(gram.rows()) + "x" +
                                    std::to_string(gram.cols()) + ")");
    if (gram.rows() != y.size())
        throw std::invalid_argument("gram matrix has " + std::to_string(gram.rows()) + " rows but " +
                                    std::to_string(y.size()) + " labels were given");
    if (!(options.C > 0.0)) throw std::invalid_argument("C must be positive");
    if (!(options.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
    for (int label : y) {
        if (label != 1 && label != -1) throw std::invalid_argument("labels must be -1 or +1");
    }
    if (y.empty()) return {};
    return SmoSolver(gram, y, options).run(options.max_passes);
}

}  // namespace transduct
