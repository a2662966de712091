#include "transduct/naive_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace transduct {

NaiveBayesModel::NaiveBayesModel(std::vector<ClassStats> stats) : stats_(std::move(stats)) {}

Posterior NaiveBayesModel::predict(std::span<const double> x) const {
    std::vector<double> log_joint(stats_.size(), -std::numeric_limits<double>::infinity());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < stats_.size(); ++c) {
        const auto& s = stats_[c];
        if (s.count == 0) continue;
        double lj = std::log(s.prior);
        for (std::size_t d = 0; d < x.size(); ++d) {
            const double diff = x[d] - s.mean[d];
            lj -= 0.5 * (std::log(2.0 * std::numbers::pi * s.variance[d]) + diff * diff / s.variance[d]);
        }
        log_joint[c] = lj;
        best = std::max(best, lj);
    }
    std::vector<double> probs(stats_.size(), 0.0);
    for (std::size_t c = 0; c < stats_.size(); ++c) {
        if (stats_[c].count > 0) probs[c] = std::exp(log_joint[c] - best);
    }
    return Posterior(std::move(probs));
}

nlohmann::json NaiveBayesModel::to_json() const {
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& s : stats_) {
        classes.push_back({{"count", s.count}, {"prior", s.prior}, {"mean", s.mean}, {"variance", s.variance}});
    }
    return {{"classes", std::move(classes)}};
}

std::shared_ptr<const NaiveBayesModel> fit_naive_bayes(const TrainingSet& pool, std::size_t k,
                                                       const NbParams& params) {
    std::vector<NaiveBayesModel::ClassStats> stats(k);
    for (auto& s : stats) {
        s.mean.assign(pool.dim, 0.0);
        s.variance.assign(pool.dim, 0.0);
    }
    for (std::size_t i = 0; i < pool.size(); ++i) {
        auto& s = stats[pool.labels[i]];
        ++s.count;
        const auto row = pool.row(i);
        for (std::size_t d = 0; d < pool.dim; ++d) s.mean[d] += row[d];
    }
    for (auto& s : stats) {
        if (s.count == 0) continue;
        for (auto& m : s.mean) m /= static_cast<double>(s.count);
    }
    for (std::size_t i = 0; i < pool.size(); ++i) {
        auto& s = stats[pool.labels[i]];
        const auto row = pool.row(i);
        for (std::size_t d = 0; d < pool.dim; ++d) {
            const double diff = row[d] - s.mean[d];
            s.variance[d] += diff * diff;
        }
    }
    const double n = static_cast<double>(pool.size());
    for (auto& s : stats) {
        s.prior = (static_cast<double>(s.count) + 1.0) / (n + static_cast<double>(k));
        for (auto& v : s.variance) {
            v = s.count > 0 ? v / static_cast<double>(s.count) : 0.0;
            v = std::max(v, params.variance_floor);
        }
    }
    return std::make_shared<NaiveBayesModel>(std::move(stats));
}

}  // namespace transduct
