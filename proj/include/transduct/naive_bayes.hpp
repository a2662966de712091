#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "transduct/classifier.hpp"

namespace transduct {

class NaiveBayesModel final : public Model {
public:
    struct ClassStats {
        std::size_t count = 0;
        double prior = 0.0;  // Laplace-smoothed over all k classes
        std::vector<double> mean;
        std::vector<double> variance;  // floored
    };

    explicit NaiveBayesModel(std::vector<ClassStats> stats);

    Posterior predict(std::span<const double> x) const override;
    nlohmann::json to_json() const override;

    const std::vector<ClassStats>& stats() const { return stats_; }

private:
    std::vector<ClassStats> stats_;
};

/// Classes absent from the pool receive zero posterior mass.
std::shared_ptr<const NaiveBayesModel> fit_naive_bayes(const TrainingSet& pool, std::size_t k,
                                                       const NbParams& params);

}  // namespace transduct
