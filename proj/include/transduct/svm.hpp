#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "transduct/classifier.hpp"
#include "transduct/smo.hpp"

namespace transduct {

/// One one-vs-one linear machine: positive class vs negative class.
struct BinaryMachine {
    std::size_t positive = 0;
    std::size_t negative = 0;
    std::vector<double> weights;
    double bias = 0.0;
    Sigmoid sigmoid;
    std::vector<std::size_t> support;  // indices into the training pool
    std::vector<double> support_alphas;

    double margin(std::span<const double> x) const;
    /// Calibrated P(positive | positive or negative), clipped to [1e-7, 1 - 1e-7].
    double probability(std::span<const double> x) const;
};

class SvmModel final : public Model {
public:
    SvmModel(std::size_t k, SvmParams params, std::vector<std::size_t> classes, std::vector<BinaryMachine> machines);

    Posterior predict(std::span<const double> x) const override;
    nlohmann::json to_json() const override;

    const std::vector<std::size_t>& classes() const { return classes_; }
    const std::vector<BinaryMachine>& machines() const { return machines_; }
    const SvmParams& params() const { return params_; }

private:
    std::size_t k_;
    SvmParams params_;
    std::vector<std::size_t> classes_;  // classes seen in training, ascending
    std::vector<BinaryMachine> machines_;
};

/// Trains one linear machine per pair of observed classes and fits a Platt
/// sigmoid on its in-sample margins. Needs at least two observed classes.
std::shared_ptr<const SvmModel> fit_svm(const TrainingSet& pool, std::size_t k, const SvmParams& params);

}  // namespace transduct
