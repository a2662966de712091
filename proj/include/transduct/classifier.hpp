#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "transduct/calibration.hpp"
#include "transduct/dataset.hpp"

namespace transduct {

/// Per-class probability vector in ClassScheme order.
class Posterior {
public:
    Posterior() = default;
    /// Clamps negatives to zero and renormalizes; throws if nothing is left.
    explicit Posterior(std::vector<double> probs);

    static Posterior one_hot(std::size_t k, std::size_t cls);
    static Posterior uniform(std::size_t k);

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    const std::vector<double>& probs() const { return probs_; }

    /// Lowest index among the maximal entries.
    std::size_t argmax() const;
    double max() const { return probs_[argmax()]; }

    bool operator==(const Posterior&) const = default;

private:
    std::vector<double> probs_;
};

struct SvmParams {
    double C = 1.0;
    double tolerance = 1e-3;
    int max_passes = 100;
    double coupling_tolerance = 1e-6;
    int coupling_max_iterations = 200;
};

struct NbParams {
    double variance_floor = 1e-9;
};

struct TreeParams {
    std::size_t min_leaf = 2;
    double pruning_cf = 0.25;
};

enum class ClassifierKind { svm_smo, gaussian_nb, c45_tree };

std::string to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(std::string_view tag);

class ClassifierSpec {
public:
    using Params = std::variant<SvmParams, NbParams, TreeParams>;

    ClassifierSpec(Params params = SvmParams{});

    static ClassifierSpec svm(SvmParams p = {}) { return ClassifierSpec(p); }
    static ClassifierSpec naive_bayes(NbParams p = {}) { return ClassifierSpec(p); }
    static ClassifierSpec tree(TreeParams p = {}) { return ClassifierSpec(p); }
    static ClassifierSpec defaults(ClassifierKind kind);

    ClassifierKind kind() const;
    std::string tag() const { return to_string(kind()); }
    const Params& params() const { return params_; }

    /// Throws ConfigError when a parameter is out of range.
    void validate() const;

private:
    Params params_;
};

/// Training pool in flat row-major layout.
struct TrainingSet {
    std::size_t dim = 0;
    std::vector<double> features;
    std::vector<std::size_t> labels;

    std::size_t size() const { return labels.size(); }
    std::span<const double> row(std::size_t i) const { return {features.data() + i * dim, dim}; }
    void add(std::span<const double> x, std::size_t label);

    static TrainingSet from(std::span<const LabeledExample> examples, std::size_t dim);
};

/// Fitted state behind TrainedModel.
class Model {
public:
    virtual ~Model() = default;
    virtual Posterior predict(std::span<const double> x) const = 0;
    virtual nlohmann::json to_json() const = 0;
};

class TrainedModel {
public:
    TrainedModel(std::shared_ptr<const Model> model, std::string tag, std::size_t k, std::size_t dim);

    const std::string& tag() const { return tag_; }
    std::size_t k() const { return k_; }
    std::size_t dim() const { return dim_; }
    const Model& model() const { return *model_; }

    /// Throws DataError when x does not have `dim()` features.
    Posterior predict(std::span<const double> x) const;

    /// Versioned JSON dump of the fitted state; not a stability contract.
    nlohmann::json to_json() const;

private:
    std::shared_ptr<const Model> model_;
    std::string tag_;
    std::size_t k_;
    std::size_t dim_;
};

/// Fits a classifier. A single-class pool yields a constant one-hot predictor.
TrainedModel train(const ClassifierSpec& spec, const TrainingSet& pool, const ClassScheme& scheme);
TrainedModel train(const ClassifierSpec& spec, std::span<const LabeledExample> pool, const ClassScheme& scheme);

Posterior predict_posterior(const TrainedModel& model, const Instance& x);

}  // namespace transduct
