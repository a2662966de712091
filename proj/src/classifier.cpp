#include "transduct/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "transduct/naive_bayes.hpp"
#include "transduct/svm.hpp"
#include "transduct/tree.hpp"

namespace transduct {

namespace {

class ConstantModel final : public Model {
public:
    ConstantModel(std::size_t k, std::size_t cls) : posterior_(Posterior::one_hot(k, cls)), cls_(cls) {}
    Posterior predict(std::span<const double>) const override { return posterior_; }
    nlohmann::json to_json() const override { return {{"constant_class", cls_}}; }

private:
    Posterior posterior_;
    std::size_t cls_;
};

}  // namespace

Posterior::Posterior(std::vector<double> probs) : probs_(std::move(probs)) {
    double total = 0.0;
    for (auto& p : probs_) {
        if (!(p > 0.0)) p = 0.0;  // also maps NaN to zero
        total += p;
    }
    if (!(total > 0.0) || !std::isfinite(total)) throw std::invalid_argument("posterior has no probability mass");
    for (auto& p : probs_) p = std::min(1.0, p / total);
}

Posterior Posterior::one_hot(std::size_t k, std::size_t cls) {
    std::vector<double> probs(k, 0.0);
    probs.at(cls) = 1.0;
    return Posterior(std::move(probs));
}

Posterior Posterior::uniform(std::size_t k) { return Posterior(std::vector<double>(k, 1.0)); }

std::size_t Posterior::argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs_.size(); ++i) {
        if (probs_[i] > probs_[best]) best = i;
    }
    return best;
}

std::string to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::svm_smo: return "svm-smo";
        case ClassifierKind::gaussian_nb: return "gaussian-nb";
        case ClassifierKind::c45_tree: return "c45-tree";
    }
    return "unknown";
}

ClassifierKind classifier_kind_from_string(std::string_view tag) {
    if (tag == "svm-smo") return ClassifierKind::svm_smo;
    if (tag == "gaussian-nb") return ClassifierKind::gaussian_nb;
    if (tag == "c45-tree") return ClassifierKind::c45_tree;
    throw ConfigError("unknown classifier '" + std::string(tag) + "' (expected svm-smo, gaussian-nb or c45-tree)");
}

ClassifierSpec::ClassifierSpec(Params params) : params_(std::move(params)) {}

ClassifierSpec ClassifierSpec::defaults(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::svm_smo: return svm();
        case ClassifierKind::gaussian_nb: return naive_bayes();
        case ClassifierKind::c45_tree: return tree();
    }
    return svm();
}

ClassifierKind ClassifierSpec::kind() const {
    return static_cast<ClassifierKind>(params_.index());
}

void ClassifierSpec::validate() const {
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, SvmParams>) {
                if (!(p.C > 0.0)) throw ConfigError("svm C must be > 0");
                if (!(p.tolerance > 0.0)) throw ConfigError("svm tolerance must be > 0");
                if (p.max_passes < 1) throw ConfigError("svm max_passes must be >= 1");
                if (!(p.coupling_tolerance > 0.0)) throw ConfigError("coupling tolerance must be > 0");
            } else if constexpr (std::is_same_v<T, NbParams>) {
                if (!(p.variance_floor > 0.0)) throw ConfigError("naive bayes variance floor must be > 0");
            } else {
                if (p.min_leaf < 1) throw ConfigError("tree min_leaf must be >= 1");
                if (!(p.pruning_cf > 0.0 && p.pruning_cf < 1.0))
                    throw ConfigError("tree pruning confidence must lie in (0,1)");
            }
        },
        params_);
}

void TrainingSet::add(std::span<const double> x, std::size_t label) {
    if (dim == 0 && labels.empty()) dim = x.size();
    if (x.size() != dim) throw DataError("training row has wrong arity");
    features.insert(features.end(), x.begin(), x.end());
    labels.push_back(label);
}

TrainingSet TrainingSet::from(std::span<const LabeledExample> examples, std::size_t dim) {
    TrainingSet set;
    set.dim = dim;
    for (const auto& e : examples) set.add(e.features, e.label);
    return set;
}

TrainedModel::TrainedModel(std::shared_ptr<const Model> model, std::string tag, std::size_t k, std::size_t dim)
    : model_(std::move(model)), tag_(std::move(tag)), k_(k), dim_(dim) {}

Posterior TrainedModel::predict(std::span<const double> x) const {
    if (x.size() != dim_)
        throw DataError("instance has " + std::to_string(x.size()) + " features, model expects " +
                        std::to_string(dim_));
    return model_->predict(x);
}

nlohmann::json TrainedModel::to_json() const {
    return {{"version", 1}, {"kind", tag_}, {"k", k_}, {"dim", dim_}, {"state", model_->to_json()}};
}

TrainedModel train(const ClassifierSpec& spec, const TrainingSet& pool, const ClassScheme& scheme) {
    spec.validate();
    if (pool.size() == 0) throw DataError("cannot train on an empty pool");
    const std::size_t k = scheme.k();
    for (auto label : pool.labels) {
        if (label >= k)
            throw DataError("label " + std::to_string(label) + " out of range for " + std::to_string(k) +
                            " classes");
    }
    const bool single = std::all_of(pool.labels.begin(), pool.labels.end(),
                                    [&](std::size_t l) { return l == pool.labels.front(); });
    std::shared_ptr<const Model> model;
    if (single) {
        model = std::make_shared<ConstantModel>(k, pool.labels.front());
    } else {
        switch (spec.kind()) {
            case ClassifierKind::svm_smo: model = fit_svm(pool, k, std::get<SvmParams>(spec.params())); break;
            case ClassifierKind::gaussian_nb:
                model = fit_naive_bayes(pool, k, std::get<NbParams>(spec.params()));
                break;
            case ClassifierKind::c45_tree: model = fit_tree(pool, k, std::get<TreeParams>(spec.params())); break;
        }
    }
    return TrainedModel(std::move(model), spec.tag(), k, pool.dim);
}

TrainedModel train(const ClassifierSpec& spec, std::span<const LabeledExample> pool, const ClassScheme& scheme) {
    if (pool.empty()) throw DataError("cannot train on an empty pool");
    return train(spec, TrainingSet::from(pool, pool.front().features.size()), scheme);
}

Posterior predict_posterior(const TrainedModel& model, const Instance& x) { return model.predict(x.features); }

}  // namespace transduct
