#include "transduct/transduction.hpp"

#include <stdexcept>

namespace transduct {

void ThresholdConfig::validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw ConfigError("gamma must lie in the range [0,1], got " + std::to_string(gamma));
    if (phi < 1) throw ConfigError("phi must be a positive integer");
}

std::string to_string(PolicyKind kind) { return kind == PolicyKind::liberal ? "liberal" : "strict"; }

std::vector<ClassifierSpec> Policy::default_ensemble() {
    return {ClassifierSpec::svm(), ClassifierSpec::naive_bayes(), ClassifierSpec::tree()};
}

Policy Policy::liberal(std::vector<ClassifierSpec> ensemble) {
    return {PolicyKind::liberal, std::move(ensemble), true};
}

Policy Policy::strict(std::vector<ClassifierSpec> ensemble) { return {PolicyKind::strict, std::move(ensemble), true}; }

Policy Policy::itsvm() { return strict({ClassifierSpec::svm()}); }

void Policy::validate() const {
    if (ensemble.empty()) throw ConfigError("policy ensemble must not be empty");
    for (const auto& spec : ensemble) spec.validate();
}

std::optional<Verdict> decide_label(std::span<const Posterior> posteriors, double gamma, PolicyKind kind,
                                    bool require_agreement) {
    if (posteriors.empty()) throw std::invalid_argument("decide_label needs at least one posterior");

    if (kind == PolicyKind::liberal) {
        std::optional<std::size_t> winner;
        for (std::size_t m = 0; m < posteriors.size(); ++m) {
            const double top = posteriors[m].max();
            if (top < gamma) continue;
            if (!winner || top > posteriors[*winner].max()) winner = m;
        }
        if (!winner) return std::nullopt;
        return Verdict{posteriors[*winner].argmax(), posteriors[*winner].max(), winner};
    }

    const std::size_t label = posteriors.front().argmax();
    double confidence = posteriors.front().max();
    for (const auto& p : posteriors) {
        if (p.max() < gamma) return std::nullopt;
        if (require_agreement && p.argmax() != label) return std::nullopt;
        confidence = std::min(confidence, p.max());
    }
    return Verdict{label, confidence, std::nullopt};
}

std::map<std::size_t, AssignedLabel> RunReport::assignments() const {
    std::map<std::size_t, AssignedLabel> out;
    for (const auto& round : rounds) {
        for (const auto& d : round.decisions) out[d.id] = {d.label, d.confidence, round.round, d.source};
    }
    return out;
}

bool RunReport::operator==(const RunReport& other) const {
    return train_name == other.train_name && test_name == other.test_name && categories == other.categories &&
           policy == other.policy && ensemble == other.ensemble && require_agreement == other.require_agreement &&
           config.gamma == other.config.gamma && config.phi == other.config.phi &&
           total_unlabeled == other.total_unlabeled && rounds == other.rounds &&
           labeled_count == other.labeled_count && remaining_ids == other.remaining_ids;
}

EnsembleMember EnsembleMember::from_spec(const ClassifierSpec& spec) {
    return {spec.tag(), [spec](const TrainingSet& pool, const ClassScheme& scheme) { return train(spec, pool, scheme); }};
}

RunReport run_transduction(std::span<const LabeledExample> labeled, std::span<const UnlabeledExample> unlabeled,
                           PolicyKind kind, bool require_agreement, std::span<const EnsembleMember> members,
                           const ClassScheme& scheme, const ThresholdConfig& config) {
    config.validate();
    if (labeled.empty()) throw DataError("transduction needs a nonempty labeled pool");
    if (members.empty()) throw ConfigError("policy ensemble must not be empty");

    RunReport report;
    report.categories = scheme.k();
    report.policy = to_string(kind);
    for (const auto& m : members) report.ensemble.push_back(m.tag);
    report.require_agreement = require_agreement;
    report.config = config;
    report.total_unlabeled = unlabeled.size();

    TrainingSet pool = TrainingSet::from(labeled, labeled.front().features.size());
    std::vector<std::size_t> remaining(unlabeled.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;

    std::size_t passive = 0;
    std::vector<TrainedModel> models;
    std::vector<Posterior> posteriors(members.size());
    while (!remaining.empty() && passive < config.phi) {
        RoundLog log;
        log.round = report.rounds.size() + 1;

        models.clear();
        for (const auto& m : members) models.push_back(m.fit(pool, scheme));

        std::vector<std::size_t> kept;
        std::vector<std::size_t> accepted;
        for (std::size_t idx : remaining) {
            const auto& u = unlabeled[idx];
            for (std::size_t m = 0; m < models.size(); ++m) posteriors[m] = models[m].predict(u.features);
            const auto verdict = decide_label(posteriors, config.gamma, kind, require_agreement);
            if (!verdict) {
                kept.push_back(idx);
                continue;
            }
            log.decisions.push_back({u.id, verdict->label, verdict->confidence,
                                     verdict->member ? members[*verdict->member].tag : "consensus"});
            accepted.push_back(idx);
        }
        for (std::size_t i = 0; i < accepted.size(); ++i)
            pool.add(unlabeled[accepted[i]].features, log.decisions[i].label);
        remaining = std::move(kept);

        passive = log.decisions.empty() ? passive + 1 : 0;
        report.labeled_count += log.decisions.size();
        log.passive_counter_after = passive;
        log.labeled_pool = pool.size();
        log.unlabeled_pool = remaining.size();
        report.rounds.push_back(std::move(log));
    }
    for (std::size_t idx : remaining) report.remaining_ids.push_back(unlabeled[idx].id);
    return report;
}

RunReport run_transduction(std::span<const LabeledExample> labeled, std::span<const UnlabeledExample> unlabeled,
                           const Policy& policy, const ClassScheme& scheme, const ThresholdConfig& config) {
    policy.validate();
    std::vector<EnsembleMember> members;
    for (const auto& spec : policy.ensemble) members.push_back(EnsembleMember::from_spec(spec));
    return run_transduction(labeled, unlabeled, policy.kind, policy.require_agreement, members, scheme, config);
}

RunReport run_transduction(const Problem& problem, const Policy& policy, const ClassScheme& scheme,
                           const ThresholdConfig& config) {
    auto report = run_transduction(problem.labeled, problem.unlabeled, policy, scheme, config);
    report.train_name = problem.train_name;
    report.test_name = problem.test_name;
    return report;
}

RunReport run_itsvm(std::span<const LabeledExample> labeled, std::span<const UnlabeledExample> unlabeled,
                    const ClassScheme& scheme, const ThresholdConfig& config) {
    return run_transduction(labeled, unlabeled, Policy::itsvm(), scheme, config);
}

RunReport run_itsvm(const Problem& problem, const ClassScheme& scheme, const ThresholdConfig& config) {
    return run_transduction(problem, Policy::itsvm(), scheme, config);
}

std::vector<LabeledExample> final_labeled_pool(const Problem& problem, const RunReport& report) {
    std::map<std::size_t, const UnlabeledExample*> by_id;
    for (const auto& u : problem.unlabeled) by_id[u.id] = &u;
    std::vector<LabeledExample> pool = problem.labeled;
    for (const auto& round : report.rounds) {
        for (const auto& d : round.decisions) pool.push_back({d.id, by_id.at(d.id)->features, d.label});
    }
    return pool;
}

nlohmann::json to_json(const RunReport& report, const std::optional<ClassScheme>& scheme) {
    nlohmann::json rounds = nlohmann::json::array();
    for (const auto& r : report.rounds) {
        nlohmann::json decisions = nlohmann::json::array();
        for (const auto& d : r.decisions) {
            nlohmann::json j = {{"id", d.id}, {"label", d.label}, {"confidence", d.confidence}, {"source", d.source}};
            if (scheme) j["class"] = scheme->name(d.label);
            decisions.push_back(std::move(j));
        }
        rounds.push_back({{"round", r.round},
                          {"decisions", std::move(decisions)},
                          {"passive_counter", r.passive_counter_after},
                          {"labeled_pool", r.labeled_pool},
                          {"unlabeled_pool", r.unlabeled_pool}});
    }
    return {{"train", report.train_name},
            {"test", report.test_name},
            {"categories", report.categories},
            {"policy", report.policy},
            {"ensemble", report.ensemble},
            {"require_agreement", report.require_agreement},
            {"gamma", report.config.gamma},
            {"phi", report.config.phi},
            {"total_unlabeled", report.total_unlabeled},
            {"labeled_count", report.labeled_count},
            {"iterations", report.iterations()},
            {"remaining_ids", report.remaining_ids},
            {"rounds", std::move(rounds)}};
}

std::string to_csv_row(const RunReport& report) {
    return report.train_name + "," + report.test_name + "," + std::to_string(report.total_unlabeled) + "," +
           std::to_string(report.labeled_count) + "," + std::to_string(report.iterations());
}

}  // namespace transduct
