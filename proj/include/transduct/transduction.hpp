#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "transduct/classifier.hpp"
#include "transduct/dataset.hpp"

namespace transduct {

struct ThresholdConfig {
    double gamma = 0.8;  // confidence threshold
    std::size_t phi = 10;  // consecutive rounds without a label before giving up

    void validate() const;
};

enum class PolicyKind { liberal, strict };

std::string to_string(PolicyKind kind);

/// Gating rule plus an ensemble in priority order.
struct Policy {
    PolicyKind kind = PolicyKind::strict;
    std::vector<ClassifierSpec> ensemble;
    /// Strict only: members must also agree on the class, not just clear gamma.
    bool require_agreement = true;

    static std::vector<ClassifierSpec> default_ensemble();
    static Policy liberal(std::vector<ClassifierSpec> ensemble = default_ensemble());
    static Policy strict(std::vector<ClassifierSpec> ensemble = default_ensemble());
    /// Strict policy over a lone SMO-trained SVM.
    static Policy itsvm();

    void validate() const;
};

/// Outcome of gating one instance's ensemble posteriors.
struct Verdict {
    std::size_t label = 0;
    double confidence = 0.0;
    /// Winning member for liberal gating; empty for strict consensus.
    std::optional<std::size_t> member;
};

/// Liberal: any member's top posterior >= gamma labels the instance; the
/// member with the highest top posterior wins, exact ties going to the earlier
/// member. Strict: every member must clear gamma (and agree on the argmax when
/// `require_agreement`); confidence is the smallest of the maxima.
std::optional<Verdict> decide_label(std::span<const Posterior> posteriors, double gamma, PolicyKind kind,
                                    bool require_agreement = true);

struct LabelDecision {
    std::size_t id = 0;
    std::size_t label = 0;
    double confidence = 0.0;
    std::string source;  // member tag (liberal) or "consensus" (strict)

    bool operator==(const LabelDecision&) const = default;
};

struct RoundLog {
    std::size_t round = 0;
    std::vector<LabelDecision> decisions;
    std::size_t passive_counter_after = 0;
    std::size_t labeled_pool = 0;
    std::size_t unlabeled_pool = 0;

    bool operator==(const RoundLog&) const = default;
};

struct RunReport {
    std::string train_name;
    std::string test_name;
    std::size_t categories = 0;
    std::string policy;
    std::vector<std::string> ensemble;
    bool require_agreement = true;
    ThresholdConfig config;
    std::size_t total_unlabeled = 0;
    std::vector<RoundLog> rounds;
    std::size_t labeled_count = 0;
    std::vector<std::size_t> remaining_ids;

    std::size_t iterations() const { return rounds.size(); }
    /// Pseudo-label provenance keyed by unlabeled-pool id.
    std::map<std::size_t, AssignedLabel> assignments() const;

    bool operator==(const RunReport& other) const;
};

using Trainer = std::function<TrainedModel(const TrainingSet&, const ClassScheme&)>;

struct EnsembleMember {
    std::string tag;
    Trainer fit;

    static EnsembleMember from_spec(const ClassifierSpec& spec);
};

/// The incremental loop: train every member on L, gate every instance still
/// in U, move all accepted instances into L with their pseudo-labels, and
/// stop once U is empty or `phi` consecutive rounds labeled nothing.
RunReport run_transduction(std::span<const LabeledExample> labeled, std::span<const UnlabeledExample> unlabeled,
                           PolicyKind kind, bool require_agreement, std::span<const EnsembleMember> members,
                           const ClassScheme& scheme, const ThresholdConfig& config);
RunReport run_transduction(std::span<const LabeledExample> labeled, std::span<const UnlabeledExample> unlabeled,
                           const Policy& policy, const ClassScheme& scheme, const ThresholdConfig& config);
RunReport run_transduction(const Problem& problem, const Policy& policy, const ClassScheme& scheme,
                           const ThresholdConfig& config);

RunReport run_itsvm(std::span<const LabeledExample> labeled, std::span<const UnlabeledExample> unlabeled,
                    const ClassScheme& scheme, const ThresholdConfig& config);
RunReport run_itsvm(const Problem& problem, const ClassScheme& scheme, const ThresholdConfig& config);

/// Labeled pool after the run: the original examples followed by pseudo-labeled
/// ones in the order they were accepted.
std::vector<LabeledExample> final_labeled_pool(const Problem& problem, const RunReport& report);

nlohmann::json to_json(const RunReport& report, const std::optional<ClassScheme>& scheme = std::nullopt);
/// "train,test,num_inst,inst_labeled,iterations"
std::string to_csv_row(const RunReport& report);

}  // namespace transduct
