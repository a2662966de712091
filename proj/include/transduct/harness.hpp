#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "transduct/dataset.hpp"
#include "transduct/transduction.hpp"

namespace transduct {

/// Labels a raw dataset for a k-category scheme and min-max normalizes it.
/// Density readings, when every instance has one, are rebinned by equal
/// frequency; otherwise existing labels are kept (and checked against k).
Dataset prepare(const Dataset& raw, std::size_t k);

/// Stratified development split: the first ceil(20%) of every class, in id
/// order, form the labeled pool; the rest is transduced.
Problem development_split(const Dataset& prepared);

const Dataset& find_dataset(std::span<const Dataset> data, const std::string& name);

struct ExperimentGrid {
    std::vector<std::string> train_names;
    std::vector<std::string> test_names;
    std::vector<double> gammas{0.7, 0.8, 0.9};
    std::vector<std::size_t> schemes{3, 5};
    std::vector<PolicyKind> policies{PolicyKind::liberal, PolicyKind::strict};
    std::size_t phi = 10;

    void validate() const;
};

/// One ITSVM run per (train, test, scheme) with train != test, ordered by
/// train name, test name, then scheme. Cells run on up to `jobs` threads; the
/// result order does not depend on `jobs`.
std::vector<RunReport> run_matrix(const ExperimentGrid& grid, std::span<const Dataset> data,
                                  const ThresholdConfig& config, std::size_t jobs = 1);

struct CtaCombo {
    std::vector<std::string> parts;
    std::string test;
};

/// The six training combinations evaluated for cumulative training.
std::vector<CtaCombo> preset_cta_combos();

/// Concatenates each combo's parts (labeled per part, normalized jointly) and
/// runs ITSVM against the test set. Ordered by scheme, then combo.
std::vector<RunReport> run_cta(std::span<const CtaCombo> combos, std::span<const Dataset> data,
                               std::span<const std::size_t> schemes, const ThresholdConfig& config,
                               std::size_t jobs = 1);

struct BenchmarkRow {
    std::string method;  // "transductive" or "inductive-baseline"
    std::string train;
    std::string test;
    double accuracy = 0.0;  // percent over all test instances
    std::size_t pseudo_labeled = 0;
};

/// Transductive accuracy scores pseudo-labels as given and the remainder with
/// the SVM refit on the final pool; the baseline is an SVM fit once on the
/// labeled pool. When train and test are the same dataset the development
/// split supplies both pools.
std::vector<BenchmarkRow> benchmark_compare(const Dataset& train, const Dataset& test, double gamma,
                                            std::size_t scheme, const ThresholdConfig& config);

struct SweepRow {
    std::string training;
    std::size_t categories = 0;
    double gamma = 0.0;
    PolicyKind policy = PolicyKind::liberal;
    std::size_t total = 0;
    std::size_t labeled = 0;
    std::size_t remaining = 0;

    double labeled_percent() const;
};

/// Self-transduction of one dataset over the development split, one row per
/// (gamma, scheme, policy) in that nesting order.
std::vector<SweepRow> sweep(const Dataset& training, std::span<const double> gammas,
                            std::span<const std::size_t> schemes, std::span<const PolicyKind> policies,
                            const ThresholdConfig& config);

}  // namespace transduct
