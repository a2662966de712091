#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "transduct/classifier.hpp"

namespace transduct {

struct SplitScore {
    double gain = 0.0;
    double split_info = 0.0;
    double ratio = 0.0;
};

/// Information gain, split information and their ratio (base-2 entropies).
/// Throws std::invalid_argument when the children do not partition the parent.
SplitScore split_score(std::span<const std::size_t> parent, const std::vector<std::vector<std::size_t>>& children);
double gain_ratio(std::span<const std::size_t> parent, const std::vector<std::vector<std::size_t>>& children);

/// Upper limit of the binomial error rate: the p solving
/// P(X <= errors; n, p) = cf. Returns 1 when errors >= n.
double binomial_upper_bound(std::size_t n, std::size_t errors, double cf);

class TreeModel final : public Model {
public:
    struct Node {
        std::vector<std::size_t> counts;  // training class counts at this node
        int attribute = -1;               // -1 marks a leaf
        double threshold = 0.0;           // x[attribute] <= threshold goes left
        int left = -1;
        int right = -1;

        bool leaf() const { return attribute < 0; }
    };

    TreeModel(std::size_t k, std::vector<Node> nodes);

    Posterior predict(std::span<const double> x) const override;
    nlohmann::json to_json() const override;

    /// Index of the leaf reached by x.
    std::size_t leaf_for(std::span<const double> x) const;
    /// Laplace-smoothed class frequencies of a node.
    Posterior leaf_posterior(std::size_t node) const;
    const std::vector<Node>& nodes() const { return nodes_; }

private:
    std::size_t k_;
    std::vector<Node> nodes_;  // nodes_[0] is the root
};

/// Binary threshold splits chosen by gain ratio among candidates whose gain
/// is at least the mean gain; pessimistic pruning at `pruning_cf`.
std::shared_ptr<const TreeModel> fit_tree(const TrainingSet& pool, std::size_t k, const TreeParams& params);

}  // namespace transduct
