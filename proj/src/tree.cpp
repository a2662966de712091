#include "transduct/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

namespace transduct {

namespace {

double entropy(const std::map<std::size_t, std::size_t>& counts, std::size_t total) {
    if (total == 0) return 0.0;
    double h = 0.0;
    for (const auto& [label, count] : counts) {
        if (count == 0) continue;
        const double p = static_cast<double>(count) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

double entropy(std::span<const std::size_t> counts) {
    std::size_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) return 0.0;
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

double binomial_cdf(std::size_t n, std::size_t e, double p) {
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return e >= n ? 1.0 : 0.0;
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    const double lgn = std::lgamma(static_cast<double>(n) + 1.0);
    double sum = 0.0;
    for (std::size_t i = 0; i <= e; ++i) {
        const double di = static_cast<double>(i);
        const double log_term = lgn - std::lgamma(di + 1.0) - std::lgamma(static_cast<double>(n - i) + 1.0) +
                                di * lp + static_cast<double>(n - i) * lq;
        sum += std::exp(log_term);
    }
    return std::min(sum, 1.0);
}

std::size_t majority_errors(std::span<const std::size_t> counts) {
    std::size_t total = 0;
    std::size_t best = 0;
    for (auto c : counts) {
        total += c;
        best = std::max(best, c);
    }
    return total - best;
}

class TreeBuilder {
public:
    TreeBuilder(const TrainingSet& pool, std::size_t k, const TreeParams& params)
        : pool_(pool), k_(k), params_(params) {}

    std::vector<TreeModel::Node> build() {
        std::vector<std::size_t> all(pool_.size());
        std::iota(all.begin(), all.end(), 0);
        grow(all);
        prune(0);
        return compact();
    }

private:
    struct Candidate {
        std::size_t attribute = 0;
        double threshold = 0.0;
        double gain = 0.0;
        double ratio = 0.0;
    };

    std::vector<std::size_t> count(const std::vector<std::size_t>& rows) const {
        std::vector<std::size_t> counts(k_, 0);
        for (auto r : rows) ++counts[pool_.labels[r]];
        return counts;
    }

    int grow(const std::vector<std::size_t>& rows) {
        const int index = static_cast<int>(nodes_.size());
        nodes_.push_back({count(rows), -1, 0.0, -1, -1});
        const auto counts = nodes_[index].counts;

        const bool pure = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
        if (pure || rows.size() < 2 * params_.min_leaf) return index;

        const double parent_h = entropy(counts);
        std::vector<Candidate> candidates;
        std::vector<std::size_t> sorted = rows;
        for (std::size_t a = 0; a < pool_.dim; ++a) {
            std::stable_sort(sorted.begin(), sorted.end(), [&](std::size_t l, std::size_t r) {
                return pool_.features[l * pool_.dim + a] < pool_.features[r * pool_.dim + a];
            });
            std::vector<std::size_t> left(k_, 0);
            std::vector<std::size_t> right = counts;
            for (std::size_t pos = 0; pos + 1 < sorted.size(); ++pos) {
                const auto row = sorted[pos];
                ++left[pool_.labels[row]];
                --right[pool_.labels[row]];
                const double v = pool_.features[row * pool_.dim + a];
                const double next = pool_.features[sorted[pos + 1] * pool_.dim + a];
                if (!(v < next)) continue;
                const std::size_t n_left = pos + 1;
                const std::size_t n_right = sorted.size() - n_left;
                if (n_left < params_.min_leaf || n_right < params_.min_leaf) continue;

                const double n = static_cast<double>(sorted.size());
                const double wl = static_cast<double>(n_left) / n;
                const double wr = static_cast<double>(n_right) / n;
                const double gain = parent_h - wl * entropy(left) - wr * entropy(right);
                const double split_info = -wl * std::log2(wl) - wr * std::log2(wr);
                if (gain <= 1e-12 || split_info <= 0.0) continue;
                double threshold = 0.5 * (v + next);
                if (!(threshold < next)) threshold = v;
                candidates.push_back({a, threshold, gain, gain / split_info});
            }
        }
        if (candidates.empty()) return index;

        double mean_gain = 0.0;
        for (const auto& c : candidates) mean_gain += c.gain;
        mean_gain /= static_cast<double>(candidates.size());

        const Candidate* best = nullptr;
        for (const auto& c : candidates) {
            if (c.gain < mean_gain - 1e-12) continue;
            if (!best || c.ratio > best->ratio ||
                (c.ratio == best->ratio &&
                 (c.attribute < best->attribute || (c.attribute == best->attribute && c.threshold < best->threshold))))
                best = &c;
        }

        std::vector<std::size_t> left_rows, right_rows;
        for (auto r : rows) {
            (pool_.features[r * pool_.dim + best->attribute] <= best->threshold ? left_rows : right_rows).push_back(r);
        }
        const auto attribute = best->attribute;
        const auto threshold = best->threshold;
        const int left = grow(left_rows);
        const int right = grow(right_rows);
        auto& node = nodes_[index];
        node.attribute = static_cast<int>(attribute);
        node.threshold = threshold;
        node.left = left;
        node.right = right;
        return index;
    }

    double leaf_estimate(const std::vector<std::size_t>& counts) const {
        std::size_t n = 0;
        for (auto c : counts) n += c;
        if (n == 0) return 0.0;
        return static_cast<double>(n) * binomial_upper_bound(n, majority_errors(counts), params_.pruning_cf);
    }

    // Returns the pessimistic error estimate of the (possibly pruned) subtree.
    double prune(int index) {
        auto& node = nodes_[index];
        const double as_leaf = leaf_estimate(node.counts);
        if (node.leaf()) return as_leaf;
        const double subtree = prune(node.left) + prune(node.right);
        if (as_leaf <= subtree + 1e-9) {
            auto& n = nodes_[index];
            n.attribute = -1;
            n.left = n.right = -1;
            return as_leaf;
        }
        return subtree;
    }

    // Drops nodes orphaned by pruning, preserving pre-order numbering.
    std::vector<TreeModel::Node> compact() const {
        std::vector<TreeModel::Node> out;
        std::function<int(int)> copy = [&](int index) -> int {
            const int at = static_cast<int>(out.size());
            out.push_back(nodes_[index]);
            if (!nodes_[index].leaf()) {
                const int l = copy(nodes_[index].left);
                const int r = copy(nodes_[index].right);
                out[at].left = l;
                out[at].right = r;
            }
            return at;
        };
        copy(0);
        return out;
    }

    const TrainingSet& pool_;
    std::size_t k_;
    TreeParams params_;
    std::vector<TreeModel::Node> nodes_;
};

}  // namespace

SplitScore split_score(std::span<const std::size_t> parent, const std::vector<std::vector<std::size_t>>& children) {
    std::map<std::size_t, std::size_t> parent_counts;
    for (auto label : parent) ++parent_counts[label];
    std::map<std::size_t, std::size_t> child_total;
    for (const auto& child : children)
        for (auto label : child) ++child_total[label];
    if (child_total != parent_counts) throw std::invalid_argument("children do not partition the parent labels");

    const std::size_t n = parent.size();
    SplitScore score;
    if (n == 0) return score;
    score.gain = entropy(parent_counts, n);
    for (const auto& child : children) {
        if (child.empty()) continue;
        std::map<std::size_t, std::size_t> counts;
        for (auto label : child) ++counts[label];
        const double w = static_cast<double>(child.size()) / static_cast<double>(n);
        score.gain -= w * entropy(counts, child.size());
        score.split_info -= w * std::log2(w);
    }
    score.ratio = score.split_info > 0.0 ? score.gain / score.split_info : 0.0;
    return score;
}

double gain_ratio(std::span<const std::size_t> parent, const std::vector<std::vector<std::size_t>>& children) {
    return split_score(parent, children).ratio;
}

double binomial_upper_bound(std::size_t n, std::size_t errors, double cf) {
    if (n == 0 || errors >= n) return 1.0;
    if (errors == 0) return 1.0 - std::pow(cf, 1.0 / static_cast<double>(n));
    double lo = static_cast<double>(errors) / static_cast<double>(n);
    double hi = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (binomial_cdf(n, errors, mid) > cf)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

TreeModel::TreeModel(std::size_t k, std::vector<Node> nodes) : k_(k), nodes_(std::move(nodes)) {}

std::size_t TreeModel::leaf_for(std::span<const double> x) const {
    std::size_t index = 0;
    while (!nodes_[index].leaf()) {
        const auto& node = nodes_[index];
        index = static_cast<std::size_t>(x[static_cast<std::size_t>(node.attribute)] <= node.threshold ? node.left
                                                                                                        : node.right);
    }
    return index;
}

Posterior TreeModel::leaf_posterior(std::size_t node) const {
    const auto& counts = nodes_.at(node).counts;
    double total = 0.0;
    for (auto c : counts) total += static_cast<double>(c);
    std::vector<double> probs(k_);
    for (std::size_t c = 0; c < k_; ++c)
        probs[c] = (static_cast<double>(counts[c]) + 1.0) / (total + static_cast<double>(k_));
    return Posterior(std::move(probs));
}

Posterior TreeModel::predict(std::span<const double> x) const { return leaf_posterior(leaf_for(x)); }

nlohmann::json TreeModel::to_json() const {
    std::function<nlohmann::json(std::size_t)> dump = [&](std::size_t index) -> nlohmann::json {
        const auto& node = nodes_[index];
        nlohmann::json j = {{"counts", node.counts}};
        if (!node.leaf()) {
            j["attribute"] = node.attribute;
            j["threshold"] = node.threshold;
            j["left"] = dump(static_cast<std::size_t>(node.left));
            j["right"] = dump(static_cast<std::size_t>(node.right));
        }
        return j;
    };
    return {{"root", dump(0)}};
}

std::shared_ptr<const TreeModel> fit_tree(const TrainingSet& pool, std::size_t k, const TreeParams& params) {
    if (pool.size() == 0) throw std::invalid_argument("tree needs a nonempty pool");
    return std::make_shared<TreeModel>(k, TreeBuilder(pool, k, params).build());
}

}  // namespace transduct
