#include <cmath>
#include <random>

#include "doctest.h"
#include "transduct/classifier.hpp"
#include "transduct/tree.hpp"

using namespace transduct;

namespace {

double H(double p) { return p <= 0 || p >= 1 ? 0.0 : -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

double binomial_cdf(std::size_t n, std::size_t e, double p) {
    double total = 0.0, term = std::pow(1 - p, static_cast<double>(n));  // i = 0
    for (std::size_t i = 0; i <= e; ++i) {
        total += term;
        term *= static_cast<double>(n - i) / static_cast<double>(i + 1) * p / (1 - p);
    }
    return total;
}

}  // namespace

TEST_CASE("gain ratio of a pure halving") {
    const std::vector<std::size_t> parent{1, 1, 0, 0};
    const auto s = split_score(parent, {{1, 1}, {0, 0}});
    CHECK(s.gain == doctest::Approx(1.0));
    CHECK(s.split_info == doctest::Approx(1.0));
    CHECK(s.ratio == doctest::Approx(1.0));
}

TEST_CASE("gain ratio of an uneven split") {
    const std::vector<std::size_t> parent{1, 1, 0, 0};
    const auto s = split_score(parent, {{1, 1, 0}, {0}});
    const double gain = 1.0 - 0.75 * H(2.0 / 3.0);
    const double split = H(0.75);
    CHECK(s.gain == doctest::Approx(gain).epsilon(1e-12));
    CHECK(s.split_info == doctest::Approx(split).epsilon(1e-12));
    CHECK(s.ratio == doctest::Approx(gain / split).epsilon(1e-12));
    CHECK(s.gain == doctest::Approx(0.3113).epsilon(1e-3));
    CHECK(s.split_info == doctest::Approx(0.8113).epsilon(1e-3));
    CHECK(s.ratio == doctest::Approx(0.3837).epsilon(1e-3));
}

TEST_CASE("single nonempty child has zero ratio") {
    const std::vector<std::size_t> parent{1, 0, 0};
    CHECK(gain_ratio(parent, {{1, 0, 0}, {}}) == 0.0);
    CHECK_THROWS_AS(gain_ratio(parent, {{1, 1}, {0}}), std::invalid_argument);
}

TEST_CASE("binomial upper bound solves the tail equation") {
    CHECK(binomial_upper_bound(4, 0, 0.25) == doctest::Approx(1.0 - std::pow(0.25, 0.25)));
    CHECK(binomial_upper_bound(5, 5, 0.25) == 1.0);
    for (std::size_t n : {3u, 6u, 10u, 25u}) {
        for (std::size_t e = 1; e < n; e += 2) {
            const double u = binomial_upper_bound(n, e, 0.25);
            CHECK(u > static_cast<double>(e) / static_cast<double>(n));
            CHECK(binomial_cdf(n, e, u) == doctest::Approx(0.25).epsilon(1e-9));
        }
    }
}

TEST_CASE("pure leaf of three uses the Laplace estimate") {
    TrainingSet pool;
    pool.dim = 1;
    for (int i = 0; i < 3; ++i) pool.add(std::vector<double>{0.0 + 0.01 * i}, 0);
    for (int i = 0; i < 3; ++i) pool.add(std::vector<double>{1.0 - 0.01 * i}, 1);
    const auto m = train(ClassifierSpec::tree(), pool, ClassScheme(3));
    const auto p = m.predict(std::vector<double>{0.0});
    CHECK(p[0] == doctest::Approx(4.0 / 6.0).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(p[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    const auto& tree = dynamic_cast<const TreeModel&>(m.model());
    CHECK(tree.nodes().size() == 3);
    CHECK(tree.nodes()[0].threshold == doctest::Approx(0.5));
}

TEST_CASE("tree structure invariants") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        TrainingSet pool;
        pool.dim = 3;
        for (int i = 0; i < 40; ++i) {
            const std::vector<double> x{u(gen), u(gen), u(gen)};
            pool.add(x, (x[0] + 0.3 * u(gen) > 0.6) + (x[1] > 0.5));
        }
        const auto m = train(ClassifierSpec::tree(), pool, ClassScheme(3));
        const auto& tree = dynamic_cast<const TreeModel&>(m.model());
        const auto& nodes = tree.nodes();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            std::size_t total = 0;
            for (auto c : nodes[i].counts) total += c;
            if (nodes[i].leaf()) {
                CHECK(total >= 1);
                continue;
            }
            // Children partition the parent and respect min_leaf.
            const auto& l = nodes[static_cast<std::size_t>(nodes[i].left)];
            const auto& r = nodes[static_cast<std::size_t>(nodes[i].right)];
            std::size_t nl = 0, nr = 0;
            for (std::size_t c = 0; c < 3; ++c) {
                CHECK(l.counts[c] + r.counts[c] == nodes[i].counts[c]);
                nl += l.counts[c];
                nr += r.counts[c];
            }
            CHECK(nl >= 2);
            CHECK(nr >= 2);
            CHECK(nodes[i].left > static_cast<int>(i));
        }
        // Every training point reaches a leaf whose posterior is its Laplace estimate.
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const auto leaf = tree.leaf_for(pool.row(i));
            CHECK(nodes[leaf].leaf());
            CHECK(tree.predict(pool.row(i)) == tree.leaf_posterior(leaf));
        }
    }
}
