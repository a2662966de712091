#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "transduct/calibration.hpp"

using namespace transduct;

TEST_CASE("two classes reproduce the pairwise estimate") {
    const std::vector<double> r{0, 0.7, 0.3, 0};
    const auto p = pairwise_couple(r, 2);
    CHECK(p[0] == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(p[1] == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("symmetric input gives the uniform posterior") {
    const std::vector<double> r(9, 0.5);
    for (double v : pairwise_couple(r, 3)) CHECK(std::abs(v - 1.0 / 3.0) <= 1e-9);
}

TEST_CASE("three-class example matches the fixed-point oracle") {
    std::vector<double> r(9, 0.0);
    r[0 * 3 + 1] = 0.9;
    r[0 * 3 + 2] = 0.9;
    r[1 * 3 + 2] = 0.5;
    const std::vector<std::vector<double>> full{{0, 0.9, 0.9}, {0.1, 0, 0.5}, {0.1, 0.5, 0}};
    const auto p = pairwise_couple(r, 3);
    const auto want = oracle::couple(full);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(p[i] - want[i]) <= 1e-6);
    CHECK(std::abs(p[1] - p[2]) <= 1e-6);
}

TEST_CASE("random inputs match the oracle and stay valid") {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> prob(0.02, 0.98);
    for (int t = 0; t < 100; ++t) {
        const std::size_t k = 3 + gen() % 3;
        std::vector<double> flat(k * k, 0.0);
        std::vector<std::vector<double>> r(k, std::vector<double>(k, 0.0));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j) {
                flat[i * k + j] = r[i][j] = prob(gen);
                r[j][i] = 1.0 - r[i][j];
            }
        const auto p = pairwise_couple(flat, k);
        const auto want = oracle::couple(r);
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            CHECK(std::abs(p[i] - want[i]) <= 1e-6);
            CHECK(p[i] >= 0.0);
            sum += p[i];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("out-of-range pairwise probability is rejected") {
    std::vector<double> r(9, 0.0);
    r[1] = 1.5;
    CHECK_THROWS_AS(pairwise_couple(r, 3), std::invalid_argument);
    CHECK_THROWS_AS(pairwise_couple(std::vector<double>(4, 0.5), 3), std::invalid_argument);
}
