#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "transduct/dataset.hpp"

namespace transduct {

struct SyntheticDatasetSpec {
    std::string name;
    std::size_t count = 0;
    /// Added to every mean coordinate.
    double drift = 0.0;
    /// Multiplies the shared spread.
    double spread_scale = 1.0;
};

/// Gaussian blobs with one mean vector per density class. Each instance also
/// carries a continuous density (class + U(0,1)) / k so it can be rebinned.
struct SyntheticSpec {
    std::size_t k = 5;
    std::vector<std::vector<double>> means;  // k vectors of schema arity, inside [0,1]
    double sigma = 0.08;
    std::vector<SyntheticDatasetSpec> datasets;
    std::uint64_t seed = 0;

    /// Five yearly datasets sized 28, 46, 44, 46 and 60; 2007 and 2008 are
    /// degraded (mean drift and doubled spread).
    static SyntheticSpec preset(std::uint64_t seed);
    /// Means evenly spaced along a monotone path through [0.2, 0.8]^dim.
    static std::vector<std::vector<double>> default_means(std::size_t k, std::size_t dim);

    void validate() const;
};

std::vector<Dataset> gen_synthetic(const SyntheticSpec& spec, const FeatureSchema& schema = {});

/// Portable deterministic generator (splitmix-seeded xoshiro256**).
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    std::uint64_t next();
    double uniform();  // [0,1)
    double normal();   // Box-Muller
    std::size_t below(std::size_t n);

private:
    std::uint64_t s_[4];
};

}  // namespace transduct
