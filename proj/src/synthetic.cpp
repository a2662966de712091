#include "transduct/synthetic.hpp"

#include <cmath>
#include <numbers>

namespace transduct {

namespace {

std::uint64_t splitmix(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
    for (auto& s : s_) s = splitmix(seed);
}

std::uint64_t Rng::next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

std::vector<std::vector<double>> SyntheticSpec::default_means(std::size_t k, std::size_t dim) {
    // Brightness-like indices rise with density, vegetation/water ones fall.
    static constexpr double kDirection[] = {1.0, -1.0, 0.5, 1.0, -0.5, -1.0, 0.75};
    std::vector<std::vector<double>> means(k, std::vector<double>(dim));
    for (std::size_t c = 0; c < k; ++c) {
        const double t = k > 1 ? 2.0 * static_cast<double>(c) / static_cast<double>(k - 1) - 1.0 : 0.0;
        for (std::size_t d = 0; d < dim; ++d) means[c][d] = 0.5 + 0.3 * kDirection[d % 7] * t;
    }
    return means;
}

SyntheticSpec SyntheticSpec::preset(std::uint64_t seed) {
    SyntheticSpec spec;
    spec.k = 5;
    spec.means = default_means(spec.k, 7);
    spec.seed = seed;
    spec.datasets = {{"2003", 28, 0.0, 1.0},
                     {"2005", 46, 0.0, 1.0},
                     {"2007", 44, 0.1, 2.0},
                     {"2008", 46, -0.1, 2.0},
                     {"2009", 60, 0.0, 1.0}};
    return spec;
}

void SyntheticSpec::validate() const {
    if (k < 2) throw ConfigError("synthetic spec needs k >= 2");
    if (means.size() != k) throw ConfigError("synthetic spec needs one mean vector per class");
    for (const auto& m : means) {
        for (double v : m) {
            if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("synthetic means must lie in [0,1]");
        }
        if (m.size() != means.front().size()) throw ConfigError("synthetic means differ in dimension");
    }
    if (!(sigma > 0.0)) throw ConfigError("synthetic sigma must be > 0");
    if (datasets.empty()) throw ConfigError("synthetic spec lists no datasets");
    for (const auto& d : datasets) {
        if (d.count < k) throw ConfigError("dataset '" + d.name + "' needs at least k instances");
        if (!(d.spread_scale > 0.0)) throw ConfigError("dataset '" + d.name + "' spread scale must be > 0");
    }
}

std::vector<Dataset> gen_synthetic(const SyntheticSpec& spec, const FeatureSchema& schema) {
    spec.validate();
    if (spec.means.front().size() != schema.arity())
        throw ConfigError("synthetic means do not match the schema arity");

    std::vector<Dataset> out;
    for (std::size_t di = 0; di < spec.datasets.size(); ++di) {
        const auto& ds = spec.datasets[di];
        Rng rng(spec.seed * 0x100000001B3ULL + di);

        std::vector<std::size_t> classes(ds.count);
        for (std::size_t i = 0; i < ds.count; ++i) classes[i] = i % spec.k;
        for (std::size_t i = ds.count - 1; i > 0; --i) std::swap(classes[i], classes[rng.below(i + 1)]);

        Dataset data{ds.name, schema, {}};
        const double sigma = spec.sigma * ds.spread_scale;
        for (std::size_t i = 0; i < ds.count; ++i) {
            Instance inst;
            inst.id = i;
            inst.origin = ds.name;
            const auto& mean = spec.means[classes[i]];
            for (std::size_t d = 0; d < schema.arity(); ++d) inst.features.push_back(mean[d] + ds.drift + sigma * rng.normal());
            inst.density = (static_cast<double>(classes[i]) + rng.uniform()) / static_cast<double>(spec.k);
            inst.true_label = classes[i];
            data.instances.push_back(std::move(inst));
        }
        out.push_back(std::move(data));
    }
    return out;
}

}  // namespace transduct
