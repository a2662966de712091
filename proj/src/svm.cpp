#include "transduct/svm.hpp"

#include <algorithm>
#include <stdexcept>

namespace transduct {

namespace {
constexpr double kMinPairProbability = 1e-7;
}

double BinaryMachine::margin(std::span<const double> x) const {
    double f = bias;
    for (std::size_t d = 0; d < weights.size(); ++d) f += weights[d] * x[d];
    return f;
}

double BinaryMachine::probability(std::span<const double> x) const {
    return std::clamp(sigmoid(margin(x)), kMinPairProbability, 1.0 - kMinPairProbability);
}

SvmModel::SvmModel(std::size_t k, SvmParams params, std::vector<std::size_t> classes,
                   std::vector<BinaryMachine> machines)
    : k_(k), params_(params), classes_(std::move(classes)), machines_(std::move(machines)) {}

Posterior SvmModel::predict(std::span<const double> x) const {
    const std::size_t m = classes_.size();
    std::vector<double> r(m * m, 0.0);
    std::size_t next = 0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) r[i * m + j] = machines_[next++].probability(x);
    }
    const auto coupled = pairwise_couple(r, m, params_.coupling_tolerance, params_.coupling_max_iterations);
    std::vector<double> probs(k_, 0.0);
    for (std::size_t i = 0; i < m; ++i) probs[classes_[i]] = coupled[i];
    return Posterior(std::move(probs));
}

nlohmann::json SvmModel::to_json() const {
    nlohmann::json machines = nlohmann::json::array();
    for (const auto& bm : machines_) {
        machines.push_back({{"positive", bm.positive},
                            {"negative", bm.negative},
                            {"weights", bm.weights},
                            {"b", bm.bias},
                            {"sigmoid", {{"A", bm.sigmoid.A}, {"B", bm.sigmoid.B}}},
                            {"support_indices", bm.support},
                            {"alphas", bm.support_alphas}});
    }
    return {{"classes", classes_},
            {"C", params_.C},
            {"tolerance", params_.tolerance},
            {"machines", std::move(machines)}};
}

std::shared_ptr<const SvmModel> fit_svm(const TrainingSet& pool, std::size_t k, const SvmParams& params) {
    std::vector<std::size_t> classes;
    for (std::size_t label : pool.labels) classes.push_back(label);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    if (classes.size() < 2) throw std::invalid_argument("svm needs at least two observed classes");

    const SmoOptions options{params.C, params.tolerance, params.max_passes};
    std::vector<BinaryMachine> machines;
    for (std::size_t a = 0; a < classes.size(); ++a) {
        for (std::size_t b = a + 1; b < classes.size(); ++b) {
            std::vector<std::size_t> members;
            std::vector<double> samples;
            std::vector<int> y;
            for (std::size_t i = 0; i < pool.size(); ++i) {
                const auto label = pool.labels[i];
                if (label != classes[a] && label != classes[b]) continue;
                members.push_back(i);
                const auto row = pool.row(i);
                samples.insert(samples.end(), row.begin(), row.end());
                y.push_back(label == classes[a] ? 1 : -1);
            }
            const Gram gram = Gram::linear(samples, pool.dim);
            const SmoResult solved = smo_solve(gram, y, options);

            BinaryMachine bm;
            bm.positive = classes[a];
            bm.negative = classes[b];
            bm.bias = solved.b;
            bm.weights.assign(pool.dim, 0.0);
            for (std::size_t i = 0; i < members.size(); ++i) {
                if (solved.alphas[i] == 0.0) continue;
                bm.support.push_back(members[i]);
                bm.support_alphas.push_back(solved.alphas[i]);
                for (std::size_t d = 0; d < pool.dim; ++d)
                    bm.weights[d] += solved.alphas[i] * y[i] * samples[i * pool.dim + d];
            }
            std::vector<double> margins(members.size());
            for (std::size_t i = 0; i < members.size(); ++i)
                margins[i] = bm.margin(std::span<const double>(samples).subspan(i * pool.dim, pool.dim));
            bm.sigmoid = platt_calibrate(margins, y);
            machines.push_back(std::move(bm));
        }
    }
    return std::make_shared<SvmModel>(k, params, std::move(classes), std::move(machines));
}

}  // namespace transduct
