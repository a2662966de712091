#include "transduct/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

namespace transduct {

namespace {

// Evaluates cells[0..n) on up to `jobs` threads, returning results in index order.
template <typename Fn>
auto run_cells(std::size_t n, std::size_t jobs, Fn&& fn) {
    using Result = decltype(fn(std::size_t{}));
    std::vector<std::optional<Result>> slots(n);
    const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) slots[i] = fn(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        slots[i] = fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }
    std::vector<Result> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

Dataset label_for_scheme(const Dataset& raw, std::size_t k) {
    const bool all_density = !raw.empty() && std::all_of(raw.instances.begin(), raw.instances.end(),
                                                         [](const Instance& i) { return i.density.has_value(); });
    if (all_density) return assign_density_classes(raw, k);
    for (const auto& inst : raw.instances) {
        if (inst.true_label && *inst.true_label >= k)
            throw DataError(raw.name + ": label of instance " + std::to_string(inst.id) + " exceeds " +
                            std::to_string(k) + " categories");
    }
    return raw;
}

}  // namespace

Dataset prepare(const Dataset& raw, std::size_t k) { return normalize_minmax(label_for_scheme(raw, k)).first; }

Problem development_split(const Dataset& prepared) {
    std::map<std::size_t, std::vector<const Instance*>> by_class;
    for (const auto& inst : prepared.instances) {
        if (!inst.true_label) throw DataError(prepared.name + ": development split needs labeled instances");
        by_class[*inst.true_label].push_back(&inst);
    }
    std::set<std::size_t> dev_ids;
    for (auto& [label, members] : by_class) {
        std::sort(members.begin(), members.end(), [](const Instance* a, const Instance* b) { return a->id < b->id; });
        const auto take = static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(members.size())));
        for (std::size_t i = 0; i < take; ++i) dev_ids.insert(members[i]->id);
    }
    if (dev_ids.empty() || dev_ids.size() >= prepared.size())
        throw DataError(prepared.name + ": dataset too small to split into development and transduction sets");

    Dataset dev{prepared.name, prepared.schema, {}};
    Dataset rest{prepared.name, prepared.schema, {}};
    for (const auto& inst : prepared.instances) (dev_ids.count(inst.id) ? dev : rest).instances.push_back(inst);
    return make_problem(dev, rest);
}

const Dataset& find_dataset(std::span<const Dataset> data, const std::string& name) {
    for (const auto& d : data) {
        if (d.name == name) return d;
    }
    throw DataError("unknown dataset '" + name + "'");
}

void ExperimentGrid::validate() const {
    if (train_names.empty() || test_names.empty()) throw ConfigError("experiment grid needs train and test names");
    if (gammas.empty() || schemes.empty() || policies.empty()) throw ConfigError("experiment grid axes must be nonempty");
    for (double g : gammas) ThresholdConfig{g, phi}.validate();
}

std::vector<RunReport> run_matrix(const ExperimentGrid& grid, std::span<const Dataset> data,
                                  const ThresholdConfig& config, std::size_t jobs) {
    if (data.size() < 2) throw DataError("a train/test matrix needs at least two datasets");
    if (grid.train_names.empty() || grid.test_names.empty() || grid.schemes.empty())
        throw ConfigError("experiment grid axes must be nonempty");
    config.validate();

    auto trains = grid.train_names;
    auto tests = grid.test_names;
    auto schemes = grid.schemes;
    std::sort(trains.begin(), trains.end());
    std::sort(tests.begin(), tests.end());
    std::sort(schemes.begin(), schemes.end());

    struct Cell {
        const Dataset* train;
        const Dataset* test;
        std::size_t k;
    };
    std::vector<Cell> cells;
    for (const auto& tr : trains) {
        for (const auto& te : tests) {
            if (tr == te) continue;
            for (auto k : schemes) cells.push_back({&find_dataset(data, tr), &find_dataset(data, te), k});
        }
    }
    return run_cells(cells.size(), jobs, [&](std::size_t i) {
        const auto& c = cells[i];
        const ClassScheme scheme(c.k);
        return run_itsvm(make_problem(prepare(*c.train, c.k), prepare(*c.test, c.k)), scheme, config);
    });
}

std::vector<CtaCombo> preset_cta_combos() {
    return {{{"2003", "2005"}, "2007"},         {{"2007", "2005", "2003"}, "2008"},
            {{"2003", "2005", "2007", "2008"}, "2009"}, {{"2008", "2007", "2005"}, "2009"},
            {{"2009", "2008", "2007"}, "2003"}, {{"2008", "2009"}, "2005"}};
}

std::vector<RunReport> run_cta(std::span<const CtaCombo> combos, std::span<const Dataset> data,
                               std::span<const std::size_t> schemes, const ThresholdConfig& config,
                               std::size_t jobs) {
    config.validate();
    for (const auto& combo : combos) {
        if (combo.parts.empty()) throw ConfigError("training combo has no parts");
        if (std::find(combo.parts.begin(), combo.parts.end(), combo.test) != combo.parts.end())
            throw DataError("test dataset '" + combo.test + "' is inside its own training combo");
        for (const auto& p : combo.parts) find_dataset(data, p);
        find_dataset(data, combo.test);
    }

    struct Cell {
        const CtaCombo* combo;
        std::size_t k;
    };
    std::vector<Cell> cells;
    for (auto k : schemes)
        for (const auto& combo : combos) cells.push_back({&combo, k});

    return run_cells(cells.size(), jobs, [&](std::size_t i) {
        const auto& [combo, k] = cells[i];
        std::vector<Dataset> parts;
        for (const auto& name : combo->parts) parts.push_back(label_for_scheme(find_dataset(data, name), k));
        const Dataset train = normalize_minmax(concat(parts)).first;
        const Dataset test = prepare(find_dataset(data, combo->test), k);
        return run_itsvm(make_problem(train, test), ClassScheme(k), config);
    });
}

std::vector<BenchmarkRow> benchmark_compare(const Dataset& train, const Dataset& test, double gamma,
                                            std::size_t scheme_k, const ThresholdConfig& config) {
    ThresholdConfig cfg = config;
    cfg.gamma = gamma;
    cfg.validate();
    const ClassScheme scheme(scheme_k);

    const Problem problem = train.name == test.name
                                ? development_split(prepare(train, scheme_k))
                                : make_problem(prepare(train, scheme_k), prepare(test, scheme_k));
    for (const auto& truth : problem.hidden_truth) {
        if (!truth) throw DataError(test.name + ": benchmarking needs true labels on every test instance");
    }
    if (problem.unlabeled.empty()) throw DataError(test.name + ": no test instances to score");

    const auto report = run_itsvm(problem, scheme, cfg);
    const auto assigned = report.assignments();
    const auto svm = ClassifierSpec::svm();
    const auto final_model = transduct::train(svm, final_labeled_pool(problem, report), scheme);
    const auto baseline_model = transduct::train(svm, problem.labeled, scheme);

    std::size_t transductive_hits = 0;
    std::size_t baseline_hits = 0;
    for (std::size_t i = 0; i < problem.unlabeled.size(); ++i) {
        const auto& u = problem.unlabeled[i];
        const auto it = assigned.find(u.id);
        const std::size_t predicted = it != assigned.end() ? it->second.label : final_model.predict(u.features).argmax();
        transductive_hits += predicted == *problem.hidden_truth[i];
        baseline_hits += baseline_model.predict(u.features).argmax() == *problem.hidden_truth[i];
    }
    const double n = static_cast<double>(problem.unlabeled.size());
    return {{"transductive", train.name, test.name, 100.0 * static_cast<double>(transductive_hits) / n,
             report.labeled_count},
            {"inductive-baseline", train.name, test.name, 100.0 * static_cast<double>(baseline_hits) / n, 0}};
}

double SweepRow::labeled_percent() const {
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(total - remaining) / static_cast<double>(total);
}

std::vector<SweepRow> sweep(const Dataset& training, std::span<const double> gammas,
                            std::span<const std::size_t> schemes, std::span<const PolicyKind> policies,
                            const ThresholdConfig& config) {
    config.validate();
    std::vector<SweepRow> rows;
    for (double gamma : gammas) {
        ThresholdConfig cfg = config;
        cfg.gamma = gamma;
        cfg.validate();
        for (auto k : schemes) {
            const Problem problem = development_split(prepare(training, k));
            for (auto kind : policies) {
                Policy policy = kind == PolicyKind::liberal ? Policy::liberal() : Policy::strict();
                const auto report = run_transduction(problem, policy, ClassScheme(k), cfg);
                rows.push_back({training.name, k, gamma, kind, report.total_unlabeled, report.labeled_count,
                                report.remaining_ids.size()});
            }
        }
    }
    return rows;
}

}  // namespace transduct
