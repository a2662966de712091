#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "transduct/harness.hpp"
#include "transduct/report.hpp"
#include "transduct/synthetic.hpp"

using namespace transduct;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::vector<std::string> names(const std::vector<Dataset>& data) {
    std::vector<std::string> out;
    for (const auto& d : data) out.push_back(d.name);
    return out;
}

}  // namespace

TEST_CASE("synthetic preset is deterministic and sized") {
    const auto a = gen_synthetic(SyntheticSpec::preset(7));
    const auto b = gen_synthetic(SyntheticSpec::preset(7));
    REQUIRE(a.size() == 5);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].instances == b[i].instances);
    const std::vector<std::size_t> sizes{28, 46, 44, 46, 60};
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].size() == sizes[i]);
    CHECK(names(a) == std::vector<std::string>{"2003", "2005", "2007", "2008", "2009"});
    CHECK(gen_synthetic(SyntheticSpec::preset(8))[0].instances != a[0].instances);
}

TEST_CASE("requested counts are honored") {
    auto spec = SyntheticSpec::preset(1);
    spec.datasets = {{"a", 28, 0.0, 1.0}, {"b", 46, 0.0, 1.0}};
    const auto data = gen_synthetic(spec);
    CHECK(data[0].size() == 28);
    CHECK(data[1].size() == 46);
    spec.sigma = -1.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("tight blobs are linearly separable on held-out data") {
    auto spec = SyntheticSpec::preset(13);
    spec.sigma = 0.02;
    spec.datasets = {{"train", 60, 0.0, 1.0}, {"test", 60, 0.0, 1.0}};
    const auto data = gen_synthetic(spec);
    const auto model = train(ClassifierSpec::svm(),
                             std::span<const LabeledExample>(make_problem(data[0], data[1]).labeled), ClassScheme(5));
    std::size_t hits = 0;
    for (const auto& inst : data[1].instances) hits += model.predict(inst.features).argmax() == *inst.true_label;
    CHECK(static_cast<double>(hits) / 60.0 >= 0.95);
}

TEST_CASE("prepare rebins density and normalizes") {
    const auto raw = gen_synthetic(SyntheticSpec::preset(2))[1];
    const auto d = prepare(raw, 3);
    std::vector<std::size_t> counts(3, 0);
    for (const auto& inst : d.instances) {
        ++counts[*inst.true_label];
        for (double v : inst.features) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    CHECK(counts == std::vector<std::size_t>{16, 15, 15});
}

TEST_CASE("development split takes the first fifth of every class") {
    const auto d = prepare(gen_synthetic(SyntheticSpec::preset(2))[0], 3);  // 28 -> 10, 9, 9
    const auto p = development_split(d);
    CHECK(p.labeled.size() == 2 + 2 + 2);
    CHECK(p.unlabeled.size() == 22);
    CHECK_THROWS_AS(development_split(Dataset{"tiny", FeatureSchema{}, {{0, std::vector<double>(7), 0u, {}, {}, ""}}}),
                    DataError);
}

TEST_CASE("matrix covers every ordered pair and scheme") {
    const auto data = gen_synthetic(SyntheticSpec::preset(11));
    ExperimentGrid grid;
    grid.train_names = grid.test_names = names(data);
    const auto reports = run_matrix(grid, data, {0.8, 10}, 3);
    CHECK(reports.size() == 40);

    // Aggregate counts agree with the reference loop.
    std::size_t got = 0, want = 0;
    for (const auto& r : reports) {
        got += r.labeled_count;
        const auto p = make_problem(prepare(find_dataset(data, r.train_name), r.categories),
                                    prepare(find_dataset(data, r.test_name), r.categories));
        const auto ref = oracle::reference_run(p, Policy::itsvm(), ClassScheme(r.categories), 0.8, 10);
        want += ref.labeled_count;
        CHECK(r == ref);
    }
    CHECK(got == want);

    ExperimentGrid one;
    one.train_names = {"2003"};
    one.test_names = {"2005"};
    one.schemes = {3};
    CHECK(run_matrix(one, data, {0.8, 10}).size() == 1);
}

TEST_CASE("matrix order does not depend on thread count") {
    const auto data = gen_synthetic(SyntheticSpec::preset(4));
    ExperimentGrid grid;
    grid.train_names = grid.test_names = names(data);
    const auto a = run_matrix(grid, data, {0.8, 10}, 1);
    const auto b = run_matrix(grid, data, {0.8, 10}, 8);
    CHECK(a == b);
}

TEST_CASE("cumulative training runs") {
    const auto data = gen_synthetic(SyntheticSpec::preset(5));
    const auto combos = preset_cta_combos();
    const std::vector<std::size_t> schemes{3, 5};
    const auto reports = run_cta(combos, data, schemes, {0.8, 10}, 2);
    CHECK(reports.size() == 12);
    CHECK(reports[0].train_name == "2003/05");
    CHECK(reports[0].test_name == "2007");
    CHECK(reports[0].total_unlabeled == 44);
    CHECK(reports[0].categories == 3);
    CHECK(reports[6].train_name == "2003/05");
    CHECK(reports[6].categories == 5);

    const std::vector<CtaCombo> single{{{"2003"}, "2005"}};
    const std::vector<std::size_t> three{3};
    const auto lone = run_cta(single, data, three, {0.8, 10});
    ExperimentGrid grid;
    grid.train_names = {"2003"};
    grid.test_names = {"2005"};
    grid.schemes = {3};
    CHECK(lone.front() == run_matrix(grid, data, {0.8, 10}).front());

    const std::vector<CtaCombo> bad{{{"2003", "2005"}, "2005"}};
    CHECK_THROWS_AS(run_cta(bad, data, three, {0.8, 10}), DataError);
}

TEST_CASE("benchmark without pseudo-labels equals the baseline") {
    const auto data = gen_synthetic(SyntheticSpec::preset(3));
    const auto rows = benchmark_compare(data[0], data[1], 1.0, 3, {0.8, 10});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].pseudo_labeled == 0);
    CHECK(rows[0].accuracy == rows[1].accuracy);
    CHECK(rows[1].method == "inductive-baseline");
}

TEST_CASE("benchmark matches an end-to-end reference computation") {
    const auto data = gen_synthetic(SyntheticSpec::preset(3));
    const auto rows = benchmark_compare(data[0], data[1], 0.8, 3, {0.8, 10});
    const auto p = make_problem(prepare(data[0], 3), prepare(data[1], 3));
    const auto ref = oracle::reference_run(p, Policy::itsvm(), ClassScheme(3), 0.8, 10);
    std::vector<LabeledExample> pool = p.labeled;
    std::map<std::size_t, std::size_t> pseudo;
    for (const auto& round : ref.rounds)
        for (const auto& d : round.decisions) {
            pseudo[d.id] = d.label;
            for (const auto& u : p.unlabeled)
                if (u.id == d.id) pool.push_back({u.id, u.features, d.label});
        }
    const auto refit = train(ClassifierSpec::svm(), std::span<const LabeledExample>(pool), ClassScheme(3));
    const auto base = train(ClassifierSpec::svm(), std::span<const LabeledExample>(p.labeled), ClassScheme(3));
    double t = 0, b = 0;
    for (std::size_t i = 0; i < p.unlabeled.size(); ++i) {
        const auto& u = p.unlabeled[i];
        const auto guess = pseudo.count(u.id) ? pseudo[u.id] : refit.predict(u.features).argmax();
        t += guess == *p.hidden_truth[i];
        b += base.predict(u.features).argmax() == *p.hidden_truth[i];
    }
    CHECK(rows[0].accuracy == doctest::Approx(100.0 * t / 46).epsilon(1e-12));
    CHECK(rows[1].accuracy == doctest::Approx(100.0 * b / 46).epsilon(1e-12));
    CHECK(rows[0].pseudo_labeled == ref.labeled_count);
}

TEST_CASE("sweep identities") {
    const auto data = gen_synthetic(SyntheticSpec::preset(5));
    const std::vector<double> gammas{0.7, 0.8, 0.9};
    const std::vector<std::size_t> schemes{3, 5};
    const std::vector<PolicyKind> policies{PolicyKind::liberal, PolicyKind::strict};
    for (const auto& d : data) {
        const auto rows = sweep(d, gammas, schemes, policies, {0.8, 10});
        REQUIRE(rows.size() == 12);
        for (std::size_t i = 0; i < rows.size(); i += 2) {
            const auto& lib = rows[i];
            const auto& sta = rows[i + 1];
            CHECK(lib.policy == PolicyKind::liberal);
            CHECK(sta.remaining >= lib.remaining);
            for (const auto* r : {&lib, &sta}) {
                CHECK(r->labeled + r->remaining == r->total);
                CHECK(r->labeled_percent() ==
                      doctest::Approx(100.0 * static_cast<double>(r->total - r->remaining) / r->total));
            }
        }
    }
}

TEST_CASE("table layouts") {
    RunReport r3, r5;
    r3.train_name = r5.train_name = "2003";
    r3.test_name = r5.test_name = "2005";
    r3.total_unlabeled = r5.total_unlabeled = 46;
    r3.categories = 3;
    r5.categories = 5;
    r3.labeled_count = 42;
    r5.labeled_count = 46;
    r3.rounds.resize(7);
    r5.rounds.resize(6);
    CHECK(lines(render(run_table(r3), ReportFormat::csv))[1] == "2003,2005,46,42,7");
    const std::vector<RunReport> both{r3, r5};
    const auto t1 = lines(render(table1(both), ReportFormat::csv));
    CHECK(t1[0] == "train,test,num_inst,inst_labeled_3cat,iterations_3cat,inst_labeled_5cat,iterations_5cat");
    CHECK(t1[1] == "2003,2005,46,42,7,46,6");

    const std::vector<SweepRow> sw{{"2003", 3, 0.7, PolicyKind::liberal, 28, 28, 0},
                                   {"2003", 3, 0.7, PolicyKind::strict, 28, 21, 7}};
    CHECK(lines(render(table3(sw), ReportFormat::csv))[1] == "2003,3,70,28,100.00,0,75.00,7");

    const std::vector<BenchmarkRow> bench{{"transductive", "2003", "2003", 92.3077, 5}};
    CHECK(lines(render(table2(bench), ReportFormat::csv))[1] == "transductive,2003,2003,92.31");

    const auto md = lines(render(run_table(r3), ReportFormat::markdown));
    CHECK(md[2] == "| 2003 | 2005 | 46 | 42 | 7 |");
    const auto json = nlohmann::json::parse(render(run_table(r3), ReportFormat::json));
    CHECK(json["rows"][0][3] == "42");
}

TEST_CASE("emit_report is byte-stable and refuses empty tables") {
    const auto dir = std::filesystem::temp_directory_path() / "transduct_emit";
    std::filesystem::create_directories(dir);
    const auto data = gen_synthetic(SyntheticSpec::preset(1));
    ExperimentGrid grid;
    grid.train_names = grid.test_names = names(data);
    const auto reports = run_matrix(grid, data, {0.8, 10});
    for (auto fmt : {ReportFormat::csv, ReportFormat::markdown, ReportFormat::json}) {
        emit_report(table1(reports), fmt, dir / "a.out");
        emit_report(table1(run_matrix(grid, data, {0.8, 10}, 4)), fmt, dir / "b.out");
        CHECK(slurp(dir / "a.out") == slurp(dir / "b.out"));
    }
    const auto empty_path = dir / "empty.csv";
    std::filesystem::remove(empty_path);
    CHECK_THROWS_AS(emit_report(table1({}), ReportFormat::csv, empty_path), DataError);
    CHECK_FALSE(std::filesystem::exists(empty_path));
    CHECK_THROWS_AS(emit_report(table1(reports), ReportFormat::csv, "/nonexistent/dir/x.csv"), DataError);
}
