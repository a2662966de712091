#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "transduct/cli.hpp"
#include "transduct/dataset.hpp"
#include "transduct/synthetic.hpp"

using namespace transduct;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "transduct");
    std::ostringstream out, err;
    const int code = run_command(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("transduct_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path synth_dir() {
    static const fs::path dir = [] {
        const auto d = scratch("data");
        REQUIRE(invoke({"synth", "--seed", "7", "--out", d.string()}).code == 0);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("synth writes reloadable datasets") {
    const auto dir = synth_dir();
    const auto expected = gen_synthetic(SyntheticSpec::preset(7));
    for (const auto& d : expected) {
        const auto path = dir / (d.name + ".csv");
        REQUIRE(fs::exists(path));
        const auto loaded = load_csv(path, FeatureSchema{});
        REQUIRE(loaded.size() == d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            CHECK(loaded.instances[i].features == d.instances[i].features);
            CHECK(loaded.instances[i].density == d.instances[i].density);
        }
        CHECK(format_csv(load_csv(path, FeatureSchema{})) == format_csv(loaded));
    }
    CHECK(invoke({"synth"}).code == kExitConfigError);
}

TEST_CASE("run emits a JSON report") {
    const auto dir = synth_dir();
    const auto r = invoke({"run", "--policy", "strict", "--gamma", "0.8", "--phi", "10", "--categories", "3",
                           "--train", (dir / "2003.csv").string(), "--test", (dir / "2005.csv").string()});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.contains("labeled_count"));
    CHECK(j.contains("rounds"));
    CHECK(j.contains("remaining_ids"));
    CHECK(j["policy"] == "strict");
    CHECK(j["ensemble"].size() == 3);
    CHECK(j["total_unlabeled"] == 46);
}

TEST_CASE("run writes report files to --out") {
    const auto dir = synth_dir();
    const auto out = scratch("run_out");
    const auto r = invoke({"run", "--train", (dir / "2003.csv").string(), "--test", (dir / "2005.csv").string(),
                           "--out", out.string(), "--format", "md"});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(out / "report.json"));
    CHECK(slurp(out / "run.md").rfind("| train | test |", 0) == 0);
}

TEST_CASE("invalid values exit with a configuration error") {
    const auto bad = invoke({"run", "--gamma", "1.5", "--train", "a.csv", "--test", "b.csv"});
    CHECK(bad.code == kExitConfigError);
    CHECK(bad.err.find("[0,1]") != std::string::npos);
    CHECK(invoke({"run", "--gamma", "abc"}).code == kExitConfigError);
    CHECK(invoke({"run", "--policy", "greedy"}).code == kExitConfigError);
    CHECK(invoke({"matrix", "--categories", "4"}).code == kExitConfigError);
    CHECK(invoke({"matrix", "--format", "xml"}).code == kExitConfigError);
    CHECK(invoke({"bogus"}).code == kExitConfigError);
    CHECK(invoke({}).code == kExitConfigError);
    CHECK(invoke({"run", "--no-such-flag"}).code == kExitConfigError);
}

TEST_CASE("missing input files exit with a data error") {
    const auto r = invoke({"run", "--train", "/nonexistent/a.csv", "--test", "/nonexistent/b.csv"});
    CHECK(r.code == kExitDataError);
    CHECK(r.err.find("/nonexistent/a.csv") != std::string::npos);
}

TEST_CASE("every subcommand documents itself") {
    for (const char* sub : {"synth", "run", "matrix", "cta", "sweep", "benchmark"}) {
        const auto r = invoke({sub, "--help"});
        CHECK(r.code == 0);
        CHECK(r.out.find("--gamma") != std::string::npos);
        CHECK(r.out.find("0.8") != std::string::npos);
    }
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("flags override the config file which overrides defaults") {
    const auto dir = synth_dir();
    const auto cfg = scratch("cfg") / "run.conf";
    std::ofstream(cfg) << "# test config\ngamma = 0.7\nphi=4\n";
    const std::vector<std::string> base{"run", "--train", (dir / "2003.csv").string(), "--test",
                                        (dir / "2005.csv").string()};

    auto gamma_of = [](const Outcome& o) { return nlohmann::json::parse(o.out)["gamma"].get<double>(); };
    CHECK(gamma_of(invoke(base)) == 0.8);

    auto with_cfg = base;
    with_cfg.insert(with_cfg.end(), {"--config", cfg.string()});
    const auto from_file = invoke(with_cfg);
    CHECK(gamma_of(from_file) == 0.7);
    CHECK(nlohmann::json::parse(from_file.out)["phi"] == 4);

    auto with_flag = with_cfg;
    with_flag.insert(with_flag.end(), {"--gamma", "0.9"});
    const auto flagged = invoke(with_flag);
    CHECK(gamma_of(flagged) == 0.9);
    CHECK(nlohmann::json::parse(flagged.out)["phi"] == 4);

    setenv("TRANSDUCT_CONFIG", cfg.string().c_str(), 1);
    CHECK(gamma_of(invoke(base)) == 0.7);
    unsetenv("TRANSDUCT_CONFIG");

    const auto bad_cfg = cfg.parent_path() / "bad.conf";
    std::ofstream(bad_cfg) << "colour=blue\n";
    auto with_bad = base;
    with_bad.insert(with_bad.end(), {"--config", bad_cfg.string()});
    CHECK(invoke(with_bad).code == kExitConfigError);
}

TEST_CASE("config file parsing") {
    const auto values = parse_config_file("a=1\n\n# comment\n b = two words \n");
    CHECK(values.at("a") == "1");
    CHECK(values.at("b") == "two words");
    CHECK_THROWS_AS(parse_config_file("no equals sign"), ConfigError);
}

TEST_CASE("table commands are reproducible") {
    const auto dir = synth_dir();
    const auto a = scratch("tables_a");
    const auto b = scratch("tables_b");
    for (const auto& out : {a, b}) {
        const std::string jobs = out == a ? "1" : "3";
        CHECK(invoke({"matrix", "--seed", "2", "--out", out.string(), "--jobs", jobs}).code == 0);
        CHECK(invoke({"cta", "--seed", "2", "--out", out.string(), "--categories", "3"}).code == 0);
        CHECK(invoke({"sweep", "--seed", "2", "--out", out.string(), "--gammas", "0.7,0.9"}).code == 0);
        CHECK(invoke({"benchmark", "--train", (dir / "2003.csv").string(), "--test", (dir / "2005.csv").string(),
                      "--out", out.string()})
                  .code == 0);
    }
    for (const char* name : {"table1.csv", "table5.csv", "table3.csv", "table2.csv"}) {
        REQUIRE(fs::exists(a / name));
        CHECK(slurp(a / name) == slurp(b / name));
    }
    const auto t5 = slurp(a / "table5.csv");
    CHECK(t5.find("3,2003/05,2007,44,") != std::string::npos);
    CHECK(t5.find("\n5,") == std::string::npos);
    const auto t1 = slurp(a / "table1.csv");
    CHECK(std::count(t1.begin(), t1.end(), '\n') == 21);

    const auto combo = invoke({"cta", "--seed", "2", "--combo", "2003+2005:2009", "--categories", "5"});
    CHECK(combo.code == 0);
    CHECK(combo.out.find("5,2003/05,2009,60,") != std::string::npos);
}
