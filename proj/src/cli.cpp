#include "transduct/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "transduct/dataset.hpp"
#include "transduct/harness.hpp"
#include "transduct/report.hpp"
#include "transduct/synthetic.hpp"
#include "transduct/transduction.hpp"

namespace transduct {

namespace {

namespace fs = std::filesystem;

// Keys shared by flags and the config file.
const std::vector<std::string> kListKeys = {"train", "test", "gammas", "combo"};
const std::vector<std::string> kScalarKeys = {"gamma", "phi", "categories", "policy", "agreement",
                                              "seed", "out", "format", "jobs"};

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("--" + key + ": expected a number, got '" + value + "'");
    }
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value) {
    try {
        if (value.empty() || value.front() == '-') throw std::invalid_argument(value);
        std::size_t used = 0;
        const auto v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("--" + key + ": expected a non-negative integer, got '" + value + "'");
    }
}

CliConfig resolve(const std::map<std::string, std::string>& values) {
    CliConfig cfg;
    for (const auto& [key, value] : values) {
        if (key == "gamma") {
            cfg.gamma = to_double(key, value);
            if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0))
                throw ConfigError("--gamma must lie in the valid range [0,1], got " + value);
        } else if (key == "phi") {
            cfg.phi = to_unsigned(key, value);
            if (cfg.phi < 1) throw ConfigError("--phi must be a positive integer, got " + value);
        } else if (key == "categories") {
            cfg.categories = to_unsigned(key, value);
            if (cfg.categories != 3 && cfg.categories != 5)
                throw ConfigError("--categories must be 3 or 5, got " + value);
            cfg.categories_set = true;
        } else if (key == "policy") {
            if (value != "itsvm" && value != "liberal" && value != "strict")
                throw ConfigError("--policy must be one of itsvm, liberal, strict; got '" + value + "'");
            cfg.policy = value;
            cfg.policy_set = true;
        } else if (key == "agreement") {
            if (value != "true" && value != "false")
                throw ConfigError("--agreement must be true or false, got '" + value + "'");
            cfg.agreement = value == "true";
        } else if (key == "seed") {
            cfg.seed = to_unsigned(key, value);
        } else if (key == "train") {
            cfg.train = split_list(value);
        } else if (key == "test") {
            cfg.test = split_list(value);
        } else if (key == "gammas") {
            cfg.gammas.clear();
            for (const auto& g : split_list(value)) {
                const double v = to_double(key, g);
                if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("--gammas values must lie in the valid range [0,1]");
                cfg.gammas.push_back(v);
            }
            if (cfg.gammas.empty()) throw ConfigError("--gammas must list at least one value");
        } else if (key == "combo") {
            cfg.combos = split_list(value);
        } else if (key == "out") {
            if (value.empty()) throw ConfigError("--out must not be empty");
            cfg.out = value;
        } else if (key == "format") {
            report_format_from_string(value);
            cfg.format = value;
        } else if (key == "jobs") {
            cfg.jobs = to_unsigned(key, value);
            if (cfg.jobs < 1) throw ConfigError("--jobs must be >= 1");
        } else {
            throw ConfigError("unknown configuration key '" + key + "'");
        }
    }
    return cfg;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_file(buffer.str());
}

// Loads a CSV, picking up `sd` labels when the header has that column.
Dataset load_dataset(const std::string& path, std::size_t k) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path + ": cannot open file");
    std::string header;
    std::getline(in, header);
    CsvOptions options;
    for (const auto& col : split_list(header)) {
        if (col == "sd") {
            options.label_column = "sd";
            options.scheme = ClassScheme(k);
        }
    }
    return load_csv(path, FeatureSchema{}, options);
}

std::vector<Dataset> load_all(const std::vector<std::string>& paths, std::size_t k) {
    std::vector<Dataset> out;
    for (const auto& p : paths) out.push_back(load_dataset(p, k));
    return out;
}

std::vector<Dataset> synthetic_or_loaded(const CliConfig& cfg, std::size_t k) {
    if (cfg.train.empty()) return gen_synthetic(SyntheticSpec::preset(cfg.seed));
    auto data = load_all(cfg.train, k);
    for (auto& d : load_all(cfg.test, k)) {
        if (std::none_of(data.begin(), data.end(), [&](const Dataset& x) { return x.name == d.name; }))
            data.push_back(std::move(d));
    }
    return data;
}

std::vector<std::string> names_of(const std::vector<std::string>& paths) {
    std::vector<std::string> out;
    for (const auto& p : paths) out.push_back(fs::path(p).stem().string());
    return out;
}

std::vector<std::size_t> schemes_of(const CliConfig& cfg) {
    if (cfg.categories_set) return {cfg.categories};
    return {3, 5};
}

ThresholdConfig threshold_of(const CliConfig& cfg) { return {cfg.gamma, cfg.phi}; }

void write_output(const CliConfig& cfg, const Table& table, const std::string& stem, std::ostream& out) {
    const auto format = report_format_from_string(cfg.format);
    if (!cfg.out) {
        if (table.rows.empty()) throw DataError("nothing to report");
        out << render(table, format);
        return;
    }
    std::error_code ec;
    fs::create_directories(*cfg.out, ec);
    const fs::path dest = fs::path(*cfg.out) / (stem + "." + extension(format));
    emit_report(table, format, dest);
    out << dest.string() << "\n";
}

int cmd_synth(const CliConfig& cfg, std::ostream& out) {
    if (!cfg.out) throw ConfigError("synth requires --out <directory>");
    std::error_code ec;
    fs::create_directories(*cfg.out, ec);
    for (auto data : gen_synthetic(SyntheticSpec::preset(cfg.seed))) {
        for (auto& inst : data.instances) inst.true_label.reset();
        const fs::path dest = fs::path(*cfg.out) / (data.name + ".csv");
        write_csv(data, dest);
        out << dest.string() << "\n";
    }
    return kExitOk;
}

Policy policy_of(const CliConfig& cfg) {
    Policy policy = cfg.policy == "liberal" ? Policy::liberal()
                    : cfg.policy == "strict" ? Policy::strict()
                                             : Policy::itsvm();
    policy.require_agreement = cfg.agreement;
    return policy;
}

int cmd_run(const CliConfig& cfg, std::ostream& out) {
    if (cfg.train.size() != 1 || cfg.test.size() != 1)
        throw ConfigError("run requires exactly one --train and one --test file");
    const std::size_t k = cfg.categories;
    const ClassScheme scheme(k);
    const auto train = prepare(load_dataset(cfg.train.front(), k), k);
    const auto test = prepare(load_dataset(cfg.test.front(), k), k);
    const auto report = run_transduction(make_problem(train, test), policy_of(cfg), scheme, threshold_of(cfg));
    const std::string json = to_json(report, scheme).dump(2) + "\n";
    if (!cfg.out) {
        out << json;
        return kExitOk;
    }
    std::error_code ec;
    fs::create_directories(*cfg.out, ec);
    const fs::path dest = fs::path(*cfg.out) / "report.json";
    std::ofstream file(dest, std::ios::binary);
    if (!file) throw DataError(dest.string() + ": cannot write report");
    file << json;
    out << dest.string() << "\n";
    if (cfg.format != "json") write_output(cfg, run_table(report), "run", out);
    return kExitOk;
}

int cmd_matrix(const CliConfig& cfg, std::ostream& out) {
    const auto data = synthetic_or_loaded(cfg, cfg.categories);
    ExperimentGrid grid;
    if (cfg.train.empty()) {
        for (const auto& d : data) grid.train_names.push_back(d.name);
        grid.test_names = grid.train_names;
    } else {
        grid.train_names = names_of(cfg.train);
        grid.test_names = cfg.test.empty() ? grid.train_names : names_of(cfg.test);
    }
    grid.schemes = schemes_of(cfg);
    const auto reports = run_matrix(grid, data, threshold_of(cfg), cfg.jobs);
    write_output(cfg, table1(reports), "table1", out);
    return kExitOk;
}

int cmd_cta(const CliConfig& cfg, std::ostream& out) {
    const auto data = synthetic_or_loaded(cfg, cfg.categories);
    std::vector<CtaCombo> combos;
    for (const auto& spec : cfg.combos) {
        const auto colon = spec.find(':');
        if (colon == std::string::npos) throw ConfigError("--combo expects parts:test, e.g. 2003+2005:2007");
        CtaCombo combo;
        std::stringstream ss(spec.substr(0, colon));
        std::string part;
        while (std::getline(ss, part, '+')) combo.parts.push_back(trim(part));
        combo.test = trim(spec.substr(colon + 1));
        combos.push_back(std::move(combo));
    }
    if (combos.empty()) combos = preset_cta_combos();
    const auto schemes = schemes_of(cfg);
    const auto reports = run_cta(combos, data, schemes, threshold_of(cfg), cfg.jobs);
    write_output(cfg, table5(reports), "table5", out);
    return kExitOk;
}

int cmd_sweep(const CliConfig& cfg, std::ostream& out) {
    const auto data = synthetic_or_loaded(cfg, cfg.categories);
    const auto schemes = schemes_of(cfg);
    std::vector<PolicyKind> policies{PolicyKind::liberal, PolicyKind::strict};
    if (cfg.policy_set && cfg.policy == "liberal") policies = {PolicyKind::liberal};
    if (cfg.policy_set && cfg.policy == "strict") policies = {PolicyKind::strict};
    std::vector<SweepRow> rows;
    for (const auto& d : data) {
        auto part = sweep(d, cfg.gammas, schemes, policies, threshold_of(cfg));
        rows.insert(rows.end(), part.begin(), part.end());
    }
    write_output(cfg, table3(rows), "table3", out);
    return kExitOk;
}

int cmd_benchmark(const CliConfig& cfg, std::ostream& out) {
    const auto data = synthetic_or_loaded(cfg, cfg.categories);
    std::vector<std::string> trains, tests;
    if (cfg.train.empty()) {
        for (const auto& d : data) trains.push_back(d.name);
        tests = trains;
    } else {
        trains = names_of(cfg.train);
        tests = cfg.test.empty() ? trains : names_of(cfg.test);
    }
    std::vector<BenchmarkRow> rows;
    for (const auto& tr : trains) {
        for (const auto& te : tests) {
            auto pair = benchmark_compare(find_dataset(data, tr), find_dataset(data, te), cfg.gamma, cfg.categories,
                                          threshold_of(cfg));
            rows.insert(rows.end(), pair.begin(), pair.end());
        }
    }
    write_output(cfg, table2(rows), "table2", out);
    return kExitOk;
}

struct Subcommand {
    std::string name;
    std::string description;
    std::function<int(const CliConfig&, std::ostream&)> handler;
};

}  // namespace

std::map<std::string, std::string> parse_config_file(const std::string& text) {
    std::map<std::string, std::string> values;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return values;
}

int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Incremental transductive labeling of sparse density data", "transduct"};
    app.require_subcommand(1);

    const std::vector<Subcommand> subcommands = {
        {"synth", "Write synthetic surrogate datasets (one CSV per year) to --out", cmd_synth},
        {"run", "Single transduction of --test from --train; emits the run report as JSON", cmd_run},
        {"matrix", "ITSVM over every ordered train/test pair (table1)", cmd_matrix},
        {"cta", "Cumulative training: ITSVM from concatenated datasets (table5)", cmd_cta},
        {"sweep", "Liberal/strict labeling over a development split per dataset and gamma (table3)", cmd_sweep},
        {"benchmark", "Transductive vs inductive SVM accuracy (table2)", cmd_benchmark},
    };

    std::map<std::string, std::string> scalar;
    std::map<std::string, std::vector<std::string>> lists;
    std::string config_path;
    std::map<std::string, std::map<std::string, CLI::Option*>> registered;

    for (const auto& sc : subcommands) {
        auto* sub = app.add_subcommand(sc.name, sc.description);
        auto& opts = registered[sc.name];
        opts["gamma"] = sub->add_option("--gamma", scalar["gamma"], "Confidence threshold in [0,1]")->default_str("0.8");
        opts["phi"] = sub->add_option("--phi", scalar["phi"], "Passive threshold: rounds without a label before stopping")
                          ->default_str("10");
        opts["categories"] = sub->add_option("--categories", scalar["categories"],
                                             "Density categories, 3 or 5 (table commands default to both)")
                                 ->default_str("3");
        opts["policy"] = sub->add_option("--policy", scalar["policy"], "itsvm, liberal or strict")->default_str("itsvm");
        opts["agreement"] = sub->add_option("--agreement", scalar["agreement"],
                                            "Strict policy also requires class agreement (true/false)")
                                ->default_str("true");
        opts["seed"] = sub->add_option("--seed", scalar["seed"], "Seed for synthetic data")->default_str("0");
        opts["train"] = sub->add_option("--train", lists["train"], "Training CSV file(s); synthetic data when omitted")
                            ->default_str("");
        opts["test"] = sub->add_option("--test", lists["test"], "Test CSV file(s)")->default_str("");
        opts["out"] = sub->add_option("--out", scalar["out"], "Output directory; stdout when omitted")->default_str("");
        opts["format"] = sub->add_option("--format", scalar["format"], "csv, md or json")->default_str("csv");
        opts["jobs"] = sub->add_option("--jobs", scalar["jobs"], "Worker threads for grid cells")->default_str("1");
        sub->add_option("--config", config_path, "key=value config file (fallback: $TRANSDUCT_CONFIG)")
            ->default_str("");
        if (sc.name == "sweep")
            opts["gammas"] = sub->add_option("--gammas", lists["gammas"], "Thresholds to sweep")->default_str("0.7,0.8,0.9");
        if (sc.name == "cta")
            opts["combo"] = sub->add_option("--combo", lists["combo"], "Training combo parts:test, e.g. 2003+2005:2007")
                                ->default_str("six presets");
    }

    std::vector<const char*> raw;
    for (const auto& a : argv) raw.push_back(a.c_str());
    if (raw.empty()) raw.push_back("transduct");
    try {
        app.parse(static_cast<int>(raw.size()), raw.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitConfigError;
    }

    const Subcommand* chosen = nullptr;
    for (const auto& sc : subcommands) {
        if (app.got_subcommand(sc.name)) chosen = &sc;
    }
    auto* sub = app.get_subcommand(chosen->name);

    try {
        std::map<std::string, std::string> values;
        if (config_path.empty()) {
            if (const char* env = std::getenv("TRANSDUCT_CONFIG"); env && *env) config_path = env;
        }
        if (!config_path.empty()) values = load_config_file(config_path);
        for (const auto& [key, opt] : registered[chosen->name]) {
            if (opt->count() == 0) continue;
            if (std::find(kListKeys.begin(), kListKeys.end(), key) != kListKeys.end()) {
                std::string joined;
                for (const auto& v : lists[key]) joined += (joined.empty() ? "" : ",") + v;
                values[key] = joined;
            } else {
                values[key] = scalar[key];
            }
        }
        const CliConfig cfg = resolve(values);
        return chosen->handler(cfg, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n" << sub->help();
        return kExitConfigError;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDataError;
    }
}

}  // namespace transduct
