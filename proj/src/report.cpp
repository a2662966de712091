#include "transduct/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "format.hpp"

namespace transduct {

namespace {

std::string percent(double value) { return detail::fixed(value, 2); }

std::string confidence_label(double gamma) { return std::to_string(static_cast<long>(std::lround(gamma * 100.0))); }

nlohmann::json report_array(std::span<const RunReport> reports) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : reports) out.push_back(to_json(r));
    return out;
}

}  // namespace

ReportFormat report_format_from_string(std::string_view name) {
    if (name == "csv") return ReportFormat::csv;
    if (name == "md" || name == "markdown") return ReportFormat::markdown;
    if (name == "json") return ReportFormat::json;
    throw ConfigError("unknown format '" + std::string(name) + "' (expected csv, md or json)");
}

std::string extension(ReportFormat format) {
    switch (format) {
        case ReportFormat::csv: return "csv";
        case ReportFormat::markdown: return "md";
        case ReportFormat::json: return "json";
    }
    return "txt";
}

Table table1(std::span<const RunReport> reports) {
    std::set<std::size_t> scheme_set;
    for (const auto& r : reports) scheme_set.insert(r.categories);
    const std::vector<std::size_t> schemes(scheme_set.begin(), scheme_set.end());

    Table table{"ITSVM cross-dataset comparison", {"train", "test", "num_inst"}, {}, report_array(reports)};
    for (auto k : schemes) {
        const std::string suffix = schemes.size() > 1 ? "_" + std::to_string(k) + "cat" : "";
        table.columns.push_back("inst_labeled" + suffix);
        table.columns.push_back("iterations" + suffix);
    }

    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, std::vector<const RunReport*>> groups;
    for (const auto& r : reports) {
        const auto key = std::make_pair(r.train_name, r.test_name);
        if (!groups.count(key)) order.push_back(key);
        groups[key].push_back(&r);
    }
    for (const auto& key : order) {
        const auto& group = groups[key];
        std::vector<std::string> row{key.first, key.second, std::to_string(group.front()->total_unlabeled)};
        for (auto k : schemes) {
            const auto it = std::find_if(group.begin(), group.end(), [&](const RunReport* r) { return r->categories == k; });
            if (it == group.end()) {
                row.insert(row.end(), {"", ""});
            } else {
                row.push_back(std::to_string((*it)->labeled_count));
                row.push_back(std::to_string((*it)->iterations()));
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

Table run_table(const RunReport& report) {
    return table1(std::span<const RunReport>(&report, 1));
}

Table table2(std::span<const BenchmarkRow> rows) {
    Table table{"Transductive vs inductive benchmark", {"method", "train", "test", "accuracy"}, {}, nullptr};
    for (const auto& r : rows) table.rows.push_back({r.method, r.train, r.test, percent(r.accuracy)});
    table.details = nlohmann::json::array();
    for (const auto& r : rows) {
        table.details.push_back({{"method", r.method},
                                 {"train", r.train},
                                 {"test", r.test},
                                 {"accuracy", r.accuracy},
                                 {"pseudo_labeled", r.pseudo_labeled}});
    }
    return table;
}

Table table3(std::span<const SweepRow> rows) {
    Table table{"Ensemble labeling sweep",
                {"training", "categories", "confidence", "total_inst", "lta_lbl_pct", "lta_remaining", "sta_lbl_pct",
                 "sta_remaining"},
                {},
                nlohmann::json::array()};
    using Key = std::tuple<std::string, std::size_t, double>;
    std::vector<Key> order;
    std::map<Key, std::vector<const SweepRow*>> groups;
    for (const auto& r : rows) {
        const Key key{r.training, r.categories, r.gamma};
        if (!groups.count(key)) order.push_back(key);
        groups[key].push_back(&r);
        table.details.push_back({{"training", r.training},
                                 {"categories", r.categories},
                                 {"gamma", r.gamma},
                                 {"policy", to_string(r.policy)},
                                 {"total", r.total},
                                 {"labeled", r.labeled},
                                 {"remaining", r.remaining}});
    }
    for (const auto& key : order) {
        const auto& group = groups[key];
        std::vector<std::string> row{std::get<0>(key), std::to_string(std::get<1>(key)),
                                     confidence_label(std::get<2>(key)), std::to_string(group.front()->total)};
        for (auto kind : {PolicyKind::liberal, PolicyKind::strict}) {
            const auto it = std::find_if(group.begin(), group.end(), [&](const SweepRow* r) { return r->policy == kind; });
            if (it == group.end()) {
                row.insert(row.end(), {"", ""});
            } else {
                row.push_back(percent((*it)->labeled_percent()));
                row.push_back(std::to_string((*it)->remaining));
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

Table table5(std::span<const RunReport> reports) {
    Table table{"Cumulative training ITSVM",
                {"categories", "train", "test", "num_inst", "inst_labeled", "inst_unlabeled", "iterations"},
                {},
                report_array(reports)};
    for (const auto& r : reports) {
        table.rows.push_back({std::to_string(r.categories), r.train_name, r.test_name, std::to_string(r.total_unlabeled),
                              std::to_string(r.labeled_count), std::to_string(r.remaining_ids.size()),
                              std::to_string(r.iterations())});
    }
    return table;
}

std::string render(const Table& table, ReportFormat format) {
    std::string out;
    auto join = [](const std::vector<std::string>& cells, const std::string& sep) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) line += sep;
            line += cells[i];
        }
        return line;
    };
    switch (format) {
        case ReportFormat::csv:
            out += join(table.columns, ",") + "\n";
            for (const auto& row : table.rows) out += join(row, ",") + "\n";
            break;
        case ReportFormat::markdown: {
            out += "| " + join(table.columns, " | ") + " |\n|";
            for (std::size_t i = 0; i < table.columns.size(); ++i) out += "---|";
            out += "\n";
            for (const auto& row : table.rows) out += "| " + join(row, " | ") + " |\n";
            break;
        }
        case ReportFormat::json: {
            nlohmann::json j = {{"title", table.title}, {"columns", table.columns}, {"rows", table.rows}};
            if (!table.details.is_null()) j["details"] = table.details;
            out = j.dump(2) + "\n";
            break;
        }
    }
    return out;
}

void emit_report(const Table& table, ReportFormat format, const std::filesystem::path& destination) {
    if (table.rows.empty()) throw DataError("refusing to write an empty report to " + destination.string());
    const std::string text = render(table, format);
    std::ofstream out(destination, std::ios::binary);
    if (!out) throw DataError(destination.string() + ": cannot write report");
    out << text;
    if (!out) throw DataError(destination.string() + ": write failed");
}

}  // namespace transduct
