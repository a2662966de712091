#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "transduct/harness.hpp"
#include "transduct/transduction.hpp"

namespace transduct {

enum class ReportFormat { csv, markdown, json };

ReportFormat report_format_from_string(std::string_view name);
std::string extension(ReportFormat format);

/// Rendered table: fixed columns, pre-formatted cells, plus an optional JSON
/// payload (full run reports) attached to the json rendering.
struct Table {
    std::string title;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    nlohmann::json details;
};

/// Cross-dataset ITSVM runs grouped by (train, test). With one scheme the
/// columns are train,test,num_inst,inst_labeled,iterations; with several each
/// scheme contributes an inst_labeled_<k>cat,iterations_<k>cat pair.
Table table1(std::span<const RunReport> reports);
Table table2(std::span<const BenchmarkRow> rows);
/// Sweep rows pivoted to one line per (training, scheme, gamma) with liberal
/// and strict columns side by side.
Table table3(std::span<const SweepRow> rows);
Table table5(std::span<const RunReport> reports);
/// Single run in the table1 row layout.
Table run_table(const RunReport& report);

std::string render(const Table& table, ReportFormat format);

/// Writes the rendered table. Throws DataError on empty tables (nothing is
/// written) or when the destination cannot be written.
void emit_report(const Table& table, ReportFormat format, const std::filesystem::path& destination);

}  // namespace transduct
