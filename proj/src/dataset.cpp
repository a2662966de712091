#include "transduct/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "format.hpp"

namespace transduct {

namespace {

std::vector<std::string> split_row(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        auto cell = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
        while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
            cell.remove_suffix(1);
        cells.emplace_back(cell);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

std::optional<double> parse_double(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
    return value;
}

}  // namespace

FeatureSchema::FeatureSchema()
    : FeatureSchema({"TCB", "TCG", "TCW", "MNDWI", "NDMI", "NDVI", "NDWI"}) {}

FeatureSchema::FeatureSchema(std::vector<std::string> attributes) : attributes_(std::move(attributes)) {
    if (attributes_.empty()) throw ConfigError("feature schema must list at least one attribute");
    std::set<std::string> seen;
    for (const auto& name : attributes_) {
        if (!seen.insert(name).second) throw ConfigError("duplicate attribute name '" + name + "'");
    }
}

ClassScheme::ClassScheme(std::size_t k) {
    if (k == 3) {
        names_ = {"low", "medium", "high"};
    } else if (k == 5) {
        names_ = {"v.low", "low", "medium", "high", "v.high"};
    } else if (k >= 2) {
        for (std::size_t i = 0; i < k; ++i) names_.push_back("c" + std::to_string(i));
    } else {
        throw ConfigError("class scheme needs at least 2 categories");
    }
}

ClassScheme::ClassScheme(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.size() < 2) throw ConfigError("class scheme needs at least 2 categories");
    std::set<std::string> seen(names_.begin(), names_.end());
    if (seen.size() != names_.size()) throw ConfigError("class names must be unique");
}

std::optional<std::size_t> ClassScheme::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return i;
    }
    return std::nullopt;
}

void Dataset::validate() const {
    std::set<std::size_t> ids;
    for (const auto& inst : instances) {
        if (inst.features.size() != schema.arity())
            throw DataError("instance " + std::to_string(inst.id) + " has " +
                            std::to_string(inst.features.size()) + " features, schema has " +
                            std::to_string(schema.arity()));
        if (!ids.insert(inst.id).second)
            throw DataError("duplicate instance id " + std::to_string(inst.id));
        if (inst.assigned && !(inst.assigned->confidence >= 0.0 && inst.assigned->confidence <= 1.0))
            throw DataError("instance " + std::to_string(inst.id) + " confidence outside [0,1]");
    }
}

Dataset parse_csv(std::string_view text, const FeatureSchema& schema, const CsvOptions& options,
                  std::string name) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        auto line = text.substr(start, nl == std::string_view::npos ? text.npos : nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) throw DataError(name + ": empty file");

    const auto header = split_row(lines.front());
    auto column_of = [&](const std::string& col) -> std::optional<std::size_t> {
        auto it = std::find(header.begin(), header.end(), col);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    };

    std::vector<std::size_t> feature_cols;
    for (const auto& attr : schema.attributes()) {
        auto col = column_of(attr);
        if (!col) throw DataError(name + ": header lacks attribute column '" + attr + "'");
        feature_cols.push_back(*col);
    }
    std::optional<std::size_t> label_col;
    if (options.label_column) {
        label_col = column_of(*options.label_column);
        if (!label_col) throw DataError(name + ": header lacks label column '" + *options.label_column + "'");
        if (!options.scheme) throw ConfigError("label column requires a class scheme");
    }
    std::optional<std::size_t> density_col;
    if (options.density_column) density_col = column_of(*options.density_column);

    Dataset data{name, schema, {}};
    for (std::size_t row = 1; row < lines.size(); ++row) {
        if (lines[row].empty()) continue;
        const auto cells = split_row(lines[row]);
        const std::string where = name + ": row " + std::to_string(row + 1);
        if (cells.size() != header.size())
            throw DataError(where + ": expected " + std::to_string(header.size()) + " cells, found " +
                            std::to_string(cells.size()));
        Instance inst;
        inst.id = data.instances.size();
        inst.origin = name;
        for (std::size_t a = 0; a < feature_cols.size(); ++a) {
            const auto& cell = cells[feature_cols[a]];
            auto value = parse_double(cell);
            if (!value)
                throw DataError(where + ", column '" + schema.attributes()[a] + "': non-numeric value '" +
                                cell + "'");
            inst.features.push_back(*value);
        }
        if (density_col) {
            const auto& cell = cells[*density_col];
            if (!cell.empty()) {
                auto value = parse_double(cell);
                if (!value)
                    throw DataError(where + ", column '" + *options.density_column +
                                    "': non-numeric value '" + cell + "'");
                inst.density = *value;
            }
        }
        if (label_col) {
            const auto& cell = cells[*label_col];
            if (!cell.empty()) {
                auto index = options.scheme->index_of(cell);
                if (!index) {
                    std::size_t parsed = 0;
                    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), parsed);
                    if (ec == std::errc{} && ptr == cell.data() + cell.size() && parsed < options.scheme->k())
                        index = parsed;
                }
                if (!index) throw DataError(where + ": unknown label value '" + cell + "'");
                inst.true_label = *index;
            }
        }
        data.instances.push_back(std::move(inst));
    }
    if (data.instances.empty()) throw DataError(name + ": no data rows");
    return data;
}

Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path.string() + ": cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_csv(buffer.str(), schema, options, path.stem().string());
    } catch (const DataError& e) {
        throw DataError(path.string() + " (" + e.what() + ")");
    }
}

std::string format_csv(const Dataset& data, const std::optional<ClassScheme>& scheme) {
    const bool has_density =
        std::any_of(data.instances.begin(), data.instances.end(), [](const Instance& i) { return i.density; });
    const bool has_label = std::any_of(data.instances.begin(), data.instances.end(),
                                       [](const Instance& i) { return i.true_label.has_value(); });
    std::string out;
    for (std::size_t a = 0; a < data.schema.arity(); ++a) {
        if (a) out += ',';
        out += data.schema.attributes()[a];
    }
    if (has_density) out += ",density";
    if (has_label) out += ",sd";
    out += '\n';
    for (const auto& inst : data.instances) {
        for (std::size_t a = 0; a < inst.features.size(); ++a) {
            if (a) out += ',';
            out += detail::round_trip(inst.features[a]);
        }
        if (has_density) {
            out += ',';
            if (inst.density) out += detail::round_trip(*inst.density);
        }
        if (has_label) {
            out += ',';
            if (inst.true_label)
                out += scheme ? scheme->name(*inst.true_label) : std::to_string(*inst.true_label);
        }
        out += '\n';
    }
    return out;
}

void write_csv(const Dataset& data, const std::filesystem::path& path, const std::optional<ClassScheme>& scheme) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(path.string() + ": cannot write file");
    out << format_csv(data, scheme);
    if (!out) throw DataError(path.string() + ": write failed");
}

Dataset apply_normalization(const Dataset& data, const NormalizationParams& params) {
    if (params.min.size() != data.schema.arity() || params.max.size() != data.schema.arity())
        throw DataError("normalization parameters do not match schema arity");
    Dataset out = data;
    for (auto& inst : out.instances) {
        for (std::size_t a = 0; a < inst.features.size(); ++a) {
            const double range = params.max[a] - params.min[a];
            inst.features[a] = range > 0.0 ? (inst.features[a] - params.min[a]) / range : 0.5;
        }
    }
    return out;
}

std::pair<Dataset, NormalizationParams> normalize_minmax(const Dataset& data) {
    if (data.empty()) throw DataError(data.name + ": cannot normalize an empty dataset");
    const std::size_t arity = data.schema.arity();
    NormalizationParams params{std::vector<double>(arity), std::vector<double>(arity)};
    for (std::size_t a = 0; a < arity; ++a) {
        params.min[a] = params.max[a] = data.instances.front().features.at(a);
        for (const auto& inst : data.instances) {
            params.min[a] = std::min(params.min[a], inst.features.at(a));
            params.max[a] = std::max(params.max[a], inst.features.at(a));
        }
    }
    return {apply_normalization(data, params), params};
}

std::vector<std::size_t> discretize_equal_frequency(std::span<const double> values, std::size_t k) {
    if (k < 2) throw ConfigError("equal-frequency binning needs k >= 2");
    const std::size_t n = values.size();
    if (n < k)
        throw DataError("cannot split " + std::to_string(n) + " values into " + std::to_string(k) + " bins");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<std::size_t> classes(n);
    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::size_t pos = 0;
    for (std::size_t bin = 0; bin < k; ++bin) {
        const std::size_t size = base + (bin < extra ? 1 : 0);
        for (std::size_t j = 0; j < size; ++j) classes[order[pos++]] = bin;
    }
    return classes;
}

Dataset assign_density_classes(const Dataset& data, std::size_t k) {
    std::vector<double> densities;
    densities.reserve(data.size());
    for (const auto& inst : data.instances) {
        if (!inst.density)
            throw DataError(data.name + ": instance " + std::to_string(inst.id) + " has no density value");
        densities.push_back(*inst.density);
    }
    const auto classes = discretize_equal_frequency(densities, k);
    Dataset out = data;
    for (std::size_t i = 0; i < out.instances.size(); ++i) out.instances[i].true_label = classes[i];
    return out;
}

std::string combo_name(std::span<const std::string> names) {
    auto is_year = [](const std::string& s) {
        return s.size() == 4 && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    const bool years = !names.empty() && std::all_of(names.begin(), names.end(), [&](const std::string& s) {
        return is_year(s) && s.compare(0, 2, names.front(), 0, 2) == 0;
    });
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += '/';
        out += (years && i > 0) ? names[i].substr(2) : names[i];
    }
    return out;
}

Dataset concat(std::span<const Dataset> parts) {
    if (parts.empty()) throw DataError("concat needs at least one dataset");
    std::vector<std::string> names;
    Dataset out{{}, parts.front().schema, {}};
    for (const auto& part : parts) {
        if (!(part.schema == out.schema))
            throw DataError("schema mismatch: '" + part.name + "' differs from '" + parts.front().name + "'");
        names.push_back(part.name);
        for (const auto& inst : part.instances) {
            Instance copy = inst;
            copy.id = out.instances.size();
            copy.origin = part.name;
            out.instances.push_back(std::move(copy));
        }
    }
    out.name = combo_name(names);
    return out;
}

Problem make_problem(const Dataset& train, const Dataset& test) {
    if (!(train.schema == test.schema))
        throw DataError("schema mismatch between '" + train.name + "' and '" + test.name + "'");
    Problem problem;
    problem.train_name = train.name;
    problem.test_name = test.name;
    for (const auto& inst : train.instances) {
        if (!inst.true_label)
            throw DataError(train.name + ": training instance " + std::to_string(inst.id) + " has no label");
        problem.labeled.push_back({inst.id, inst.features, *inst.true_label});
    }
    for (const auto& inst : test.instances) {
        problem.unlabeled.push_back({inst.id, inst.features});
        problem.hidden_truth.push_back(inst.true_label);
    }
    return problem;
}

}  // namespace transduct
