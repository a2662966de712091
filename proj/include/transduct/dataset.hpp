#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace transduct {

/// Raised for malformed or inconsistent input data (bad CSV, schema clash).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised for invalid parameters or configuration values.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FeatureSchema {
public:
    FeatureSchema();  // the seven remote-sensing indices
    explicit FeatureSchema(std::vector<std::string> attributes);

    const std::vector<std::string>& attributes() const { return attributes_; }
    std::size_t arity() const { return attributes_.size(); }

    bool operator==(const FeatureSchema&) const = default;

private:
    std::vector<std::string> attributes_;
};

/// Ordered density scale; class index 0 is the lowest density.
class ClassScheme {
public:
    explicit ClassScheme(std::size_t k);
    ClassScheme(std::vector<std::string> names);

    std::size_t k() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(std::size_t index) const { return names_.at(index); }
    std::optional<std::size_t> index_of(std::string_view name) const;

    bool operator==(const ClassScheme&) const = default;

private:
    std::vector<std::string> names_;
};

struct AssignedLabel {
    std::size_t label = 0;
    double confidence = 0.0;
    std::size_t round = 1;
    std::string source;

    bool operator==(const AssignedLabel&) const = default;
};

struct Instance {
    std::size_t id = 0;
    std::vector<double> features;
    std::optional<std::size_t> true_label;
    std::optional<AssignedLabel> assigned;
    /// Continuous density reading, rebinned into classes per scheme.
    std::optional<double> density;
    std::string origin;

    bool operator==(const Instance&) const = default;
};

struct Dataset {
    std::string name;
    FeatureSchema schema;
    std::vector<Instance> instances;

    std::size_t size() const { return instances.size(); }
    bool empty() const { return instances.empty(); }

    /// Throws DataError when an invariant (arity, unique ids, confidence range) fails.
    void validate() const;
};

struct NormalizationParams {
    std::vector<double> min;
    std::vector<double> max;
};

struct CsvOptions {
    /// Column holding class names or indices; absent means unlabeled.
    std::optional<std::string> label_column;
    /// Required to resolve label_column values.
    std::optional<ClassScheme> scheme;
    /// Optional continuous density column name.
    std::optional<std::string> density_column = "density";
};

/// Parses a comma-separated file with a header row. The dataset is named
/// after the file stem.
Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema,
                 const CsvOptions& options = {});

/// Same as load_csv but reading from an in-memory buffer.
Dataset parse_csv(std::string_view text, const FeatureSchema& schema, const CsvOptions& options,
                  std::string name);

/// Writes schema columns, then `density` and `sd` when any instance carries
/// them. Values are rendered with round-trip precision.
void write_csv(const Dataset& data, const std::filesystem::path& path,
               const std::optional<ClassScheme>& scheme = std::nullopt);
std::string format_csv(const Dataset& data, const std::optional<ClassScheme>& scheme = std::nullopt);

std::pair<Dataset, NormalizationParams> normalize_minmax(const Dataset& data);
Dataset apply_normalization(const Dataset& data, const NormalizationParams& params);

/// Equal-frequency binning. Ties are ordered by original position; the first
/// (n mod k) bins receive one extra element.
std::vector<std::size_t> discretize_equal_frequency(std::span<const double> values, std::size_t k);

/// Replaces true labels by equal-frequency bins of the density column.
Dataset assign_density_classes(const Dataset& data, std::size_t k);

/// Joined name for a concatenation: "2003" + "2005" -> "2003/05" when all
/// parts are four-digit years of one century, else names joined by '/'.
std::string combo_name(std::span<const std::string> names);

Dataset concat(std::span<const Dataset> parts);

struct LabeledExample {
    std::size_t id = 0;
    std::vector<double> features;
    std::size_t label = 0;
};

/// Unlabeled pool entries carry nothing the engine could use as ground truth.
struct UnlabeledExample {
    std::size_t id = 0;
    std::vector<double> features;
};

struct Problem {
    std::string train_name;
    std::string test_name;
    std::vector<LabeledExample> labeled;
    std::vector<UnlabeledExample> unlabeled;
    /// Ground truth aligned with `unlabeled`, kept aside for scoring.
    std::vector<std::optional<std::size_t>> hidden_truth;
};

Problem make_problem(const Dataset& train, const Dataset& test);

}  // namespace transduct
