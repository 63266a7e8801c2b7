#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "varsel/error.hpp"
#include "varsel/thresholds.hpp"

namespace varsel::data {

enum class ColumnKind { Numeric, Categorical, Text };

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::Categorical;
};

struct TabularDataset {
    std::vector<Column> columns;
    std::vector<std::vector<std::string>> rows;  // cells as read
    std::optional<std::string> target;
    std::optional<std::string> sensitive;

    size_t column_index(const std::string& name) const;  // throws MISSING_COLUMN
    const Column& column(const std::string& name) const;
};

enum class PredictionKind { Category, Quantity, JustLooking, None };

struct LoadOptions {
    std::optional<std::string> target;
    std::optional<std::string> sensitive;
    std::vector<std::string> text_columns;
};

struct ProfileHint {
    // Cannot be inferred from data alone; defaults to Category.
    PredictionKind prediction_kind = PredictionKind::Category;
    std::optional<int> known_category_count;  // for clustering branches
};

struct DatasetProfile {
    size_t sample_size = 0;
    size_t feature_count = 0;  // excludes the target column
    bool labeled = false;
    PredictionKind prediction_kind = PredictionKind::Category;
    bool text_data = false;
    bool few_features = false;
    std::optional<double> positive_fraction;  // binary targets only
    std::optional<int> known_category_count;
};

// Comma-separated values with a header row; no quoting. Kind inference:
// all-numeric parse -> Numeric, declared text -> Text, else Categorical.
// Throws EMPTY_FILE, RAGGED_ROW (with 1-based data-row number),
// MISSING_COLUMN, FILE_NOT_FOUND.
TabularDataset load_csv(const std::string& path, const LoadOptions& options = {});

// Same parser over an in-memory string (tests, bindings).
TabularDataset load_csv_text(const std::string& text,
                             const LoadOptions& options = {});

// Fraction of rows carrying the positive class, where the positive label is
// the lexicographically larger of the two target values. Throws UNLABELED,
// NON_BINARY_TARGET.
double positive_fraction(const TabularDataset& dataset);

// The positive label under the same convention.
std::string default_positive_label(const TabularDataset& dataset);

DatasetProfile profile(const TabularDataset& dataset, const ProfileHint& hint,
                       const SelectorThresholds& thresholds);

// Deterministic stratified split. Per-class test counts follow
// largest-remainder rounding of class_count * test_fraction against a total
// of round(sample_size * test_fraction); membership within a class comes
// from a seeded shuffle. Throws UNLABELED, DEGENERATE_CLASS, BAD_FRACTION.
std::pair<TabularDataset, TabularDataset> stratified_split(
    const TabularDataset& dataset, double test_fraction, uint64_t seed);

}  // namespace varsel::data
