#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "varsel/data.hpp"
#include "varsel/metrics.hpp"
#include "varsel/selector.hpp"

namespace varsel::learners {

using selector::AlgorithmKind;

struct LearnerSpec {
    AlgorithmKind kind = AlgorithmKind::LinearSvc;
    // Overrides on top of per-kind defaults; unknown names are rejected.
    std::map<std::string, double> hyperparameters;
    uint64_t seed = 0;
};

std::map<std::string, double> default_hyperparameters(AlgorithmKind kind);

// How raw feature columns become the numeric design matrix: numeric columns
// pass through, categoricals are one-hot over the training categories.
struct ColumnEncoding {
    std::string name;
    bool numeric = true;
    std::vector<std::string> categories;  // one-hot, sorted; empty if numeric
};

struct LinearState {
    std::vector<double> weights;  // bias last
};

struct KnnState {
    std::vector<std::vector<double>> points;  // standardized
    std::vector<int> labels;                  // label indices
    int k = 5;
};

struct KernelState {
    std::vector<std::vector<double>> points;
    std::vector<int> labels;
    std::vector<double> alpha;
    double gamma = 0.0;
};

struct TreeNode {
    int feature = -1;       // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    int leaf_label = 0;
};

struct ForestState {
    std::vector<std::vector<TreeNode>> trees;
};

// Gaussian statistics per numeric column, smoothed frequencies otherwise;
// operates on raw cells rather than the encoded matrix.
struct BayesState {
    struct ColumnStats {
        std::string name;
        bool numeric = true;
        std::vector<double> mean, variance;                // per class
        std::vector<std::map<std::string, int64_t>> counts;  // per class
        std::vector<int64_t> class_rows;
    };
    std::vector<double> log_prior;
    std::vector<ColumnStats> columns;
};

struct TrainedModel {
    AlgorithmKind kind = AlgorithmKind::LinearSvc;
    std::vector<std::string> labels;  // sorted, size 2
    std::vector<ColumnEncoding> encodings;
    std::vector<double> mean, scale;  // standardization, from training data
    std::variant<LinearState, KnnState, KernelState, ForestState, BayesState>
        state;
};

// Deterministic given (spec, train_set). Throws UNSUPPORTED_KIND,
// TEXT_FEATURES_UNSUPPORTED, SINGLE_CLASS_TRAINING_SET, NON_BINARY_LABELS,
// UNKNOWN_HYPERPARAMETER.
TrainedModel train(const LearnerSpec& spec,
                   const data::TabularDataset& train_set);

// Predicted labels for the feature columns of `rows`; the target column, if
// present, is ignored. Throws ARITY_MISMATCH on column disagreement.
std::vector<std::string> predict(const TrainedModel& model,
                                 const data::TabularDataset& rows);

// Versioned JSON text form. Stability across versions is not guaranteed.
std::string serialize(const TrainedModel& model);
TrainedModel deserialize(const std::string& text);

struct ImportOptions {
    std::string group_column = "group";
    std::optional<std::string> positive_label;
};

// Reads a `row_id,y_true,y_pred,group` predictions file. Throws
// MISSING_COLUMN, NON_BINARY_LABELS, DUPLICATE_ROW_ID.
metrics::PredictionSet import_predictions(const std::string& path,
                                          const ImportOptions& options = {});
metrics::PredictionSet import_predictions_text(const std::string& text,
                                               const ImportOptions& options = {});

}  // namespace varsel::learners
