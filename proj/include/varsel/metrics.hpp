#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "varsel/error.hpp"

namespace varsel::metrics {

struct PredictionEntry {
    int64_t row_id;
    std::string y_true;
    std::string y_pred;
    std::string group;
};

struct PredictionSet {
    std::vector<PredictionEntry> entries;
    std::vector<std::string> labels;  // declared binary label set, ordered
};

struct ConfusionMatrix {
    int64_t tp = 0, fp = 0, fn = 0, tn = 0;
    int64_t total() const { return tp + fp + fn + tn; }
};

struct GroupedConfusion {
    ConfusionMatrix protected_group;
    ConfusionMatrix unprotected_group;
    int64_t n_protected() const { return protected_group.total(); }
    int64_t n_unprotected() const { return unprotected_group.total(); }
};

// A field is absent when its denominator is zero.
struct PerformanceReport {
    std::optional<double> accuracy;
    std::optional<double> sensitivity;
    std::optional<double> specificity;
    std::optional<double> balanced_accuracy;
    std::optional<double> f1;
    std::optional<double> mcc;

    std::optional<double> by_name(const std::string& metric) const;
    static bool known_metric(const std::string& metric);
};

struct FairnessReport {
    double eoo = 0.0;
    std::optional<double> di;
    double abad = 0.0;
};

ConfusionMatrix confusion(const PredictionSet& predictions,
                          const std::string& positive_label);

GroupedConfusion group_confusion(const PredictionSet& predictions,
                                 const std::string& protected_value,
                                 const std::string& positive_label);

PerformanceReport performance(const ConfusionMatrix& cm);

// Difference of true-positive rates, protected minus unprotected; signed.
double eoo(const GroupedConfusion& gc);

// Ratio of favorable-outcome rates, protected over unprotected.
double di(const GroupedConfusion& gc);

// Implemented literally as printed: (tp_P + tn_P)/2 - (tp_U + tn_U).
// Count-based and signed despite the "absolute" in its name.
double abad(const GroupedConfusion& gc);

}  // namespace varsel::metrics
