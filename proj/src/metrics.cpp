#include "varsel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace varsel::metrics {

std::optional<double> PerformanceReport::by_name(const std::string& metric) const {
    if (metric == "accuracy") return accuracy;
    if (metric == "sensitivity") return sensitivity;
    if (metric == "specificity") return specificity;
    if (metric == "balanced_accuracy") return balanced_accuracy;
    if (metric == "f1") return f1;
    if (metric == "mcc") return mcc;
    throw Error("UNKNOWN_METRIC", "no performance metric named '" + metric + "'");
}

bool PerformanceReport::known_metric(const std::string& metric) {
    static const std::set<std::string> names = {
        "accuracy", "sensitivity", "specificity", "balanced_accuracy", "f1", "mcc"};
    return names.count(metric) != 0;
}

ConfusionMatrix confusion(const PredictionSet& predictions,
                          const std::string& positive_label) {
    if (predictions.entries.empty())
        throw Error("EMPTY_PREDICTIONS", "no prediction entries");
    bool seen = std::any_of(predictions.entries.begin(), predictions.entries.end(),
                            [&](const PredictionEntry& e) {
                                return e.y_true == positive_label ||
                                       e.y_pred == positive_label;
                            });
    if (!seen && std::find(predictions.labels.begin(), predictions.labels.end(),
                           positive_label) == predictions.labels.end())
        throw Error("UNKNOWN_POSITIVE_LABEL",
                    "'" + positive_label + "' is not a label of this set");

    ConfusionMatrix cm;
    for (const auto& e : predictions.entries) {
        bool actual = e.y_true == positive_label;
        bool predicted = e.y_pred == positive_label;
        if (actual && predicted) ++cm.tp;
        else if (!actual && predicted) ++cm.fp;
        else if (actual && !predicted) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

GroupedConfusion group_confusion(const PredictionSet& predictions,
                                 const std::string& protected_value,
                                 const std::string& positive_label) {
    PredictionSet prot, unprot;
    prot.labels = unprot.labels = predictions.labels;
    for (const auto& e : predictions.entries)
        (e.group == protected_value ? prot : unprot).entries.push_back(e);
    if (prot.entries.empty())
        throw Error("EMPTY_GROUP", "no entries with group '" + protected_value + "'");
    if (unprot.entries.empty())
        throw Error("EMPTY_GROUP",
                    "every entry has group '" + protected_value + "'");
    return {confusion(prot, positive_label), confusion(unprot, positive_label)};
}

PerformanceReport performance(const ConfusionMatrix& cm) {
    const int64_t n = cm.total();
    if (n == 0) throw Error("EMPTY_MATRIX", "confusion matrix has no entries");

    PerformanceReport r;
    auto ratio = [](int64_t num, int64_t den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    r.accuracy = ratio(cm.tp + cm.tn, n);
    r.sensitivity = ratio(cm.tp, cm.tp + cm.fn);
    r.specificity = ratio(cm.tn, cm.tn + cm.fp);
    if (r.sensitivity && r.specificity)
        r.balanced_accuracy = (*r.sensitivity + *r.specificity) / 2.0;
    r.f1 = ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn);
    const int64_t d1 = cm.tp + cm.fp, d2 = cm.tp + cm.fn;
    const int64_t d3 = cm.tn + cm.fp, d4 = cm.tn + cm.fn;
    if (d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0) {
        double num = static_cast<double>(cm.tp) * static_cast<double>(cm.tn) -
                     static_cast<double>(cm.fp) * static_cast<double>(cm.fn);
        double den = std::sqrt(static_cast<double>(d1)) *
                     std::sqrt(static_cast<double>(d2)) *
                     std::sqrt(static_cast<double>(d3)) *
                     std::sqrt(static_cast<double>(d4));
        r.mcc = num / den;
    }
    return r;
}

double eoo(const GroupedConfusion& gc) {
    const auto& p = gc.protected_group;
    const auto& u = gc.unprotected_group;
    if (p.tp + p.fn == 0 || u.tp + u.fn == 0)
        throw Error("UNDEFINED_METRIC", "a group has no actual positives");
    return static_cast<double>(p.tp) / static_cast<double>(p.tp + p.fn) -
           static_cast<double>(u.tp) / static_cast<double>(u.tp + u.fn);
}

double di(const GroupedConfusion& gc) {
    const auto& p = gc.protected_group;
    const auto& u = gc.unprotected_group;
    if (gc.n_protected() == 0 || gc.n_unprotected() == 0)
        throw Error("UNDEFINED_METRIC", "a group is empty");
    if (u.tp + u.fp == 0)
        throw Error("UNDEFINED_METRIC",
                    "unprotected group has no favorable outcomes");
    double rate_p = static_cast<double>(p.tp + p.fp) /
                    static_cast<double>(gc.n_protected());
    double rate_u = static_cast<double>(u.tp + u.fp) /
                    static_cast<double>(gc.n_unprotected());
    return rate_p / rate_u;
}

double abad(const GroupedConfusion& gc) {
    const auto& p = gc.protected_group;
    const auto& u = gc.unprotected_group;
    return 0.5 * static_cast<double>(p.tp + p.tn) -
           static_cast<double>(u.tp + u.tn);
}

}  // namespace varsel::metrics
