#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "varsel/data.hpp"
#include "varsel/fm.hpp"
#include "varsel/learners.hpp"
#include "varsel/metrics.hpp"
#include "varsel/selector.hpp"

namespace varsel::pipeline {

inline constexpr const char* kToolVersion = "0.1.0";

enum class Comparator { GreaterEqual, LessEqual };

struct QualityCriterion {
    std::string metric = "f1";
    Comparator comparator = Comparator::GreaterEqual;
    double threshold = 0.77;
};

enum class TriggerAction { AdvanceQueue, Flag, Accept };

// Comparison over a report field, e.g. "eoo > 0.2"; first match by order wins.
struct TriggerRule {
    std::string field;
    std::string op;  // >, <, >=, <=
    double value = 0.0;
    TriggerAction action = TriggerAction::Flag;
    int order = 0;
};

TriggerRule parse_trigger(const std::string& condition, const std::string& action,
                          int order);

enum class Decision { Accepted, RejectedQuality, RejectedTrigger, Flagged };

std::string to_string(Decision decision);
std::string to_string(TriggerAction action);

struct CandidateRecord {
    selector::AlgorithmKind algorithm;
    std::optional<metrics::PerformanceReport> performance;
    std::optional<metrics::FairnessReport> fairness;
    Decision decision = Decision::RejectedQuality;
    std::vector<std::string> rule_trace;
};

struct SelectionReport {
    data::DatasetProfile profile;
    selector::MethodQueue queue;
    std::vector<CandidateRecord> candidates;
    std::optional<selector::AlgorithmKind> accepted;  // absent => EXHAUSTED
    uint64_t seed = 0;
    std::optional<fm::Configuration> configuration;
    std::string tool_version = kToolVersion;
};

struct PipelineSettings {
    QualityCriterion criterion;
    std::vector<TriggerRule> triggers;
    SelectorThresholds thresholds;
    uint64_t seed = 0;
    double test_fraction = 0.2;
    std::optional<std::string> protected_value;
    std::optional<std::string> positive_label;
    data::ProfileHint hint;
};

// True iff the metric is present and satisfies the comparison; an absent
// metric fails. Throws UNKNOWN_METRIC for a metric id outside the
// performance report.
bool evaluate_criterion(const metrics::PerformanceReport& report,
                        const QualityCriterion& criterion);

// First matching rule's action; no rules or no match -> Accept. Rules over
// absent fields are skipped with a trace note. Appends every evaluation to
// record.rule_trace and returns the resulting decision.
Decision apply_triggers(CandidateRecord& record,
                        const std::vector<TriggerRule>& rules);

// split -> profile -> recommend -> sequential train/evaluate/audit/triggers.
// Deterministic given (dataset, settings). `models`, when given, supplies
// the feature-model configuration of the accepted candidate.
SelectionReport run_pipeline(const data::TabularDataset& dataset,
                             const PipelineSettings& settings,
                             const selector::BundledModels* models = nullptr);

// Performance plus fairness for an imported predictions set.
std::pair<metrics::PerformanceReport, metrics::FairnessReport> audit(
    const metrics::PredictionSet& predictions, const std::string& protected_value,
    const std::string& positive_label);

// Graph text with the accepted configuration highlighted. Throws
// NOT_ACCEPTED on an exhausted report.
std::string render_instance(const SelectionReport& report,
                            const selector::BundledModels& models);

// Structured report document; numbers carry 10 significant digits, key
// order is fixed, no timestamps.
std::string report_to_json(const SelectionReport& report);
SelectionReport report_from_json(const std::string& text);

std::string report_to_text(const SelectionReport& report);

// Settings files: thresholds as a JSON object of the four cut points,
// triggers as a JSON array of {condition, action, order}.
SelectorThresholds load_thresholds_file(const std::string& path);
std::vector<TriggerRule> load_triggers_file(const std::string& path);

}  // namespace varsel::pipeline
