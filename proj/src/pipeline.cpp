#include "varsel/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace varsel::pipeline {

using json = nlohmann::ordered_json;
using selector::AlgorithmKind;

std::string to_string(Decision decision) {
    switch (decision) {
        case Decision::Accepted: return "ACCEPTED";
        case Decision::RejectedQuality: return "REJECTED_QUALITY";
        case Decision::RejectedTrigger: return "REJECTED_TRIGGER";
        case Decision::Flagged: return "FLAGGED";
    }
    return "?";
}

std::string to_string(TriggerAction action) {
    switch (action) {
        case TriggerAction::AdvanceQueue: return "ADVANCE_QUEUE";
        case TriggerAction::Flag: return "FLAG";
        case TriggerAction::Accept: return "ACCEPT";
    }
    return "?";
}

namespace {

Decision decision_from_string(const std::string& s) {
    if (s == "ACCEPTED") return Decision::Accepted;
    if (s == "REJECTED_QUALITY") return Decision::RejectedQuality;
    if (s == "REJECTED_TRIGGER") return Decision::RejectedTrigger;
    if (s == "FLAGGED") return Decision::Flagged;
    throw Error("BAD_DECISION", "unknown decision '" + s + "'");
}

TriggerAction action_from_string(const std::string& s) {
    if (s == "ADVANCE_QUEUE") return TriggerAction::AdvanceQueue;
    if (s == "FLAG") return TriggerAction::Flag;
    if (s == "ACCEPT") return TriggerAction::Accept;
    throw Error("BAD_TRIGGER", "unknown trigger action '" + s + "'");
}

bool fairness_field(const std::string& field) {
    return field == "eoo" || field == "di" || field == "abad";
}

std::optional<double> field_value(const CandidateRecord& record,
                                  const std::string& field) {
    if (fairness_field(field)) {
        if (!record.fairness) return std::nullopt;
        if (field == "eoo") return record.fairness->eoo;
        if (field == "di") return record.fairness->di;
        return record.fairness->abad;
    }
    if (!metrics::PerformanceReport::known_metric(field))
        throw Error("UNKNOWN_METRIC", "no report field named '" + field + "'");
    if (!record.performance) return std::nullopt;
    return record.performance->by_name(field);
}

// Fixed-format numbers, 10 significant digits.
std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

double round_number(double v) {
    return std::strtod(format_number(v).c_str(), nullptr);
}

json optional_number(const std::optional<double>& v) {
    if (!v) return nullptr;
    return round_number(*v);
}

}  // namespace

TriggerRule parse_trigger(const std::string& condition, const std::string& action,
                          int order) {
    std::istringstream in(condition);
    TriggerRule rule;
    std::string value_text;
    if (!(in >> rule.field >> rule.op >> value_text))
        throw Error("BAD_TRIGGER",
                    "condition must read '<field> <op> <value>', got '" +
                        condition + "'");
    std::string trailing;
    if (in >> trailing)
        throw Error("BAD_TRIGGER", "trailing text in condition '" + condition + "'");
    if (rule.op != ">" && rule.op != "<" && rule.op != ">=" && rule.op != "<=")
        throw Error("BAD_TRIGGER", "unknown comparator '" + rule.op + "'");
    if (!fairness_field(rule.field) &&
        !metrics::PerformanceReport::known_metric(rule.field))
        throw Error("UNKNOWN_METRIC", "no report field named '" + rule.field + "'");
    char* end = nullptr;
    rule.value = std::strtod(value_text.c_str(), &end);
    if (end != value_text.c_str() + value_text.size())
        throw Error("BAD_TRIGGER", "bad numeric value '" + value_text + "'");
    rule.action = action_from_string(action);
    rule.order = order;
    return rule;
}

bool evaluate_criterion(const metrics::PerformanceReport& report,
                        const QualityCriterion& criterion) {
    auto value = report.by_name(criterion.metric);  // throws UNKNOWN_METRIC
    if (!value) return false;
    return criterion.comparator == Comparator::GreaterEqual
               ? *value >= criterion.threshold
               : *value <= criterion.threshold;
}

Decision apply_triggers(CandidateRecord& record,
                        const std::vector<TriggerRule>& rules) {
    std::vector<const TriggerRule*> ordered;
    for (const auto& r : rules) ordered.push_back(&r);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const TriggerRule* a, const TriggerRule* b) {
                         return a->order < b->order;
                     });
    for (const TriggerRule* rule : ordered) {
        std::string head = "trigger [" + std::to_string(rule->order) + "] " +
                           rule->field + " " + rule->op + " " +
                           format_number(rule->value);
        std::optional<double> value;
        try {
            value = field_value(record, rule->field);
        } catch (const Error&) {
            value = std::nullopt;
        }
        if (!value) {
            record.rule_trace.push_back(head + ": field absent, rule skipped");
            continue;
        }
        bool hit = false;
        if (rule->op == ">") hit = *value > rule->value;
        else if (rule->op == "<") hit = *value < rule->value;
        else if (rule->op == ">=") hit = *value >= rule->value;
        else hit = *value <= rule->value;
        record.rule_trace.push_back(head + ": value " + format_number(*value) +
                                    (hit ? " -> " + to_string(rule->action)
                                         : " -> no match"));
        if (hit) {
            switch (rule->action) {
                case TriggerAction::AdvanceQueue: return Decision::RejectedTrigger;
                case TriggerAction::Flag: return Decision::Flagged;
                case TriggerAction::Accept: return Decision::Accepted;
            }
        }
    }
    record.rule_trace.push_back("no trigger matched -> ACCEPT");
    return Decision::Accepted;
}

SelectionReport run_pipeline(const data::TabularDataset& dataset,
                             const PipelineSettings& settings,
                             const selector::BundledModels* models) {
    auto [train_set, test_set] =
        data::stratified_split(dataset, settings.test_fraction, settings.seed);

    SelectionReport report;
    report.seed = settings.seed;
    report.profile = data::profile(dataset, settings.hint, settings.thresholds);
    report.queue = selector::recommend(report.profile, settings.thresholds);

    std::string positive = settings.positive_label
                               ? *settings.positive_label
                               : data::default_positive_label(dataset);

    for (AlgorithmKind item : report.queue.items) {
        if (selector::is_terminal(item)) break;

        CandidateRecord record;
        record.algorithm = item;

        if (!selector::is_trainable_classifier(item)) {
            record.decision = Decision::RejectedQuality;
            record.rule_trace.push_back("no in-house trainer for " +
                                        selector::to_string(item) +
                                        "; queue advances");
            report.candidates.push_back(std::move(record));
            continue;
        }

        metrics::PredictionSet predictions;
        try {
            learners::LearnerSpec spec;
            spec.kind = item;
            spec.seed = settings.seed;
            auto model = learners::train(spec, train_set);
            auto predicted = learners::predict(model, test_set);

            size_t group_col = test_set.sensitive
                                   ? test_set.column_index(*test_set.sensitive)
                                   : 0;
            size_t target_col = test_set.column_index(*test_set.target);
            predictions.labels = model.labels;
            for (size_t i = 0; i < test_set.rows.size(); ++i)
                predictions.entries.push_back(
                    {static_cast<int64_t>(i), test_set.rows[i][target_col],
                     predicted[i],
                     test_set.sensitive ? test_set.rows[i][group_col] : ""});
        } catch (const Error& e) {
            record.decision = Decision::RejectedQuality;
            record.rule_trace.push_back(std::string("training failed: ") +
                                        e.what());
            report.candidates.push_back(std::move(record));
            continue;
        }

        record.performance =
            metrics::performance(metrics::confusion(predictions, positive));

        if (test_set.sensitive && settings.protected_value) {
            try {
                auto gc = metrics::group_confusion(
                    predictions, *settings.protected_value, positive);
                metrics::FairnessReport fairness;
                fairness.eoo = metrics::eoo(gc);
                fairness.abad = metrics::abad(gc);
                try {
                    fairness.di = metrics::di(gc);
                } catch (const Error&) {
                    fairness.di = std::nullopt;
                }
                record.fairness = fairness;
            } catch (const Error& e) {
                record.rule_trace.push_back(std::string("fairness audit skipped: ") +
                                            e.what());
            }
        }

        bool passed = evaluate_criterion(*record.performance, settings.criterion);
        auto metric_value = record.performance->by_name(settings.criterion.metric);
        record.rule_trace.push_back(
            "criterion " + settings.criterion.metric +
            (settings.criterion.comparator == Comparator::GreaterEqual ? " >= "
                                                                       : " <= ") +
            format_number(settings.criterion.threshold) + ": value " +
            (metric_value ? format_number(*metric_value) : "absent") +
            (passed ? " -> pass" : " -> fail"));
        if (!passed) {
            record.decision = Decision::RejectedQuality;
            report.candidates.push_back(std::move(record));
            continue;
        }

        record.decision = apply_triggers(record, settings.triggers);
        bool accepted = record.decision == Decision::Accepted ||
                        record.decision == Decision::Flagged;
        report.candidates.push_back(std::move(record));
        if (accepted) {
            report.accepted = item;
            break;
        }
    }

    if (report.accepted && models) {
        std::vector<std::string> metric_ids = {settings.criterion.metric};
        if (test_set.sensitive && settings.protected_value) {
            metric_ids.push_back("eoo");
            metric_ids.push_back("di");
            metric_ids.push_back("abad");
        }
        report.configuration =
            selector::to_configuration(*report.accepted, report.profile,
                                       metric_ids, *models, settings.thresholds);
    }
    return report;
}

std::pair<metrics::PerformanceReport, metrics::FairnessReport> audit(
    const metrics::PredictionSet& predictions, const std::string& protected_value,
    const std::string& positive_label) {
    auto overall = metrics::performance(metrics::confusion(predictions, positive_label));
    auto gc = metrics::group_confusion(predictions, protected_value, positive_label);
    metrics::FairnessReport fairness;
    fairness.eoo = metrics::eoo(gc);
    fairness.abad = metrics::abad(gc);
    try {
        fairness.di = metrics::di(gc);
    } catch (const Error&) {
        fairness.di = std::nullopt;
    }
    return {overall, fairness};
}

std::string render_instance(const SelectionReport& report,
                            const selector::BundledModels& models) {
    if (!report.accepted || !report.configuration)
        throw Error("NOT_ACCEPTED", "report has no accepted configuration");
    return fm::to_dot(models.combined, &*report.configuration);
}

namespace {

json profile_to_json(const data::DatasetProfile& p) {
    const char* kind = nullptr;
    switch (p.prediction_kind) {
        case data::PredictionKind::Category: kind = "CATEGORY"; break;
        case data::PredictionKind::Quantity: kind = "QUANTITY"; break;
        case data::PredictionKind::JustLooking: kind = "JUST_LOOKING"; break;
        case data::PredictionKind::None: kind = "NONE"; break;
    }
    json j;
    j["sample_size"] = p.sample_size;
    j["feature_count"] = p.feature_count;
    j["labeled"] = p.labeled;
    j["prediction_kind"] = kind;
    j["text_data"] = p.text_data;
    j["few_features"] = p.few_features;
    j["positive_fraction"] = optional_number(p.positive_fraction);
    j["known_category_count"] =
        p.known_category_count ? json(*p.known_category_count) : json(nullptr);
    return j;
}

data::DatasetProfile profile_from_json(const json& j) {
    data::DatasetProfile p;
    p.sample_size = j.at("sample_size");
    p.feature_count = j.at("feature_count");
    p.labeled = j.at("labeled");
    std::string kind = j.at("prediction_kind");
    if (kind == "CATEGORY") p.prediction_kind = data::PredictionKind::Category;
    else if (kind == "QUANTITY") p.prediction_kind = data::PredictionKind::Quantity;
    else if (kind == "JUST_LOOKING")
        p.prediction_kind = data::PredictionKind::JustLooking;
    else p.prediction_kind = data::PredictionKind::None;
    p.text_data = j.at("text_data");
    p.few_features = j.at("few_features");
    if (!j.at("positive_fraction").is_null())
        p.positive_fraction = j.at("positive_fraction").get<double>();
    if (!j.at("known_category_count").is_null())
        p.known_category_count = j.at("known_category_count").get<int>();
    return p;
}

json performance_to_json(const metrics::PerformanceReport& r) {
    json j;
    j["accuracy"] = optional_number(r.accuracy);
    j["sensitivity"] = optional_number(r.sensitivity);
    j["specificity"] = optional_number(r.specificity);
    j["balanced_accuracy"] = optional_number(r.balanced_accuracy);
    j["f1"] = optional_number(r.f1);
    j["mcc"] = optional_number(r.mcc);
    return j;
}

metrics::PerformanceReport performance_from_json(const json& j) {
    metrics::PerformanceReport r;
    auto get = [&](const char* key) -> std::optional<double> {
        if (j.at(key).is_null()) return std::nullopt;
        return j.at(key).get<double>();
    };
    r.accuracy = get("accuracy");
    r.sensitivity = get("sensitivity");
    r.specificity = get("specificity");
    r.balanced_accuracy = get("balanced_accuracy");
    r.f1 = get("f1");
    r.mcc = get("mcc");
    return r;
}

}  // namespace

std::string report_to_json(const SelectionReport& report) {
    json j;
    j["profile"] = profile_to_json(report.profile);
    json queue;
    json items = json::array();
    for (auto item : report.queue.items) items.push_back(selector::to_string(item));
    queue["items"] = std::move(items);
    queue["rationale"] = report.queue.rationale;
    j["queue"] = std::move(queue);

    json candidates = json::array();
    for (const auto& c : report.candidates) {
        json cj;
        cj["algorithm"] = selector::to_string(c.algorithm);
        cj["performance"] =
            c.performance ? performance_to_json(*c.performance) : json(nullptr);
        if (c.fairness) {
            json fj;
            fj["eoo"] = round_number(c.fairness->eoo);
            fj["di"] = optional_number(c.fairness->di);
            fj["abad"] = round_number(c.fairness->abad);
            cj["fairness"] = std::move(fj);
        } else {
            cj["fairness"] = nullptr;
        }
        cj["decision"] = to_string(c.decision);
        cj["rule_trace"] = c.rule_trace;
        candidates.push_back(std::move(cj));
    }
    j["candidates"] = std::move(candidates);

    if (report.accepted) {
        j["outcome"] = {{"status", "ACCEPTED"},
                        {"algorithm", selector::to_string(*report.accepted)}};
    } else {
        j["outcome"] = {{"status", "EXHAUSTED"}};
    }
    j["seed"] = report.seed;
    if (report.configuration) {
        json sel = json::array();
        for (const auto& id : report.configuration->selected) sel.push_back(id);
        j["configuration"] = std::move(sel);
    } else {
        j["configuration"] = nullptr;
    }
    j["tool_version"] = report.tool_version;
    return j.dump(2) + "\n";
}

SelectionReport report_from_json(const std::string& text) {
    json j = json::parse(text);
    SelectionReport report;
    report.profile = profile_from_json(j.at("profile"));
    for (const auto& item : j.at("queue").at("items"))
        report.queue.items.push_back(
            selector::algorithm_from_string(item.get<std::string>()));
    report.queue.rationale =
        j.at("queue").at("rationale").get<std::vector<std::string>>();
    for (const auto& cj : j.at("candidates")) {
        CandidateRecord c;
        c.algorithm = selector::algorithm_from_string(cj.at("algorithm"));
        if (!cj.at("performance").is_null())
            c.performance = performance_from_json(cj.at("performance"));
        if (!cj.at("fairness").is_null()) {
            metrics::FairnessReport f;
            f.eoo = cj.at("fairness").at("eoo");
            if (!cj.at("fairness").at("di").is_null())
                f.di = cj.at("fairness").at("di").get<double>();
            f.abad = cj.at("fairness").at("abad");
            c.fairness = f;
        }
        c.decision = decision_from_string(cj.at("decision"));
        c.rule_trace = cj.at("rule_trace").get<std::vector<std::string>>();
        report.candidates.push_back(std::move(c));
    }
    if (j.at("outcome").at("status") == "ACCEPTED")
        report.accepted = selector::algorithm_from_string(
            j.at("outcome").at("algorithm").get<std::string>());
    report.seed = j.at("seed");
    if (!j.at("configuration").is_null()) {
        fm::Configuration config;
        for (const auto& id : j.at("configuration"))
            config.selected.insert(id.get<std::string>());
        report.configuration = std::move(config);
    }
    report.tool_version = j.at("tool_version");
    return report;
}

std::string report_to_text(const SelectionReport& report) {
    std::ostringstream out;
    out << "profile: sample_size=" << report.profile.sample_size
        << " feature_count=" << report.profile.feature_count
        << " labeled=" << (report.profile.labeled ? "yes" : "no") << "\n";
    out << "queue:";
    for (auto item : report.queue.items) out << " " << selector::to_string(item);
    out << "\n";
    for (const auto& c : report.candidates) {
        out << "candidate " << selector::to_string(c.algorithm) << ": "
            << to_string(c.decision);
        if (c.performance && c.performance->f1)
            out << " (f1 " << format_number(*c.performance->f1) << ")";
        if (c.fairness) {
            out << " [eoo " << format_number(c.fairness->eoo);
            if (c.fairness->di) out << ", di " << format_number(*c.fairness->di);
            out << ", abad " << format_number(c.fairness->abad) << "]";
        }
        out << "\n";
        for (const auto& line : c.rule_trace) out << "  " << line << "\n";
    }
    if (report.accepted)
        out << "outcome: ACCEPTED " << selector::to_string(*report.accepted) << "\n";
    else
        out << "outcome: EXHAUSTED\n";
    return out.str();
}

SelectorThresholds load_thresholds_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("FILE_NOT_FOUND", "cannot open " + path);
    json j = json::parse(in);
    SelectorThresholds t;
    if (j.contains("min_samples")) t.min_samples = j["min_samples"];
    if (j.contains("large_dataset")) t.large_dataset = j["large_dataset"];
    if (j.contains("clustering_large")) t.clustering_large = j["clustering_large"];
    if (j.contains("few_features")) t.few_features = j["few_features"];
    t.check();
    return t;
}

std::vector<TriggerRule> load_triggers_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("FILE_NOT_FOUND", "cannot open " + path);
    json j = json::parse(in);
    std::vector<TriggerRule> rules;
    for (const auto& r : j)
        rules.push_back(parse_trigger(r.at("condition"), r.at("action"),
                                      r.value("order", 0)));
    return rules;
}

}  // namespace varsel::pipeline
