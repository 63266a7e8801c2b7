// Acceptance harness: one pass/fail line per criterion, nonzero exit when
// any criterion fails. Run from the repository root so the bundled data and
// model files resolve.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "varsel/data.hpp"
#include "varsel/fm.hpp"
#include "varsel/fm_dsl.hpp"
#include "varsel/learners.hpp"
#include "varsel/metrics.hpp"
#include "varsel/pipeline.hpp"
#include "varsel/rng.hpp"
#include "varsel/selector.hpp"

using namespace varsel;
using selector::AlgorithmKind;

namespace {

struct Criterion {
    int number;
    std::string title;
    double time_limit_s;
    std::function<void()> body;
};

void require(bool condition, const std::string& detail) {
    if (!condition) throw std::runtime_error(detail);
}

data::TabularDataset heart() {
    data::LoadOptions options;
    options.target = "DEATH_EVENT";
    options.sensitive = "sex";
    return data::load_csv("data/heart_failure.csv", options);
}

std::vector<std::string> queue_names(const selector::MethodQueue& queue) {
    std::vector<std::string> out;
    for (auto item : queue.items) out.push_back(selector::to_string(item));
    return out;
}

// ---- criterion bodies ---------------------------------------------------

void criterion_queue_exactness() {
    auto profile = data::profile(heart(), {}, {});
    auto queue = selector::recommend(profile);
    std::vector<std::string> expected = {"LINEAR_SVC", "KNN", "RBF_SVC",
                                         "ENSEMBLE", "TOUGH_LUCK"};
    require(queue_names(queue) == expected, "queue differs from the expected list");
}

void criterion_large_data_switch() {
    auto profile = data::profile(heart(), {}, {});
    profile.sample_size = 120000;
    auto queue = selector::recommend(profile);
    require(!queue.items.empty() &&
                queue.items.front() == AlgorithmKind::SgdClassifier,
            "queue head is not SGD_CLASSIFIER at 120000 samples");
}

void criterion_fairness_oracle() {
    // Fixed fixtures first: EOO 0.375, DI 15/14, ABAD 3.
    metrics::GroupedConfusion fixture{{6, 8, 2, 12}, {3, 4, 5, 3}};
    require(std::abs(metrics::eoo(fixture) - 0.375) < 1e-12, "EOO fixture");
    require(std::abs(metrics::di(fixture) - 15.0 / 14.0) < 1e-12, "DI fixture");
    require(std::abs(metrics::abad(fixture) - 3.0) < 1e-12, "ABAD fixture");

    SplitMix64 rng(31337);
    int checked = 0;
    while (checked < 1000) {
        metrics::GroupedConfusion gc{
            {int64_t(rng.bounded(51)), int64_t(rng.bounded(51)),
             int64_t(rng.bounded(51)), int64_t(rng.bounded(51))},
            {int64_t(rng.bounded(51)), int64_t(rng.bounded(51)),
             int64_t(rng.bounded(51)), int64_t(rng.bounded(51))}};
        const auto& p = gc.protected_group;
        const auto& u = gc.unprotected_group;
        // Preconditions: both groups populated, actual positives on both
        // sides, favorable outcomes in the unprotected group.
        if (p.total() == 0 || u.total() == 0) continue;
        if (p.tp + p.fn == 0 || u.tp + u.fn == 0) continue;
        if (u.tp + u.fp == 0) continue;
        ++checked;

        double expected_eoo = double(p.tp) / double(p.tp + p.fn) -
                              double(u.tp) / double(u.tp + u.fn);
        double expected_di = (double(p.tp + p.fp) / double(p.total())) /
                             (double(u.tp + u.fp) / double(u.total()));
        double expected_abad = (double(p.tp) + double(p.tn)) / 2.0 -
                               (double(u.tp) + double(u.tn));
        require(std::abs(metrics::eoo(gc) - expected_eoo) < 1e-12, "EOO oracle");
        require(std::abs(metrics::di(gc) - expected_di) < 1e-12, "DI oracle");
        require(std::abs(metrics::abad(gc) - expected_abad) < 1e-12,
                "ABAD oracle");
    }
}

void criterion_performance_oracle() {
    SplitMix64 rng(2718);
    int checked = 0;
    while (checked < 1000) {
        metrics::ConfusionMatrix cm{int64_t(rng.bounded(51)),
                                    int64_t(rng.bounded(51)),
                                    int64_t(rng.bounded(51)),
                                    int64_t(rng.bounded(51))};
        if (cm.total() == 0) continue;
        ++checked;
        auto r = metrics::performance(cm);

        double tp = double(cm.tp), fp = double(cm.fp), fn = double(cm.fn),
               tn = double(cm.tn);
        auto close = [](const std::optional<double>& got, double expected) {
            return got && std::abs(*got - expected) < 1e-12;
        };
        require(close(r.accuracy, (tp + tn) / double(cm.total())), "accuracy");
        if (tp + fn > 0)
            require(close(r.sensitivity, tp / (tp + fn)), "sensitivity");
        else
            require(!r.sensitivity, "sensitivity should be absent");
        if (tn + fp > 0)
            require(close(r.specificity, tn / (tn + fp)), "specificity");
        else
            require(!r.specificity, "specificity should be absent");
        if (tp + fn > 0 && tn + fp > 0)
            require(close(r.balanced_accuracy,
                          (tp / (tp + fn) + tn / (tn + fp)) / 2.0),
                    "balanced accuracy");
        else
            require(!r.balanced_accuracy, "balanced accuracy should be absent");
        if (2 * tp + fp + fn > 0)
            require(close(r.f1, 2 * tp / (2 * tp + fp + fn)), "f1");
        else
            require(!r.f1, "f1 should be absent");
        double denom = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
        if (denom > 0)
            require(close(r.mcc, (tp * tn - fp * fn) / denom), "mcc");
        else
            require(!r.mcc, "mcc should be absent");
    }
}

void criterion_enumeration_oracle() {
    SplitMix64 rng(6060);
    for (int trial = 0; trial < 50; ++trial) {
        auto model = testutil::random_model(rng, 12);
        require(fm::validate_model(model).ok(), "random model invalid");

        std::vector<std::set<std::string>> expected;
        size_t n = model.features.size();
        for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
            fm::Configuration c;
            for (size_t i = 0; i < n; ++i)
                if (mask & (uint64_t{1} << i))
                    c.selected.insert(model.features[i].id);
            if (fm::validate_configuration(model, c).ok())
                expected.push_back(c.selected);
        }
        std::sort(expected.begin(), expected.end());

        auto got = fm::enumerate_configurations(model, 24);
        require(got.size() == expected.size(), "configuration count differs");
        for (size_t i = 0; i < got.size(); ++i)
            require(got[i].selected == expected[i], "configuration set differs");
    }
}

void criterion_dsl_round_trip() {
    SplitMix64 rng(1234);
    for (int trial = 0; trial < 200; ++trial) {
        auto model = testutil::random_model(rng, 10);
        auto reparsed = fm_dsl::parse(fm_dsl::serialize(model));
        require(fm_dsl::structurally_equal(model, reparsed),
                "random model round trip");
    }
    for (const char* path :
         {"models/ml_techniques.fm", "models/modeling_assumptions.fm"}) {
        auto model = fm_dsl::parse_file(path);
        auto reparsed = fm_dsl::parse(fm_dsl::serialize(model));
        require(fm_dsl::structurally_equal(model, reparsed),
                std::string(path) + " round trip");
    }

    auto models = selector::BundledModels::load("models");
    auto profile = data::profile(heart(), {}, {});
    auto queue = selector::recommend(profile);
    for (auto item : queue.items) {
        if (selector::is_terminal(item)) continue;
        auto config = selector::to_configuration(item, profile,
                                                 {"f1", "eoo", "di", "abad"},
                                                 models);
        require(fm::validate_configuration(models.combined, config).ok(),
                "instance configuration invalid for " +
                    selector::to_string(item));
    }
}

void criterion_end_to_end() {
    auto ds = heart();
    pipeline::PipelineSettings settings;
    settings.criterion.metric = "f1";
    settings.criterion.threshold = 0.77;
    settings.seed = 42;
    settings.protected_value = "1";
    auto models = selector::BundledModels::load("models");

    auto report = pipeline::run_pipeline(ds, settings, &models);
    require(!report.candidates.empty(), "no candidates were tried");

    // Candidates strictly in queue order.
    for (size_t i = 0; i < report.candidates.size(); ++i)
        require(report.candidates[i].algorithm == report.queue.items[i],
                "candidate order diverges from the queue");

    // Byte-identical repeat with the same seed.
    auto repeat = pipeline::run_pipeline(ds, settings, &models);
    require(pipeline::report_to_json(report) == pipeline::report_to_json(repeat),
            "same-seed reports differ");

    // The linear head must beat the 0.547 no-imbalance-handling baseline.
    require(!report.candidates.empty() &&
                report.candidates.front().algorithm == AlgorithmKind::LinearSvc,
            "first candidate is not the linear SVC");
    const auto& head = report.candidates.front();
    require(head.performance && head.performance->f1, "linear SVC has no F1");
    require(*head.performance->f1 > 0.547,
            "linear SVC F1 " + std::to_string(*head.performance->f1) +
                " does not beat 0.547");
}

void criterion_split_arithmetic() {
    auto [train, test] = data::stratified_split(heart(), 0.2, 42);
    require(train.rows.size() == 239, "train size");
    require(test.rows.size() == 60, "test size");
    size_t target = test.column_index("DEATH_EVENT");
    size_t positives = 0;
    for (const auto& row : test.rows)
        if (row[target] == "1") ++positives;
    require(positives == 19, "test positives");
    require(test.rows.size() - positives == 41, "test negatives");
}

void criterion_trigger_semantics() {
    // Constructed fixture whose audited EOO (0.375) exceeds the 0.2 bound.
    metrics::PredictionSet set;
    set.labels = {"neg", "pos"};
    auto fill = [&](int count, const char* y_true, const char* y_pred,
                    const char* group) {
        for (int i = 0; i < count; ++i) {
            int64_t id = static_cast<int64_t>(set.entries.size());
            set.entries.push_back({id, y_true, y_pred, group});
        }
    };
    fill(6, "pos", "pos", "P");
    fill(8, "neg", "pos", "P");
    fill(2, "pos", "neg", "P");
    fill(12, "neg", "neg", "P");
    fill(3, "pos", "pos", "U");
    fill(4, "neg", "pos", "U");
    fill(5, "pos", "neg", "U");
    fill(3, "neg", "neg", "U");

    auto [performance, fairness] = pipeline::audit(set, "P", "pos");
    pipeline::CandidateRecord record;
    record.algorithm = AlgorithmKind::LinearSvc;
    record.performance = performance;
    record.fairness = fairness;
    auto rule = pipeline::parse_trigger("eoo > 0.2", "ADVANCE_QUEUE", 1);
    require(pipeline::apply_triggers(record, {rule}) ==
                pipeline::Decision::RejectedTrigger,
            "matching trigger did not reject");

    // In the pipeline the rejection advances the queue to the next item.
    pipeline::PipelineSettings settings;
    settings.criterion.threshold = 0.0;
    settings.seed = 42;
    settings.protected_value = "1";
    settings.triggers = {pipeline::parse_trigger("eoo > -1.0", "ADVANCE_QUEUE", 1)};
    auto report = pipeline::run_pipeline(heart(), settings);
    require(report.candidates.size() >= 2,
            "trigger rejection did not advance the queue");
    for (const auto& c : report.candidates)
        require(c.decision == pipeline::Decision::RejectedTrigger,
                "candidate not rejected by trigger");
    require(!report.accepted.has_value(), "report accepted despite triggers");
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "queue exactness on the bundled dataset", 1.0,
         criterion_queue_exactness},
        {2, "large-data switch to SGD_CLASSIFIER", 1.0,
         criterion_large_data_switch},
        {3, "fairness formula oracle", 5.0, criterion_fairness_oracle},
        {4, "performance metric oracle", 5.0, criterion_performance_oracle},
        {5, "configuration enumeration oracle", 30.0,
         criterion_enumeration_oracle},
        {6, "DSL round-trip and instance validity", 10.0,
         criterion_dsl_round_trip},
        {7, "end-to-end selection mechanism", 60.0, criterion_end_to_end},
        {8, "stratified split arithmetic", 1.0, criterion_split_arithmetic},
        {9, "reconfiguration trigger semantics", 1.0,
         criterion_trigger_semantics},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        auto start = std::chrono::steady_clock::now();
        std::string failure;
        try {
            criterion.body();
        } catch (const std::exception& e) {
            failure = e.what();
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        if (failure.empty() && elapsed > criterion.time_limit_s)
            failure = "exceeded time limit of " +
                      std::to_string(criterion.time_limit_s) + " s";
        if (failure.empty()) {
            std::printf("PASS criterion %d: %s (%.2f s)\n", criterion.number,
                        criterion.title.c_str(), elapsed);
        } else {
            std::printf("FAIL criterion %d: %s (%.2f s): %s\n", criterion.number,
                        criterion.title.c_str(), elapsed, failure.c_str());
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}
