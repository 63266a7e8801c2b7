#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "varsel/data.hpp"
#include "varsel/fm.hpp"
#include "varsel/fm_dsl.hpp"
#include "varsel/learners.hpp"
#include "varsel/pipeline.hpp"
#include "varsel/selector.hpp"

namespace {

using json = nlohmann::ordered_json;

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw varsel::Error("FILE_NOT_FOUND", "cannot write " + out_path);
    out << text;
}

varsel::data::LoadOptions load_options(const std::string& target,
                                       const std::string& sensitive) {
    varsel::data::LoadOptions options;
    if (!target.empty()) options.target = target;
    if (!sensitive.empty()) options.sensitive = sensitive;
    return options;
}

std::string profile_json(const varsel::data::DatasetProfile& p) {
    const char* kind = nullptr;
    switch (p.prediction_kind) {
        case varsel::data::PredictionKind::Category: kind = "CATEGORY"; break;
        case varsel::data::PredictionKind::Quantity: kind = "QUANTITY"; break;
        case varsel::data::PredictionKind::JustLooking: kind = "JUST_LOOKING"; break;
        case varsel::data::PredictionKind::None: kind = "NONE"; break;
    }
    json j;
    j["sample_size"] = p.sample_size;
    j["feature_count"] = p.feature_count;
    j["labeled"] = p.labeled;
    j["prediction_kind"] = kind;
    j["text_data"] = p.text_data;
    j["few_features"] = p.few_features;
    j["positive_fraction"] =
        p.positive_fraction ? json(*p.positive_fraction) : json(nullptr);
    return j.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variability-aware ML algorithm selection with bias auditing"};
    app.require_subcommand(1);

    // Common option storage.
    std::string csv_path, target, sensitive, out_path;
    std::string format = "json";
    std::string protected_value, positive_label;
    std::string metric = "f1";
    double threshold = 0.77;
    double test_fraction = 0.2;
    uint64_t seed = 0;
    std::string thresholds_file, triggers_file;
    std::string models_dir = "models";

    auto add_common = [&](CLI::App* cmd, bool dataset_cmd) {
        if (dataset_cmd) {
            cmd->add_option("csv", csv_path, "input CSV file")->required();
            cmd->add_option("--target", target, "target column name");
            cmd->add_option("--sensitive", sensitive, "sensitive column name");
        }
        cmd->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"json", "text"}));
        cmd->add_option("--out", out_path, "write output to file");
        cmd->add_option("--thresholds-file", thresholds_file,
                        "selector thresholds JSON file");
    };

    auto* cmd_profile = app.add_subcommand("profile", "profile a dataset");
    add_common(cmd_profile, true);

    auto* cmd_select =
        app.add_subcommand("select", "recommend a method queue with explanations");
    add_common(cmd_select, true);

    auto* cmd_run = app.add_subcommand("run", "full selection pipeline");
    add_common(cmd_run, true);
    cmd_run->add_option("--protected-value", protected_value,
                        "sensitive value marking the protected group");
    cmd_run->add_option("--positive-label", positive_label, "positive class label");
    cmd_run->add_option("--metric", metric, "quality criterion metric");
    cmd_run->add_option("--threshold", threshold, "quality criterion threshold");
    cmd_run->add_option("--test-fraction", test_fraction, "test split fraction");
    cmd_run->add_option("--seed", seed, "split and learner seed");
    cmd_run->add_option("--triggers-file", triggers_file, "trigger rules JSON file");
    cmd_run->add_option("--models-dir", models_dir, "bundled feature model dir");

    auto* cmd_audit =
        app.add_subcommand("audit", "performance + fairness of a predictions file");
    cmd_audit->add_option("csv", csv_path, "predictions CSV file")->required();
    cmd_audit->add_option("--protected-value", protected_value,
                          "group value marking the protected group")
        ->required();
    cmd_audit->add_option("--positive-label", positive_label,
                          "positive class label");
    cmd_audit->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"json", "text"}));
    cmd_audit->add_option("--out", out_path, "write output to file");

    auto* cmd_fm = app.add_subcommand("fm", "feature model tools");
    cmd_fm->require_subcommand(1);
    std::string fm_path;
    int cap = 24;
    std::vector<std::string> highlight_ids;
    auto* fm_validate = cmd_fm->add_subcommand("validate", "validate a .fm file");
    fm_validate->add_option("file", fm_path, ".fm file")->required();
    auto* fm_enumerate =
        cmd_fm->add_subcommand("enumerate", "list all valid configurations");
    fm_enumerate->add_option("file", fm_path, ".fm file")->required();
    fm_enumerate->add_option("--cap", cap, "max feature count");
    auto* fm_render = cmd_fm->add_subcommand("render", "emit graphviz text");
    fm_render->add_option("file", fm_path, ".fm file")->required();
    fm_render->add_option("--highlight", highlight_ids,
                          "feature ids of a configuration to highlight");
    fm_render->add_option("--out", out_path, "write output to file");

    CLI11_PARSE(app, argc, argv);

    try {
        varsel::SelectorThresholds thresholds;
        if (!thresholds_file.empty())
            thresholds = varsel::pipeline::load_thresholds_file(thresholds_file);

        if (*cmd_profile) {
            auto ds = varsel::data::load_csv(csv_path, load_options(target, sensitive));
            auto p = varsel::data::profile(ds, {}, thresholds);
            emit(profile_json(p), out_path);
        } else if (*cmd_select) {
            auto ds = varsel::data::load_csv(csv_path, load_options(target, sensitive));
            auto p = varsel::data::profile(ds, {}, thresholds);
            auto queue = varsel::selector::recommend(p, thresholds);
            if (format == "json") {
                json j;
                json items = json::array();
                for (auto item : queue.items)
                    items.push_back(varsel::selector::to_string(item));
                j["items"] = std::move(items);
                j["rationale"] = queue.rationale;
                emit(j.dump(2) + "\n", out_path);
            } else {
                std::string text;
                for (size_t i = 0; i < queue.items.size(); ++i)
                    text += varsel::selector::to_string(queue.items[i]) + ": " +
                            queue.rationale[i] + "\n";
                emit(text, out_path);
            }
        } else if (*cmd_run) {
            auto ds = varsel::data::load_csv(csv_path, load_options(target, sensitive));
            varsel::pipeline::PipelineSettings settings;
            settings.criterion.metric = metric;
            settings.criterion.threshold = threshold;
            settings.thresholds = thresholds;
            settings.seed = seed;
            settings.test_fraction = test_fraction;
            if (!protected_value.empty()) settings.protected_value = protected_value;
            if (!positive_label.empty()) settings.positive_label = positive_label;
            if (!triggers_file.empty())
                settings.triggers = varsel::pipeline::load_triggers_file(triggers_file);
            std::optional<varsel::selector::BundledModels> models;
            try {
                models = varsel::selector::BundledModels::load(models_dir);
            } catch (const varsel::Error&) {
                // Feature-model rendering is optional for a run.
            }
            auto report = varsel::pipeline::run_pipeline(
                ds, settings, models ? &*models : nullptr);
            emit(format == "json" ? varsel::pipeline::report_to_json(report)
                                  : varsel::pipeline::report_to_text(report),
                 out_path);
        } else if (*cmd_audit) {
            varsel::learners::ImportOptions options;
            if (!positive_label.empty()) options.positive_label = positive_label;
            auto predictions = varsel::learners::import_predictions(csv_path, options);
            std::string positive = options.positive_label
                                       ? *options.positive_label
                                       : predictions.labels.back();
            auto [performance, fairness] =
                varsel::pipeline::audit(predictions, protected_value, positive);
            json j;
            auto opt = [](const std::optional<double>& v) {
                return v ? json(*v) : json(nullptr);
            };
            j["performance"] = {{"accuracy", opt(performance.accuracy)},
                                {"sensitivity", opt(performance.sensitivity)},
                                {"specificity", opt(performance.specificity)},
                                {"balanced_accuracy", opt(performance.balanced_accuracy)},
                                {"f1", opt(performance.f1)},
                                {"mcc", opt(performance.mcc)}};
            j["fairness"] = {{"eoo", fairness.eoo},
                             {"di", opt(fairness.di)},
                             {"abad", fairness.abad}};
            emit(j.dump(2) + "\n", out_path);
        } else if (*fm_validate) {
            auto model = varsel::fm_dsl::parse_file(fm_path);
            auto result = varsel::fm::validate_model(model);
            if (result.ok()) {
                std::cout << "OK\n";
            } else {
                for (const auto& v : result.violations)
                    std::cout << v.code << " " << v.subject << ": " << v.detail
                              << "\n";
                return 1;
            }
        } else if (*fm_enumerate) {
            auto model = varsel::fm_dsl::parse_file(fm_path);
            auto configs = varsel::fm::enumerate_configurations(model, cap);
            for (const auto& c : configs) {
                bool first = true;
                for (const auto& id : c.selected) {
                    std::cout << (first ? "" : " ") << id;
                    first = false;
                }
                std::cout << "\n";
            }
        } else if (*fm_render) {
            auto model = varsel::fm_dsl::parse_file(fm_path);
            if (highlight_ids.empty()) {
                emit(varsel::fm::to_dot(model), out_path);
            } else {
                varsel::fm::Configuration config;
                config.selected.insert(highlight_ids.begin(), highlight_ids.end());
                emit(varsel::fm::to_dot(model, &config), out_path);
            }
        }
    } catch (const varsel::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
