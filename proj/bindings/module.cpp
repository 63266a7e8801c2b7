#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "varsel/data.hpp"
#include "varsel/fm.hpp"
#include "varsel/fm_dsl.hpp"
#include "varsel/learners.hpp"
#include "varsel/metrics.hpp"
#include "varsel/pipeline.hpp"
#include "varsel/selector.hpp"

namespace py = pybind11;
using namespace varsel;

namespace {

data::LoadOptions make_load_options(const std::optional<std::string>& target,
                                    const std::optional<std::string>& sensitive,
                                    const std::vector<std::string>& text_columns) {
    data::LoadOptions options;
    options.target = target;
    options.sensitive = sensitive;
    options.text_columns = text_columns;
    return options;
}

}  // namespace

PYBIND11_MODULE(_varsel, m) {
    m.doc() = "Variability-aware ML algorithm selection with bias auditing";

    py::register_exception<Error>(m, "VarselError");

    // Feature models -----------------------------------------------------
    py::class_<fm::FeatureModel>(m, "FeatureModel");
    py::class_<fm::Configuration>(m, "Configuration")
        .def(py::init([](const std::set<std::string>& selected) {
                 return fm::Configuration{selected};
             }),
             py::arg("selected"))
        .def_property_readonly(
            "selected", [](const fm::Configuration& c) { return c.selected; });

    m.def("parse_fm", [](const std::string& text) { return fm_dsl::parse(text); });
    m.def("parse_fm_file",
          [](const std::string& path) { return fm_dsl::parse_file(path); });
    m.def("serialize_fm",
          [](const fm::FeatureModel& model) { return fm_dsl::serialize(model); });
    m.def("validate_model", [](const fm::FeatureModel& model) {
        std::vector<std::tuple<std::string, std::string, std::string>> out;
        for (const auto& v : fm::validate_model(model).violations)
            out.push_back({v.code, v.subject, v.detail});
        return out;
    });
    m.def("validate_configuration",
          [](const fm::FeatureModel& model, const std::set<std::string>& selected) {
              std::vector<std::tuple<std::string, std::string, std::string>> out;
              fm::Configuration config{selected};
              for (const auto& v :
                   fm::validate_configuration(model, config).violations)
                  out.push_back({v.code, v.subject, v.detail});
              return out;
          });
    m.def("enumerate_configurations",
          [](const fm::FeatureModel& model, int cap) {
              std::vector<std::set<std::string>> out;
              for (const auto& c : fm::enumerate_configurations(model, cap))
                  out.push_back(c.selected);
              return out;
          },
          py::arg("model"), py::arg("cap") = 24);
    m.def("to_dot",
          [](const fm::FeatureModel& model,
             const std::optional<std::set<std::string>>& highlight) {
              if (!highlight) return fm::to_dot(model);
              fm::Configuration config{*highlight};
              return fm::to_dot(model, &config);
          },
          py::arg("model"), py::arg("highlight") = py::none());

    // Data ---------------------------------------------------------------
    py::class_<data::TabularDataset>(m, "TabularDataset")
        .def_property_readonly("row_count",
                               [](const data::TabularDataset& ds) {
                                   return ds.rows.size();
                               })
        .def_property_readonly("column_names", [](const data::TabularDataset& ds) {
            std::vector<std::string> names;
            for (const auto& c : ds.columns) names.push_back(c.name);
            return names;
        });

    py::class_<data::DatasetProfile>(m, "DatasetProfile")
        .def_readonly("sample_size", &data::DatasetProfile::sample_size)
        .def_readonly("feature_count", &data::DatasetProfile::feature_count)
        .def_readonly("labeled", &data::DatasetProfile::labeled)
        .def_readonly("text_data", &data::DatasetProfile::text_data)
        .def_readonly("few_features", &data::DatasetProfile::few_features)
        .def_readonly("positive_fraction", &data::DatasetProfile::positive_fraction);

    m.def("load_csv",
          [](const std::string& path, const std::optional<std::string>& target,
             const std::optional<std::string>& sensitive,
             const std::vector<std::string>& text_columns) {
              return data::load_csv(path,
                                    make_load_options(target, sensitive, text_columns));
          },
          py::arg("path"), py::arg("target") = py::none(),
          py::arg("sensitive") = py::none(),
          py::arg("text_columns") = std::vector<std::string>{});
    m.def("profile", [](const data::TabularDataset& ds) {
        return data::profile(ds, {}, {});
    });
    m.def("stratified_split",
          [](const data::TabularDataset& ds, double test_fraction, uint64_t seed) {
              return data::stratified_split(ds, test_fraction, seed);
          });

    // Selection ----------------------------------------------------------
    m.def("recommend", [](const data::DatasetProfile& profile) {
        auto queue = selector::recommend(profile);
        std::vector<std::string> items;
        for (auto item : queue.items) items.push_back(selector::to_string(item));
        return py::make_tuple(items, queue.rationale);
    });

    // Metrics ------------------------------------------------------------
    m.def("performance", [](int64_t tp, int64_t fp, int64_t fn, int64_t tn) {
        auto r = metrics::performance({tp, fp, fn, tn});
        py::dict out;
        auto set = [&](const char* key, const std::optional<double>& v) {
            out[key] = v ? py::cast(*v) : py::none();
        };
        set("accuracy", r.accuracy);
        set("sensitivity", r.sensitivity);
        set("specificity", r.specificity);
        set("balanced_accuracy", r.balanced_accuracy);
        set("f1", r.f1);
        set("mcc", r.mcc);
        return out;
    });
    m.def("fairness",
          [](int64_t tp_p, int64_t fp_p, int64_t fn_p, int64_t tn_p, int64_t tp_u,
             int64_t fp_u, int64_t fn_u, int64_t tn_u) {
              metrics::GroupedConfusion gc{{tp_p, fp_p, fn_p, tn_p},
                                           {tp_u, fp_u, fn_u, tn_u}};
              py::dict out;
              out["eoo"] = metrics::eoo(gc);
              out["di"] = metrics::di(gc);
              out["abad"] = metrics::abad(gc);
              return out;
          });

    // Pipeline -----------------------------------------------------------
    m.def("run_pipeline",
          [](const std::string& csv_path, const std::string& target,
             const std::optional<std::string>& sensitive,
             const std::optional<std::string>& protected_value,
             const std::string& metric, double threshold, double test_fraction,
             uint64_t seed, const std::optional<std::string>& models_dir) {
              auto ds = data::load_csv(csv_path, make_load_options(target, sensitive, {}));
              pipeline::PipelineSettings settings;
              settings.criterion.metric = metric;
              settings.criterion.threshold = threshold;
              settings.test_fraction = test_fraction;
              settings.seed = seed;
              settings.protected_value = protected_value;
              std::optional<selector::BundledModels> models;
              if (models_dir) models = selector::BundledModels::load(*models_dir);
              auto report = pipeline::run_pipeline(ds, settings,
                                                   models ? &*models : nullptr);
              return pipeline::report_to_json(report);
          },
          py::arg("csv_path"), py::arg("target"), py::arg("sensitive") = py::none(),
          py::arg("protected_value") = py::none(), py::arg("metric") = "f1",
          py::arg("threshold") = 0.77, py::arg("test_fraction") = 0.2,
          py::arg("seed") = 0, py::arg("models_dir") = py::none());

    m.def("audit_file",
          [](const std::string& path, const std::string& protected_value,
             const std::optional<std::string>& positive_label) {
              learners::ImportOptions options;
              options.positive_label = positive_label;
              auto predictions = learners::import_predictions(path, options);
              std::string positive =
                  positive_label ? *positive_label : predictions.labels.back();
              auto [performance, fairness] =
                  pipeline::audit(predictions, protected_value, positive);
              py::dict out;
              out["f1"] = performance.f1 ? py::cast(*performance.f1) : py::none();
              out["eoo"] = fairness.eoo;
              out["di"] = fairness.di ? py::cast(*fairness.di) : py::none();
              out["abad"] = fairness.abad;
              return out;
          },
          py::arg("path"), py::arg("protected_value"),
          py::arg("positive_label") = py::none());

    m.attr("__version__") = pipeline::kToolVersion;
}
