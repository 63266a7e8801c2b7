#include "varsel/selector.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "varsel/fm_dsl.hpp"

namespace varsel::selector {

using data::DatasetProfile;
using data::PredictionKind;

namespace {

const std::map<AlgorithmKind, std::string> kAlgorithmNames = {
    {AlgorithmKind::LinearSvc, "LINEAR_SVC"},
    {AlgorithmKind::NaiveBayes, "NAIVE_BAYES"},
    {AlgorithmKind::Knn, "KNN"},
    {AlgorithmKind::RbfSvc, "RBF_SVC"},
    {AlgorithmKind::Ensemble, "ENSEMBLE"},
    {AlgorithmKind::SgdClassifier, "SGD_CLASSIFIER"},
    {AlgorithmKind::KernelApproximation, "KERNEL_APPROXIMATION"},
    {AlgorithmKind::KMeans, "KMEANS"},
    {AlgorithmKind::MiniBatchKMeans, "MINIBATCH_KMEANS"},
    {AlgorithmKind::MeanShift, "MEANSHIFT"},
    {AlgorithmKind::Vbgmm, "VBGMM"},
    {AlgorithmKind::Lasso, "LASSO"},
    {AlgorithmKind::ElasticNet, "ELASTICNET"},
    {AlgorithmKind::Ridge, "RIDGE"},
    {AlgorithmKind::SvrLinear, "SVR_LINEAR"},
    {AlgorithmKind::SvrRbf, "SVR_RBF"},
    {AlgorithmKind::SgdRegressor, "SGD_REGRESSOR"},
    {AlgorithmKind::EnsembleRegressor, "ENSEMBLE_REGRESSOR"},
    {AlgorithmKind::RandomizedPca, "RANDOMIZED_PCA"},
    {AlgorithmKind::Isomap, "ISOMAP"},
    {AlgorithmKind::SpectralEmbedding, "SPECTRAL_EMBEDDING"},
    {AlgorithmKind::Lle, "LLE"},
    {AlgorithmKind::GetMoreData, "GET_MORE_DATA"},
    {AlgorithmKind::ToughLuck, "TOUGH_LUCK"},
};

std::string kind_name(PredictionKind kind) {
    switch (kind) {
        case PredictionKind::Category: return "CATEGORY";
        case PredictionKind::Quantity: return "QUANTITY";
        case PredictionKind::JustLooking: return "JUST_LOOKING";
        case PredictionKind::None: return "NONE";
    }
    return "?";
}

}  // namespace

std::string to_string(AlgorithmKind kind) { return kAlgorithmNames.at(kind); }

AlgorithmKind algorithm_from_string(const std::string& name) {
    for (const auto& [kind, text] : kAlgorithmNames)
        if (text == name) return kind;
    throw Error("UNKNOWN_ALGORITHM", "no algorithm named '" + name + "'");
}

bool is_terminal(AlgorithmKind kind) {
    return kind == AlgorithmKind::GetMoreData || kind == AlgorithmKind::ToughLuck;
}

bool is_trainable_classifier(AlgorithmKind kind) {
    switch (kind) {
        case AlgorithmKind::LinearSvc:
        case AlgorithmKind::NaiveBayes:
        case AlgorithmKind::Knn:
        case AlgorithmKind::RbfSvc:
        case AlgorithmKind::Ensemble:
        case AlgorithmKind::SgdClassifier:
            return true;
        default:
            return false;
    }
}

MethodQueue recommend(const DatasetProfile& profile,
                      const SelectorThresholds& thresholds) {
    thresholds.check();
    MethodQueue queue;
    std::vector<std::string> path;  // threshold comparisons taken so far

    auto note = [&](const std::string& step) { path.push_back(step); };
    auto push = [&](AlgorithmKind kind) {
        std::ostringstream trace;
        for (size_t i = 0; i < path.size(); ++i)
            trace << (i ? "; " : "") << path[i];
        trace << " -> " << to_string(kind);
        queue.items.push_back(kind);
        queue.rationale.push_back(trace.str());
    };

    const long n = static_cast<long>(profile.sample_size);

    if (n < thresholds.min_samples) {
        note("sample_size " + std::to_string(n) + " < min_samples " +
             std::to_string(thresholds.min_samples));
        push(AlgorithmKind::GetMoreData);
        return queue;
    }
    note("sample_size " + std::to_string(n) + " >= min_samples " +
         std::to_string(thresholds.min_samples));
    note("prediction=" + kind_name(profile.prediction_kind));

    switch (profile.prediction_kind) {
        case PredictionKind::Category: {
            if (profile.labeled) {
                note("labeled");
                if (n < thresholds.large_dataset) {
                    note("sample_size " + std::to_string(n) + " < " +
                         std::to_string(thresholds.large_dataset));
                    push(AlgorithmKind::LinearSvc);
                    if (profile.text_data) {
                        note("text data");
                        push(AlgorithmKind::NaiveBayes);
                    } else {
                        note("not text data");
                        push(AlgorithmKind::Knn);
                        push(AlgorithmKind::RbfSvc);
                        push(AlgorithmKind::Ensemble);
                    }
                } else {
                    note("sample_size " + std::to_string(n) + " >= " +
                         std::to_string(thresholds.large_dataset));
                    push(AlgorithmKind::SgdClassifier);
                    push(AlgorithmKind::KernelApproximation);
                }
            } else {
                note("unlabeled (clustering)");
                if (profile.known_category_count) {
                    note("category count known (" +
                         std::to_string(*profile.known_category_count) + ")");
                    if (n < thresholds.clustering_large) {
                        note("sample_size " + std::to_string(n) + " < " +
                             std::to_string(thresholds.clustering_large));
                        push(AlgorithmKind::KMeans);
                    } else {
                        note("sample_size " + std::to_string(n) + " >= " +
                             std::to_string(thresholds.clustering_large));
                        push(AlgorithmKind::MiniBatchKMeans);
                    }
                    push(AlgorithmKind::SpectralEmbedding);
                } else {
                    note("category count unknown");
                    if (n < thresholds.clustering_large) {
                        note("sample_size " + std::to_string(n) + " < " +
                             std::to_string(thresholds.clustering_large));
                        push(AlgorithmKind::MeanShift);
                        push(AlgorithmKind::Vbgmm);
                    } else {
                        note("sample_size " + std::to_string(n) + " >= " +
                             std::to_string(thresholds.clustering_large));
                    }
                }
            }
            break;
        }
        case PredictionKind::Quantity: {
            if (n < thresholds.large_dataset) {
                note("sample_size " + std::to_string(n) + " < " +
                     std::to_string(thresholds.large_dataset));
                if (profile.few_features) {
                    note("few features");
                    push(AlgorithmKind::Lasso);
                    push(AlgorithmKind::ElasticNet);
                } else {
                    note("many features");
                    push(AlgorithmKind::Ridge);
                    push(AlgorithmKind::SvrLinear);
                }
                push(AlgorithmKind::SvrRbf);
                push(AlgorithmKind::EnsembleRegressor);
            } else {
                note("sample_size " + std::to_string(n) + " >= " +
                     std::to_string(thresholds.large_dataset));
                push(AlgorithmKind::SgdRegressor);
            }
            break;
        }
        case PredictionKind::JustLooking: {
            push(AlgorithmKind::RandomizedPca);
            if (n < thresholds.clustering_large) {
                note("sample_size " + std::to_string(n) + " < " +
                     std::to_string(thresholds.clustering_large));
                push(AlgorithmKind::Isomap);
                push(AlgorithmKind::SpectralEmbedding);
                push(AlgorithmKind::Lle);
            } else {
                note("sample_size " + std::to_string(n) + " >= " +
                     std::to_string(thresholds.clustering_large));
                push(AlgorithmKind::KernelApproximation);
            }
            break;
        }
        case PredictionKind::None:
            note("no prediction requested");
            break;
    }

    note("no further recommendation");
    push(AlgorithmKind::ToughLuck);
    return queue;
}

std::vector<std::string> explain(const MethodQueue& queue) {
    return queue.rationale;
}

BundledModels BundledModels::from_models(fm::FeatureModel techniques,
                                         fm::FeatureModel assumptions) {
    BundledModels m;
    m.techniques = std::move(techniques);
    m.assumptions = std::move(assumptions);

    fm::FeatureModel combined;
    fm::Feature root;
    root.id = "MLProject";
    root.display_name = "MLProject";
    root.variability = fm::Variability::Mandatory;
    combined.features.push_back(root);
    for (const fm::FeatureModel* part : {&m.techniques, &m.assumptions}) {
        std::string part_root = part->root_id();
        for (fm::Feature f : part->features) {
            if (!f.parent) {
                f.parent = "MLProject";
                f.variability = fm::Variability::Mandatory;
            }
            combined.features.push_back(std::move(f));
        }
        combined.groups.insert(combined.groups.end(), part->groups.begin(),
                               part->groups.end());
        combined.constraints.insert(combined.constraints.end(),
                                    part->constraints.begin(),
                                    part->constraints.end());
        (void)part_root;
    }
    auto valid = fm::validate_model(combined);
    if (!valid.ok())
        throw Error("INVALID_MODEL",
                    "combined bundled model fails validation: " +
                        valid.violations.front().code);
    m.combined = std::move(combined);
    return m;
}

BundledModels BundledModels::load(const std::string& models_dir) {
    return from_models(fm_dsl::parse_file(models_dir + "/ml_techniques.fm"),
                       fm_dsl::parse_file(models_dir + "/modeling_assumptions.fm"));
}

namespace {

struct LeafMapping {
    const char* technique;
    const char* leaf;
};

LeafMapping leaf_for(AlgorithmKind item, PredictionKind prediction) {
    switch (item) {
        case AlgorithmKind::LinearSvc: return {"Classification", "LinearSVC"};
        case AlgorithmKind::NaiveBayes: return {"Classification", "NaiveBayes"};
        case AlgorithmKind::Knn: return {"Classification", "KNeighborsClassifier"};
        case AlgorithmKind::RbfSvc: return {"Classification", "SVC"};
        case AlgorithmKind::Ensemble:
            return {"Classification", "EnsembleClassifiers"};
        case AlgorithmKind::SgdClassifier:
            return {"Classification", "SGDClassifier"};
        case AlgorithmKind::KernelApproximation:
            if (prediction == PredictionKind::JustLooking)
                return {"DimensionalityReduction", "KernelApproximationEmbedding"};
            return {"Classification", "KernelApproximation"};
        case AlgorithmKind::KMeans: return {"Clustering", "KMeans"};
        case AlgorithmKind::MiniBatchKMeans:
            return {"Clustering", "MiniBatchKMeans"};
        case AlgorithmKind::MeanShift: return {"Clustering", "MeanShift"};
        case AlgorithmKind::Vbgmm: return {"Clustering", "VBGMM"};
        case AlgorithmKind::Lasso: return {"Regression", "Lasso"};
        case AlgorithmKind::ElasticNet: return {"Regression", "ElasticNet"};
        case AlgorithmKind::Ridge: return {"Regression", "Ridge"};
        case AlgorithmKind::SvrLinear: return {"Regression", "SVRLinear"};
        case AlgorithmKind::SvrRbf: return {"Regression", "SVRRbf"};
        case AlgorithmKind::SgdRegressor: return {"Regression", "SGDRegressor"};
        case AlgorithmKind::EnsembleRegressor:
            return {"Regression", "EnsembleRegressors"};
        case AlgorithmKind::RandomizedPca:
            return {"DimensionalityReduction", "RandomizedPCA"};
        case AlgorithmKind::Isomap: return {"DimensionalityReduction", "Isomap"};
        case AlgorithmKind::SpectralEmbedding:
            return {"DimensionalityReduction", "SpectralEmbedding"};
        case AlgorithmKind::Lle: return {"DimensionalityReduction", "LLE"};
        default:
            throw Error("UNMAPPED_ALGORITHM",
                        to_string(item) + " has no feature-model leaf");
    }
}

// Metric id -> (parent chain selector) for the assumptions model.
const std::map<std::string, std::string> kPerformanceLeaves = {
    {"accuracy", "Accuracy"},       {"f1", "F1"},
    {"bacc", "BACC"},               {"balanced_accuracy", "BACC"},
    {"mcc", "MCC"},                 {"sensitivity", "Sensitivity"},
    {"specificity", "Specificity"},
};

const std::map<std::string, std::string> kBiasLeaves = {
    {"eo", "EO"},     {"eoo", "EOO"},   {"di", "DI"},
    {"knnc", "KNNC"}, {"abad", "ABAD"}, {"aaod", "AAOD"},
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

fm::Configuration to_configuration(AlgorithmKind item,
                                   const DatasetProfile& profile,
                                   const std::vector<std::string>& metric_ids,
                                   const BundledModels& models,
                                   const SelectorThresholds& thresholds) {
    if (is_terminal(item))
        throw Error("UNMAPPED_ALGORITHM",
                    to_string(item) + " is a placeholder, not an algorithm");
    thresholds.check();

    fm::Configuration config;
    auto select = [&](const std::string& id) {
        if (!models.combined.find(id))
            throw Error("UNMAPPED_ALGORITHM",
                        "bundled models lack feature '" + id + "'");
        config.selected.insert(id);
    };

    select("MLProject");
    select("ModelingTechnique");
    LeafMapping leaf = leaf_for(item, profile.prediction_kind);
    select(leaf.technique);
    select(leaf.leaf);

    select("ModelingAssumptions");
    select("DatasetRequirements");
    select("SampleSize");
    const long n = static_cast<long>(profile.sample_size);
    if (n < thresholds.min_samples)
        select("SampleTiny");
    else if (n < thresholds.large_dataset)
        select("SampleMedium");
    else
        select("SampleLarge");
    select("Labeling");
    select(profile.labeled ? "LabeledData" : "UnlabeledData");
    if (profile.few_features) select("FewFeatures");
    select("ModelDataType");
    select("NumericData");
    if (profile.text_data) select("TextData");

    select("FunctionalRequirements");
    select("PredictionType");
    switch (profile.prediction_kind) {
        case PredictionKind::Category: select("PredictCategory"); break;
        case PredictionKind::Quantity: select("PredictQuantity"); break;
        case PredictionKind::JustLooking: select("JustLooking"); break;
        case PredictionKind::None: select("NoPrediction"); break;
    }

    for (const auto& raw : metric_ids) {
        std::string id = lower(raw);
        if (auto it = kPerformanceLeaves.find(id); it != kPerformanceLeaves.end()) {
            select("NonFunctionalRequirements");
            select("Performance");
            select(it->second);
        } else if (auto bt = kBiasLeaves.find(id); bt != kBiasLeaves.end()) {
            select("NonFunctionalRequirements");
            select("Ethical");
            select("Bias");
            select(bt->second);
        } else {
            throw Error("UNKNOWN_METRIC", "no metric named '" + raw + "'");
        }
    }

    auto validity = fm::validate_configuration(models.combined, config);
    if (!validity.ok())
        throw Error("INVALID_CONFIGURATION",
                    "derived configuration fails validation: " +
                        validity.violations.front().code + " (" +
                        validity.violations.front().subject + ")");
    return config;
}

}  // namespace varsel::selector
