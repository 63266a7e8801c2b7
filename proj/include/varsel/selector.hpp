#pragma once

#include <string>
#include <vector>

#include "varsel/data.hpp"
#include "varsel/fm.hpp"
#include "varsel/thresholds.hpp"

namespace varsel::selector {

enum class AlgorithmKind {
    LinearSvc,
    NaiveBayes,
    Knn,
    RbfSvc,
    Ensemble,
    SgdClassifier,
    KernelApproximation,
    KMeans,
    MiniBatchKMeans,
    MeanShift,
    Vbgmm,
    Lasso,
    ElasticNet,
    Ridge,
    SvrLinear,
    SvrRbf,
    SgdRegressor,
    EnsembleRegressor,
    RandomizedPca,
    Isomap,
    SpectralEmbedding,
    Lle,
    GetMoreData,  // terminal placeholder
    ToughLuck,    // terminal placeholder
};

// Canonical spelling used in reports and the CLI (LINEAR_SVC, KNN, ...).
std::string to_string(AlgorithmKind kind);
AlgorithmKind algorithm_from_string(const std::string& name);

bool is_terminal(AlgorithmKind kind);
bool is_trainable_classifier(AlgorithmKind kind);

struct MethodQueue {
    std::vector<AlgorithmKind> items;     // FIFO, ends in a terminal placeholder
    std::vector<std::string> rationale;   // one trace line per item
};

// The flowchart as an ordered rule system; total over every profile.
MethodQueue recommend(const data::DatasetProfile& profile,
                      const SelectorThresholds& thresholds = {});

// One human-readable trace line per queue item.
std::vector<std::string> explain(const MethodQueue& queue);

// The bundled technique/assumption models plus their union grafted under a
// synthetic root, which configurations are validated against.
struct BundledModels {
    fm::FeatureModel techniques;
    fm::FeatureModel assumptions;
    fm::FeatureModel combined;

    static BundledModels load(const std::string& models_dir);
    static BundledModels from_models(fm::FeatureModel techniques,
                                     fm::FeatureModel assumptions);
};

// Maps a queue item to a configuration of the combined model: algorithm
// leaf, sample-size band, labeledness, data type, prediction type, and one
// feature per requested metric id (f1, accuracy, ..., EOO, DI, ABAD, ...).
// Throws UNMAPPED_ALGORITHM for placeholders and unmapped kinds,
// UNKNOWN_METRIC for unrecognized metric ids.
fm::Configuration to_configuration(AlgorithmKind item,
                                   const data::DatasetProfile& profile,
                                   const std::vector<std::string>& metric_ids,
                                   const BundledModels& models,
                                   const SelectorThresholds& thresholds = {});

}  // namespace varsel::selector
