#pragma once

#include "varsel/error.hpp"

namespace varsel {

// Cut points of the selection flowchart. Configurable because the feature
// cut is an empirical choice, not a law.
struct SelectorThresholds {
    int min_samples = 50;
    long large_dataset = 100000;
    long clustering_large = 10000;
    int few_features = 30;

    void check() const {
        if (min_samples <= 0 || large_dataset <= 0 || clustering_large <= 0 ||
            few_features <= 0)
            throw Error("BAD_THRESHOLDS", "thresholds must be positive");
        if (!(min_samples < clustering_large && clustering_large < large_dataset))
            throw Error("BAD_THRESHOLDS",
                        "expected min_samples < clustering_large < large_dataset");
    }
};

}  // namespace varsel
