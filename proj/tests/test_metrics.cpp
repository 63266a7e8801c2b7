#include <doctest.h>

#include <cmath>
#include <optional>

#include "varsel/metrics.hpp"
#include "varsel/rng.hpp"

using namespace varsel;
using metrics::ConfusionMatrix;
using metrics::GroupedConfusion;
using metrics::PredictionSet;

namespace {

// Appends `count` entries with the given truth/prediction/group.
void fill(PredictionSet& set, int count, const std::string& y_true,
          const std::string& y_pred, const std::string& group) {
    for (int i = 0; i < count; ++i) {
        int64_t id = static_cast<int64_t>(set.entries.size());
        set.entries.push_back({id, y_true, y_pred, group});
    }
}

PredictionSet from_counts(const GroupedConfusion& gc) {
    PredictionSet set;
    set.labels = {"neg", "pos"};
    auto group = [&](const ConfusionMatrix& cm, const std::string& g) {
        fill(set, int(cm.tp), "pos", "pos", g);
        fill(set, int(cm.fp), "neg", "pos", g);
        fill(set, int(cm.fn), "pos", "neg", g);
        fill(set, int(cm.tn), "neg", "neg", g);
    };
    group(gc.protected_group, "P");
    group(gc.unprotected_group, "U");
    return set;
}

// The audit fixture: EOO 0.375, DI 15/14, ABAD 3.
GroupedConfusion audit_fixture() { return {{6, 8, 2, 12}, {3, 4, 5, 3}}; }

}  // namespace

TEST_CASE("confusion counts a hand-checked prediction set") {
    PredictionSet set;
    set.labels = {"neg", "pos"};
    fill(set, 1, "pos", "pos", "P");
    fill(set, 1, "neg", "pos", "P");
    fill(set, 1, "pos", "neg", "U");
    fill(set, 1, "neg", "neg", "U");
    auto cm = metrics::confusion(set, "pos");
    CHECK(cm.tp == 1);
    CHECK(cm.fp == 1);
    CHECK(cm.fn == 1);
    CHECK(cm.tn == 1);

    CHECK_THROWS_WITH_AS(metrics::confusion(set, "maybe"),
                         doctest::Contains("UNKNOWN_POSITIVE_LABEL"), Error);
    CHECK_THROWS_WITH_AS(metrics::confusion({{}, {"neg", "pos"}}, "pos"),
                         doctest::Contains("EMPTY_PREDICTIONS"), Error);
}

TEST_CASE("group_confusion splits by the protected value") {
    auto set = from_counts(audit_fixture());
    auto gc = metrics::group_confusion(set, "P", "pos");
    CHECK(gc.protected_group.tp == 6);
    CHECK(gc.protected_group.fp == 8);
    CHECK(gc.protected_group.fn == 2);
    CHECK(gc.protected_group.tn == 12);
    CHECK(gc.unprotected_group.tp == 3);
    CHECK(gc.n_protected() == 28);
    CHECK(gc.n_unprotected() == 15);

    CHECK_THROWS_WITH_AS(metrics::group_confusion(set, "X", "pos"),
                         doctest::Contains("EMPTY_GROUP"), Error);
}

TEST_CASE("group confusion matrices sum to the overall matrix") {
    auto set = from_counts(audit_fixture());
    auto cm = metrics::confusion(set, "pos");
    auto gc = metrics::group_confusion(set, "P", "pos");
    CHECK(cm.tp == gc.protected_group.tp + gc.unprotected_group.tp);
    CHECK(cm.fp == gc.protected_group.fp + gc.unprotected_group.fp);
    CHECK(cm.fn == gc.protected_group.fn + gc.unprotected_group.fn);
    CHECK(cm.tn == gc.protected_group.tn + gc.unprotected_group.tn);
}

TEST_CASE("performance on the all-ones matrix") {
    auto r = metrics::performance({1, 1, 1, 1});
    CHECK(*r.accuracy == doctest::Approx(0.5));
    CHECK(*r.sensitivity == doctest::Approx(0.5));
    CHECK(*r.specificity == doctest::Approx(0.5));
    CHECK(*r.balanced_accuracy == doctest::Approx(0.5));
    CHECK(*r.f1 == doctest::Approx(0.5));
    CHECK(*r.mcc == doctest::Approx(0.0));
}

TEST_CASE("performance marks zero-denominator metrics absent") {
    auto r = metrics::performance({5, 0, 0, 0});
    CHECK(*r.accuracy == doctest::Approx(1.0));
    CHECK(*r.sensitivity == doctest::Approx(1.0));
    CHECK(*r.f1 == doctest::Approx(1.0));
    CHECK_FALSE(r.specificity.has_value());
    CHECK_FALSE(r.balanced_accuracy.has_value());
    CHECK_FALSE(r.mcc.has_value());

    CHECK_THROWS_WITH_AS(metrics::performance({0, 0, 0, 0}),
                         doctest::Contains("EMPTY_MATRIX"), Error);
}

TEST_CASE("by_name exposes exactly the known metric ids") {
    auto r = metrics::performance({1, 1, 1, 1});
    CHECK(r.by_name("f1") == r.f1);
    CHECK(r.by_name("balanced_accuracy") == r.balanced_accuracy);
    CHECK(metrics::PerformanceReport::known_metric("mcc"));
    CHECK_FALSE(metrics::PerformanceReport::known_metric("zzz"));
    CHECK_THROWS_WITH_AS(r.by_name("zzz"), doctest::Contains("UNKNOWN_METRIC"),
                         Error);
}

TEST_CASE("fairness fixtures reproduce the documented magnitudes") {
    auto gc = audit_fixture();
    CHECK(metrics::eoo(gc) == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(metrics::di(gc) == doctest::Approx(15.0 / 14.0).epsilon(1e-12));
    CHECK(metrics::abad(gc) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("fairness extremes and degenerate denominators") {
    // Protected TPR 1, unprotected TPR 0.
    GroupedConfusion extreme{{5, 0, 0, 5}, {0, 0, 5, 5}};
    CHECK(metrics::eoo(extreme) == doctest::Approx(1.0));

    // Symmetric groups: perfectly fair.
    GroupedConfusion fair{{2, 1, 3, 4}, {2, 1, 3, 4}};
    CHECK(metrics::eoo(fair) == doctest::Approx(0.0));
    CHECK(metrics::di(fair) == doctest::Approx(1.0));
    // ABAD is count-based, so equal groups give (tp+tn)/2 - (tp+tn).
    CHECK(metrics::abad(fair) == doctest::Approx(-3.0));

    // No positives in the protected group: TPR undefined.
    GroupedConfusion no_pos{{0, 2, 0, 2}, {1, 1, 1, 1}};
    CHECK_THROWS_WITH_AS(metrics::eoo(no_pos),
                         doctest::Contains("UNDEFINED_METRIC"), Error);

    // Unprotected group never predicted positive: DI denominator is zero.
    GroupedConfusion no_fav{{1, 1, 1, 1}, {0, 0, 2, 2}};
    CHECK_THROWS_WITH_AS(metrics::di(no_fav),
                         doctest::Contains("UNDEFINED_METRIC"), Error);
}

TEST_CASE("swapping the groups negates eoo and inverts di") {
    auto gc = audit_fixture();
    GroupedConfusion swapped{gc.unprotected_group, gc.protected_group};
    CHECK(metrics::eoo(swapped) == doctest::Approx(-metrics::eoo(gc)));
    CHECK(metrics::di(swapped) == doctest::Approx(1.0 / metrics::di(gc)));
}

TEST_CASE("performance agrees with an independent oracle on random matrices") {
    SplitMix64 rng(20240711);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        ConfusionMatrix cm{int64_t(rng.bounded(51)), int64_t(rng.bounded(51)),
                           int64_t(rng.bounded(51)), int64_t(rng.bounded(51))};
        if (cm.total() == 0) continue;
        ++checked;
        auto r = metrics::performance(cm);

        double tp = double(cm.tp), fp = double(cm.fp), fn = double(cm.fn),
               tn = double(cm.tn);
        CHECK(*r.accuracy == doctest::Approx((tp + tn) / (tp + fp + fn + tn))
                                 .epsilon(1e-12));
        if (tp + fn > 0)
            CHECK(*r.sensitivity == doctest::Approx(tp / (tp + fn)).epsilon(1e-12));
        else
            CHECK_FALSE(r.sensitivity.has_value());
        if (tn + fp > 0)
            CHECK(*r.specificity == doctest::Approx(tn / (tn + fp)).epsilon(1e-12));
        else
            CHECK_FALSE(r.specificity.has_value());
        if (tp + fn > 0 && tn + fp > 0)
            CHECK(*r.balanced_accuracy ==
                  doctest::Approx((tp / (tp + fn) + tn / (tn + fp)) / 2.0)
                      .epsilon(1e-12));
        else
            CHECK_FALSE(r.balanced_accuracy.has_value());
        if (2 * tp + fp + fn > 0)
            CHECK(*r.f1 ==
                  doctest::Approx(2 * tp / (2 * tp + fp + fn)).epsilon(1e-12));
        else
            CHECK_FALSE(r.f1.has_value());
        double denom =
            std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
        if (denom > 0)
            CHECK(*r.mcc ==
                  doctest::Approx((tp * tn - fp * fn) / denom).epsilon(1e-12));
        else
            CHECK_FALSE(r.mcc.has_value());

        // F1 is the harmonic mean of precision and recall when both exist.
        if (tp > 0) {
            double precision = tp / (tp + fp);
            double recall = tp / (tp + fn);
            CHECK(*r.f1 == doctest::Approx(2 * precision * recall /
                                           (precision + recall))
                               .epsilon(1e-12));
        }
    }
    CHECK(checked > 900);
}

TEST_CASE("fairness agrees with an independent oracle on random groups") {
    SplitMix64 rng(77001);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        GroupedConfusion gc{{int64_t(rng.bounded(51)), int64_t(rng.bounded(51)),
                             int64_t(rng.bounded(51)), int64_t(rng.bounded(51))},
                            {int64_t(rng.bounded(51)), int64_t(rng.bounded(51)),
                             int64_t(rng.bounded(51)), int64_t(rng.bounded(51))}};
        const auto& p = gc.protected_group;
        const auto& u = gc.unprotected_group;
        if (p.tp + p.fn == 0 || u.tp + u.fn == 0) continue;
        if (p.total() == 0 || u.total() == 0) continue;
        if ((u.tp + u.fp) == 0) continue;
        ++checked;

        double expected_eoo = double(p.tp) / double(p.tp + p.fn) -
                              double(u.tp) / double(u.tp + u.fn);
        double expected_di = (double(p.tp + p.fp) / double(p.total())) /
                             (double(u.tp + u.fp) / double(u.total()));
        double expected_abad =
            0.5 * double(p.tp + p.tn) - double(u.tp + u.tn);
        CHECK(metrics::eoo(gc) == doctest::Approx(expected_eoo).epsilon(1e-12));
        CHECK(metrics::di(gc) == doctest::Approx(expected_di).epsilon(1e-12));
        CHECK(metrics::abad(gc) == doctest::Approx(expected_abad).epsilon(1e-12));
    }
    CHECK(checked > 800);
}
