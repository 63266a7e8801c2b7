#include <doctest.h>

#include <algorithm>

#include "test_util.hpp"
#include "varsel/fm.hpp"

using namespace varsel;
using fm::Configuration;
using fm::FeatureModel;
using fm::Variability;

namespace {

FeatureModel minimal_model() {
    FeatureModel m;
    m.features.push_back({"R", "R", Variability::Mandatory, std::nullopt});
    return m;
}

bool has_violation(const fm::ValidationResult& r, const std::string& code) {
    return std::any_of(r.violations.begin(), r.violations.end(),
                       [&](const fm::Violation& v) { return v.code == code; });
}

}  // namespace

TEST_CASE("validate_model accepts a minimal single-root model") {
    CHECK(fm::validate_model(minimal_model()).ok());
}

TEST_CASE("validate_model flags a group with one child") {
    auto m = minimal_model();
    m.features.push_back({"A", "A", Variability::Grouped, "R"});
    m.groups.push_back({"R", fm::GroupKind::Or, {"A"}});
    CHECK(has_violation(fm::validate_model(m), "GROUP_TOO_SMALL"));
}

TEST_CASE("validate_model flags a self-parented feature as a cycle") {
    auto m = minimal_model();
    m.features.push_back({"A", "A", Variability::Optional, "A"});
    CHECK(has_violation(fm::validate_model(m), "CYCLE"));
}

TEST_CASE("validate_model flags duplicate ids and missing parents") {
    auto m = minimal_model();
    m.features.push_back({"A", "A", Variability::Optional, "R"});
    m.features.push_back({"A", "A", Variability::Optional, "R"});
    m.features.push_back({"B", "B", Variability::Optional, "Zzz"});
    auto r = fm::validate_model(m);
    CHECK(has_violation(r, "DUPLICATE_ID"));
    CHECK(has_violation(r, "BAD_PARENT"));
}

TEST_CASE("validate_configuration enforces mandatory children") {
    auto m = minimal_model();
    m.features.push_back({"M", "M", Variability::Mandatory, "R"});
    auto r = fm::validate_configuration(m, {{"R"}});
    CHECK(has_violation(r, "MISSING_MANDATORY"));
    CHECK(fm::validate_configuration(m, {{"R", "M"}}).ok());
}

TEST_CASE("validate_configuration enforces alternative exclusivity") {
    auto m = minimal_model();
    m.features.push_back({"B", "B", Variability::Grouped, "R"});
    m.features.push_back({"C", "C", Variability::Grouped, "R"});
    m.groups.push_back({"R", fm::GroupKind::Alternative, {"B", "C"}});
    CHECK(has_violation(fm::validate_configuration(m, {{"R", "B", "C"}}),
                        "ALTERNATIVE_VIOLATION"));
    CHECK(has_violation(fm::validate_configuration(m, {{"R"}}),
                        "ALTERNATIVE_VIOLATION"));
    CHECK(fm::validate_configuration(m, {{"R", "B"}}).ok());
}

TEST_CASE("tautological constraint keeps a configuration valid") {
    auto m = minimal_model();
    m.features.push_back({"A", "A", Variability::Optional, "R"});
    m.constraints.push_back(
        {fm::Expr::implication(fm::Expr::variable("A"), fm::Expr::variable("R"))});
    CHECK(fm::validate_configuration(m, {{"R", "A"}}).ok());
}

TEST_CASE("validate_configuration rejects unknown features") {
    CHECK_THROWS_WITH_AS(fm::validate_configuration(minimal_model(), {{"R", "X"}}),
                         doctest::Contains("UNKNOWN_FEATURE"), Error);
}

TEST_CASE("enumerate_configurations on the documented small models") {
    SUBCASE("root only") {
        auto configs = fm::enumerate_configurations(minimal_model());
        REQUIRE(configs.size() == 1);
        CHECK(configs[0].selected == std::set<std::string>{"R"});
    }

    auto m = minimal_model();
    m.features.push_back({"A", "A", Variability::Optional, "R"});
    m.features.push_back({"B", "B", Variability::Grouped, "R"});
    m.features.push_back({"C", "C", Variability::Grouped, "R"});
    m.groups.push_back({"R", fm::GroupKind::Alternative, {"B", "C"}});

    SUBCASE("optional + alternative group gives 4 configurations") {
        auto configs = fm::enumerate_configurations(m);
        REQUIRE(configs.size() == 4);
        CHECK(configs[0].selected == std::set<std::string>{"A", "B", "R"});
        CHECK(configs[1].selected == std::set<std::string>{"A", "C", "R"});
        CHECK(configs[2].selected == std::set<std::string>{"B", "R"});
        CHECK(configs[3].selected == std::set<std::string>{"C", "R"});
    }

    SUBCASE("constraint A => B removes one configuration") {
        m.constraints.push_back({fm::Expr::implication(fm::Expr::variable("A"),
                                                       fm::Expr::variable("B"))});
        auto configs = fm::enumerate_configurations(m);
        REQUIRE(configs.size() == 3);
        for (const auto& c : configs)
            CHECK_FALSE((c.selected.count("A") && c.selected.count("C")));
    }
}

TEST_CASE("enumerate_configurations rejects oversized models") {
    auto m = minimal_model();
    for (int i = 0; i < 25; ++i)
        m.features.push_back({"F" + std::to_string(i), "F", Variability::Optional,
                              "R"});
    CHECK_THROWS_WITH_AS(fm::enumerate_configurations(m, 24),
                         doctest::Contains("MODEL_TOO_LARGE"), Error);
}

TEST_CASE("enumeration equals an independent subset filter on random models") {
    SplitMix64 rng(7001);
    for (int trial = 0; trial < 25; ++trial) {
        auto m = testutil::random_model(rng, 8);
        REQUIRE(fm::validate_model(m).ok());

        std::vector<std::set<std::string>> expected;
        size_t n = m.features.size();
        for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
            Configuration c;
            for (size_t i = 0; i < n; ++i)
                if (mask & (uint64_t{1} << i)) c.selected.insert(m.features[i].id);
            if (fm::validate_configuration(m, c).ok())
                expected.push_back(c.selected);
        }
        std::sort(expected.begin(), expected.end());

        auto got = fm::enumerate_configurations(m, 24);
        REQUIRE(got.size() == expected.size());
        for (size_t i = 0; i < got.size(); ++i)
            CHECK(got[i].selected == expected[i]);
    }
}

TEST_CASE("to_dot renders nodes, edges and highlights deterministically") {
    auto m = minimal_model();

    SUBCASE("root-only model has exactly one node declaration") {
        auto dot = fm::to_dot(m);
        size_t count = 0, pos = 0;
        while ((pos = dot.find("\"R\" [label=", pos)) != std::string::npos) {
            ++count;
            ++pos;
        }
        CHECK(count == 1);
    }

    m.features.push_back({"A", "A", Variability::Optional, "R"});

    SUBCASE("highlighted features carry the fill attribute") {
        Configuration highlight{{"R", "A"}};
        auto dot = fm::to_dot(m, &highlight);
        CHECK(dot.find("style=filled") != std::string::npos);
        auto plain = fm::to_dot(m);
        CHECK(plain.find("style=filled") == std::string::npos);
    }

    SUBCASE("identical inputs produce identical bytes") {
        CHECK(fm::to_dot(m) == fm::to_dot(m));
        Configuration highlight{{"R"}};
        CHECK(fm::to_dot(m, &highlight) == fm::to_dot(m, &highlight));
    }

    SUBCASE("invalid highlight is rejected") {
        Configuration bad{{"A"}};  // root missing
        CHECK_THROWS_WITH_AS(fm::to_dot(m, &bad),
                             doctest::Contains("INVALID_HIGHLIGHT"), Error);
    }
}
