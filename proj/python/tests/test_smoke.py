"""Smoke tests for the _varsel extension module."""

import json

import pytest

import _varsel as varsel


def test_version():
    assert varsel.__version__ == "0.1.0"


def test_parse_validate_enumerate():
    model = varsel.parse_fm(
        "feature Root mandatory\n"
        "  feature A optional\n"
        "  alt {\n"
        "    feature B\n"
        "    feature C\n"
        "  }\n"
        "constraint A => B\n"
    )
    assert varsel.validate_model(model) == []
    configs = varsel.enumerate_configurations(model)
    assert {"Root", "B"} in configs
    assert all("Root" in c for c in configs)
    assert not any({"A", "C"} <= c for c in configs)

    violations = varsel.validate_configuration(model, {"Root", "B", "C"})
    assert any(code == "ALTERNATIVE_VIOLATION" for code, _, _ in violations)

    dot = varsel.to_dot(model, highlight={"Root", "B"})
    assert "digraph" in dot
    assert "style=filled" in dot


def test_parse_error_is_varsel_error():
    with pytest.raises(varsel.VarselError):
        varsel.parse_fm("feature Root mandatory\n  alt {\n    feature Only\n  }\n")


def test_bundled_models_parse():
    for path in ("models/ml_techniques.fm", "models/modeling_assumptions.fm"):
        model = varsel.parse_fm_file(path)
        assert varsel.validate_model(model) == []
        round_tripped = varsel.parse_fm(varsel.serialize_fm(model))
        assert varsel.serialize_fm(round_tripped) == varsel.serialize_fm(model)


def test_profile_and_recommend():
    ds = varsel.load_csv("data/heart_failure.csv", target="DEATH_EVENT",
                         sensitive="sex")
    assert ds.row_count == 299
    assert len(ds.column_names) == 13

    profile = varsel.profile(ds)
    assert profile.sample_size == 299
    assert profile.feature_count == 12
    assert profile.labeled
    assert profile.few_features
    assert profile.positive_fraction == pytest.approx(96 / 299)

    items, rationale = varsel.recommend(profile)
    assert items == ["LINEAR_SVC", "KNN", "RBF_SVC", "ENSEMBLE", "TOUGH_LUCK"]
    assert len(rationale) == len(items)


def test_split():
    ds = varsel.load_csv("data/heart_failure.csv", target="DEATH_EVENT")
    train, test = varsel.stratified_split(ds, 0.2, 42)
    assert train.row_count == 239
    assert test.row_count == 60


def test_metrics():
    perf = varsel.performance(1, 1, 1, 1)
    assert perf["accuracy"] == pytest.approx(0.5)
    assert perf["f1"] == pytest.approx(0.5)
    assert perf["mcc"] == pytest.approx(0.0)

    degenerate = varsel.performance(5, 0, 0, 0)
    assert degenerate["specificity"] is None

    fair = varsel.fairness(6, 8, 2, 12, 3, 4, 5, 3)
    assert fair["eoo"] == pytest.approx(0.375)
    assert fair["di"] == pytest.approx(15 / 14)
    assert fair["abad"] == pytest.approx(3.0)


def test_run_pipeline_deterministic():
    kwargs = dict(target="DEATH_EVENT", sensitive="sex", protected_value="1",
                  seed=42, models_dir="models")
    first = varsel.run_pipeline("data/heart_failure.csv", **kwargs)
    second = varsel.run_pipeline("data/heart_failure.csv", **kwargs)
    assert first == second

    report = json.loads(first)
    assert report["seed"] == 42
    assert report["profile"]["sample_size"] == 299
    assert report["queue"]["items"][0] == "LINEAR_SVC"
    assert [c["algorithm"] for c in report["candidates"]]
