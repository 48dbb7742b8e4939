"""Registry plumbing and determinism of the randomized check suite."""

import json

import pytest

from weiljet.harness import (
    BATTERY,
    CHECK_NAMES,
    MUTATION_TARGETS,
    MUTATIONS,
    CheckReport,
    battery_algebra,
    default_specs,
    run_suite,
)


def test_battery_shape():
    keys = [spec.key for spec in BATTERY]
    assert keys == ["dual", "t3", "t4", "m2", "m3"]
    assert battery_algebra("dual").dim == 2
    assert battery_algebra("m3").dim == 6
    with pytest.raises(ValueError):
        battery_algebra("unknown")


def test_check_names_are_sorted_and_complete():
    assert list(CHECK_NAMES) == sorted(CHECK_NAMES)
    assert len(CHECK_NAMES) == 21
    assert "prop6_interior_prolongation" in CHECK_NAMES


def test_mutation_registry_targets_known_checks():
    assert set(MUTATIONS) == set(MUTATION_TARGETS)
    for names in MUTATION_TARGETS.values():
        for name in names:
            assert name in CHECK_NAMES


def test_default_specs_filters():
    subset = default_specs(name_filter="prop")
    assert subset and all("prop" in spec.name for spec in subset)
    named = default_specs(names=("tau_calculus",), samples=3)
    assert [spec.name for spec in named] == ["tau_calculus"]
    assert named[0].samples == 3
    dual_only = default_specs(names=("morphism_function_lift",), algebras=("dual",))
    assert dual_only[0].algebras == ("dual",)
    with pytest.raises(ValueError):
        default_specs(names=("no_such_check",))


def test_run_suite_empty_and_unknown_mutation():
    assert run_suite(()) == []
    with pytest.raises(ValueError):
        run_suite((), mutation="no_such_mutation")


def test_report_serialization():
    report = CheckReport("demo", True, 1.5e-10, {"point": [0.0]}, elapsed=0.25)
    payload = report.to_json()
    assert list(payload) == ["name", "passed", "worst_residual", "witness"]
    timed = report.to_json(include_timing=True)
    assert "elapsed" in timed
    line = report.json_line()
    assert json.loads(line)["name"] == "demo"
    assert " " not in line.split('"witness"')[0]


def test_suite_is_deterministic():
    names = ("tau_calculus", "poisson_leibniz")
    first = [r.json_line() for r in run_suite(default_specs(names=names, seed=9))]
    second = [r.json_line() for r in run_suite(default_specs(names=names, seed=9))]
    assert first == second
    shifted = [r.json_line() for r in run_suite(default_specs(names=names, seed=10))]
    assert [json.loads(line)["name"] for line in shifted] == sorted(names)


def test_reports_come_back_sorted_and_passing():
    names = ("matrix_inverse_neumann", "dual_forward_derivative")
    reports = run_suite(default_specs(names=names))
    assert [r.name for r in reports] == sorted(names)
    for report in reports:
        assert report.passed
        assert report.worst_residual >= 0.0
