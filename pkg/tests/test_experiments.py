from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import pytest

from unimap.errors import EnumerationCapError, ParameterError
from unimap.experiments import (
    ExperimentConfig,
    ExperimentReport,
    min_degree3_census,
    persist_report,
    profile_census,
    run_core_expander_experiment,
    sweep_rate_function,
    verify_branch_profile_law,
    verify_cm_unicellular,
    verify_decomposition_identity,
    verify_one_vertex_law,
    verify_substitution_transfer,
)
from unimap.samplers import double_factorial_odd

from .oracles import harer_zagier_table


def test_config_validation_and_digest():
    cfg = ExperimentConfig("demo", {"n": 4}, mode="exact")
    assert cfg.digest() == ExperimentConfig("demo", {"n": 4}, mode="exact").digest()
    other = ExperimentConfig("demo", {"n": 5}, mode="exact")
    assert cfg.digest() != other.digest()
    # out_dir does not change identity
    moved = ExperimentConfig("demo", {"n": 4}, mode="exact", out_dir="/tmp/x")
    assert moved.digest() == cfg.digest()
    with pytest.raises(ParameterError):
        ExperimentConfig("demo", {}, mode="bogus")
    with pytest.raises(ParameterError):
        ExperimentConfig("demo", {}, mode="monte-carlo")  # seed missing


def test_report_payload_excludes_runtime():
    cfg = ExperimentConfig("demo", {"n": 4}, mode="exact")
    a = ExperimentReport(cfg, "demo", {"x": 1}, {}, "pass", runtime_s=1.0)
    b = ExperimentReport(cfg, "demo", {"x": 1}, {}, "pass", runtime_s=9.9)
    assert a.payload_json() == b.payload_json()
    assert a.to_dict()["meta"]["runtime_s"] == 1.0
    with pytest.raises(ParameterError):
        ExperimentReport(cfg, "demo", {}, {}, "maybe")


def test_report_serializes_fractions_exactly():
    cfg = ExperimentConfig("demo", {}, mode="exact")
    r = ExperimentReport(cfg, "demo", {"p": Fraction(1, 3)}, {}, "pass")
    assert '"1/3"' in r.payload_json()


@pytest.mark.parametrize("n", range(2, 7))
def test_profile_census_covers_every_pairing(n):
    census = profile_census(n)
    assert sum(census.values()) == double_factorial_odd(n)
    table = harer_zagier_table(6)
    by_genus: dict[int, int] = {}
    for (g, _e, _m, _o), cnt in census.items():
        by_genus[g] = by_genus.get(g, 0) + cnt
    for g, cnt in by_genus.items():
        assert cnt == table[(n, g)]


def test_profile_census_cap():
    with pytest.raises(EnumerationCapError):
        profile_census(9)


def test_min_degree3_census_spot_values():
    # 2 edges: only the one-vertex torus gluing has min degree 3
    assert min_degree3_census(2) == {1: 1}
    # 3 edges, genus 1, two degree-3 vertices: exactly one rooted map;
    # plus the genus-0 triple star... which has a degree-3 center but
    # leaves of degree 1, so no genus-0 entry survives
    assert min_degree3_census(3).get(1, 0) == 1
    assert 0 not in min_degree3_census(3)
    assert sum(min_degree3_census(4).values()) > 0


def test_one_vertex_law_passes():
    r = verify_one_vertex_law((2, 4))
    assert r.verdict == "pass"
    assert r.observed["p=2"]["probability"] == Fraction(1, 3)
    assert r.expected["p=2"]["probability"]["source"] == "closed-form"
    with pytest.raises(ParameterError):
        verify_one_vertex_law((3,))
    with pytest.raises(EnumerationCapError):
        verify_one_vertex_law((10,))


def test_cm_unicellular_exact_small():
    r = verify_cm_unicellular((3, 3))
    assert r.verdict == "pass"
    assert r.observed["probability"] == Fraction(1, 5)
    assert r.config.mode == "exact"


def test_cm_unicellular_parity_flag():
    r = verify_cm_unicellular((3, 3, 3, 3))
    assert r.observed["probability"] == 0
    assert "parity" in r.observed["note"]


def test_cm_unicellular_monte_carlo_requires_seed():
    with pytest.raises(ParameterError):
        verify_cm_unicellular((3, 3, 3, 3, 3, 3), trials=100)


def test_cm_unicellular_monte_carlo_deterministic():
    d = (3, 3, 3, 3, 3, 3)
    a = verify_cm_unicellular(d, trials=2000, seed=5)
    b = verify_cm_unicellular(d, trials=2000, seed=5)
    assert a.payload_json() == b.payload_json()
    assert a.config.mode == "monte-carlo"
    assert a.verdict in ("pass", "informational")


@pytest.mark.parametrize("n,g", [(3, 1), (4, 1), (4, 2), (5, 2), (6, 3)])
def test_decomposition_identity_small(n, g):
    r = verify_decomposition_identity(n, g)
    assert r.verdict == "pass"
    assert r.observed["cores_with_e_edges"] == r.expected["cores_with_e_edges"]["value"]


def test_decomposition_identity_validation():
    with pytest.raises(EnumerationCapError):
        verify_decomposition_identity(9, 1)
    with pytest.raises(ParameterError):
        verify_decomposition_identity(6, 0)


@pytest.mark.parametrize("n,g", [(4, 1), (5, 1), (6, 2)])
def test_branch_profile_law_small(n, g):
    r = verify_branch_profile_law(n, g)
    assert r.verdict == "pass"
    assert r.observed["beta_independent"] is True


def test_substitution_transfer_small_run():
    r = verify_substitution_transfer(instances=40, seed=3)
    assert r.verdict == "pass"
    assert r.observed["violations"] == 0


def test_core_expander_experiment_shape():
    r = run_core_expander_experiment(0.4, 0.1, (20,), trials=2, seed=1)
    assert r.verdict == "informational"
    obs = r.observed["n=20"]
    assert obs["g"] == 8
    assert obs["transfer_violations"] == 0
    assert Fraction(obs["min_h_core"]) > 0
    quantities = {row["quantity"] for row in r.data}
    assert "min_h_core" in quantities
    assert any(q.startswith("edge_fraction[M=") for q in quantities)


def test_core_expander_single_vertex_core_is_vacuous():
    # seed 11 at n=16 draws a map whose core is one vertex with 14 loops
    r = run_core_expander_experiment(0.4, 0.1, (16,), trials=2, seed=11)
    assert r.verdict == "informational"
    obs = r.observed["n=16"]
    assert obs["vacuous_cores"] >= 1
    assert obs["kappa_satisfied"] == obs["trials"]


def test_core_expander_reports_bit_identical():
    a = run_core_expander_experiment(0.4, 0.1, (16,), trials=2, seed=9)
    b = run_core_expander_experiment(0.4, 0.1, (16,), trials=2, seed=9)
    assert a.payload_json() == b.payload_json()
    c = run_core_expander_experiment(0.4, 0.1, (16,), trials=2, seed=10)
    assert a.payload_json() != c.payload_json()


def test_sweep_rate_function_frontier():
    r = sweep_rate_function((0.05, 0.1), (0.01, 0.05, 0.1, 0.3))
    assert r.verdict == "pass"
    frontier = r.observed["frontier"]
    assert set(frontier) == {"eta=0.05", "eta=0.1"}
    for entry in frontier.values():
        assert entry["c"] > 0
        assert entry["delta"] in (0.01, 0.05, 0.1, 0.3)
    assert r.observed["frontier_nonincreasing_in_eta"] in (True, False)
    with pytest.raises(ParameterError):
        sweep_rate_function((), (0.1,))
    with pytest.raises(ParameterError):
        sweep_rate_function((1.5,), (0.1,))


def test_exact_reports_carry_no_floats():
    def no_floats(x):
        if isinstance(x, float):
            return False
        if isinstance(x, dict):
            return all(no_floats(v) for v in x.values())
        if isinstance(x, list):
            return all(no_floats(v) for v in x)
        return True

    for report in (
        verify_one_vertex_law((2, 4)),
        verify_cm_unicellular((3, 3)),
        verify_decomposition_identity(4, 1),
        verify_branch_profile_law(4, 1),
    ):
        payload = report.payload()
        assert no_floats(payload["observed"])
        assert no_floats(payload["expected"])


def test_persist_report_writes_all_files(tmp_path):
    r = sweep_rate_function((0.05,), (0.05, 0.1))
    paths = persist_report(r, tmp_path)
    assert set(paths) == {"report", "results", "manifest", "data"}
    report = json.loads(Path(paths["report"]).read_text())
    assert report["verdict"] == "pass"
    assert "meta" in report
    manifest = json.loads(Path(paths["manifest"]).read_text())
    assert manifest["config_sha256"] == r.config.digest()
    lines = Path(paths["results"]).read_text().splitlines()
    assert len(lines) == 1 and json.loads(lines[0])["claim"] == "rate-function-sweep"
    csv_lines = Path(paths["data"]).read_text().splitlines()
    assert csv_lines[0] == "experiment,n,quantity,value"
    assert len(csv_lines) == len(r.data) + 1
    # appending is additive on rerun
    persist_report(r, tmp_path)
    assert len(Path(paths["results"]).read_text().splitlines()) == 2
