from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from unimap.errors import (
    DisconnectedGraphError,
    EmptySideError,
    EnumerationCapError,
    ParameterError,
)
from unimap.expansion import (
    CutWitness,
    branch_substitution_transfer_check,
    cheeger_exact,
    count_subset_volumes,
    estimate_bad_event,
    h_value,
    is_kappa_expander,
    spectral_cheeger_bounds,
    wilson_interval,
)
from unimap.maps import Multigraph
from unimap.samplers import DegreeSequence

from .oracles import (
    brute_cheeger_in_family,
    brute_cheeger_value,
    brute_subset_volume_count,
)

C4 = Multigraph(4, ((0, 1), (1, 2), (2, 3), (0, 3)))
K4 = Multigraph(4, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)))


def random_multigraph(rng: random.Random, max_vertices: int = 10) -> Multigraph:
    n = rng.randint(2, max_vertices)
    edges = [(rng.randrange(v), v) for v in range(1, n)]  # random spanning tree
    for _ in range(rng.randint(0, n + 2)):
        u, v = rng.randrange(n), rng.randrange(n)
        edges.append((min(u, v), max(u, v)))
    return Multigraph(n, tuple(edges))


def test_h_value_hand_cases():
    assert h_value(C4, (0, 1)).h_value == Fraction(1, 2)
    assert h_value(C4, (0, 2)).h_value == Fraction(4, 4)
    assert h_value(K4, (0,)).h_value == Fraction(3, 3)
    with pytest.raises(EmptySideError):
        h_value(C4, ())
    with pytest.raises(EmptySideError):
        h_value(C4, (0, 1, 2, 3))
    with pytest.raises(ParameterError):
        h_value(C4, (0, 9))


def test_h_value_loop_conventions():
    # loop adds 2 to volume, never to the boundary
    g = Multigraph(2, ((0, 1), (0, 0)))
    assert h_value(g, (1,)).h_value == Fraction(1, 1)
    assert h_value(g, (0,)).h_value == Fraction(1, 1)  # complement side has volume 1


def test_cheeger_exact_known_values():
    assert cheeger_exact(C4).h_value == Fraction(1, 2)
    assert cheeger_exact(K4).h_value == Fraction(2, 3)  # two-vertex cut: 4/6
    for k in (2, 3, 4):
        cycle = Multigraph(2 * k, tuple((i, (i + 1) % (2 * k)) for i in range(2 * k)))
        assert cheeger_exact(cycle).h_value == Fraction(1, k)


def test_cheeger_exact_matches_brute_force_on_random_graphs():
    rng = random.Random(424242)
    for _ in range(60):
        g = random_multigraph(rng, max_vertices=8)
        wit = cheeger_exact(g)
        assert wit.h_value == brute_cheeger_value(g)
        h_fam, subset_fam = brute_cheeger_in_family(g)
        assert wit.h_value == h_fam
        assert wit.subset == subset_fam


def test_cheeger_witness_consistency():
    rng = random.Random(5)
    for _ in range(30):
        g = random_multigraph(rng)
        wit = cheeger_exact(g)
        assert h_value(g, wit.subset).h_value == wit.h_value
        assert wit.vol_x <= wit.vol_complement
        assert wit.vol_x + wit.vol_complement == sum(g.degrees)


def test_cheeger_exact_edge_cases():
    with pytest.raises(EmptySideError):
        cheeger_exact(Multigraph(1, ((0, 0),)))
    with pytest.raises(EnumerationCapError):
        cheeger_exact(Multigraph(30, tuple((i, i + 1) for i in range(29))))
    disconnected = Multigraph(4, ((0, 1), (2, 3)))
    assert cheeger_exact(disconnected).h_value == 0
    assert cheeger_exact(disconnected).boundary == 0


def test_is_kappa_expander():
    ok, wit = is_kappa_expander(C4, Fraction(1, 2))
    assert ok and wit is None
    ok, wit = is_kappa_expander(C4, Fraction(2, 3))
    assert not ok
    assert wit is not None and wit.h_value < Fraction(2, 3)
    ok, wit = is_kappa_expander(Multigraph(1, ((0, 0),)), Fraction(1))
    assert ok and wit is None  # no cut exists: vacuously an expander
    with pytest.raises(ParameterError):
        is_kappa_expander(C4, Fraction(-1, 2))


def test_spectral_bounds_bracket_exact_value():
    rng = random.Random(99)
    graphs = [C4, K4] + [random_multigraph(rng, 8) for _ in range(25)]
    for g in graphs:
        try:
            low, high = spectral_cheeger_bounds(g)
        except DisconnectedGraphError:
            continue
        h = float(cheeger_exact(g).h_value)
        assert low <= h + 1e-9
        assert h <= high + 1e-9


def test_spectral_bounds_errors():
    with pytest.raises(EmptySideError):
        spectral_cheeger_bounds(Multigraph(1, ()))
    with pytest.raises(DisconnectedGraphError):
        spectral_cheeger_bounds(Multigraph(4, ((0, 1), (2, 3))))


def test_count_subset_volumes_matches_brute_force():
    rng = random.Random(17)
    for _ in range(40):
        k = rng.randint(1, 9)
        degrees = tuple(rng.randint(3, 6) for _ in range(k))
        total = sum(degrees)
        v = rng.randint(1, total // 2)
        got = count_subset_volumes(degrees, v)
        assert got.count == brute_subset_volume_count(degrees, v)
        assert got.count <= got.bound or got.bound == 0 and got.count == 0


def test_count_subset_volumes_validation():
    with pytest.raises(ParameterError):
        count_subset_volumes((3, 3), 4)  # 2V > total
    with pytest.raises(ParameterError):
        count_subset_volumes((3, 3), 0)
    d = DegreeSequence((3, 3, 4, 4))
    assert count_subset_volumes(d, 6).count == 1


def test_wilson_interval_known_values():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and 0.0 < hi < 0.07
    lo, hi = wilson_interval(100, 100)
    assert hi == 1.0 and 0.93 < lo < 1.0
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert lo == pytest.approx(1 - hi, abs=1e-12)
    with pytest.raises(ParameterError):
        wilson_interval(5, 0)
    with pytest.raises(ParameterError):
        wilson_interval(7, 5)


def test_estimate_bad_event_exact_frozen():
    # degrees (3,3): 15 pairings of 6 darts; V = 3 picks one vertex
    est = estimate_bad_event((3, 3), 3, Fraction(2, 3), trials=0, rng=None)
    assert est.exact
    assert est.frequency == Fraction(9, 15)
    est = estimate_bad_event((3, 3), 3, Fraction(1, 6), trials=0, rng=None)
    assert est.frequency == 0


def test_estimate_bad_event_monte_carlo_deterministic():
    d = (3, 3, 3, 3, 3, 3)  # 18 darts: above the exact cutoff
    a = estimate_bad_event(d, 9, Fraction(1, 3), trials=4000, rng=random.Random(3))
    b = estimate_bad_event(d, 9, Fraction(1, 3), trials=4000, rng=random.Random(3))
    assert not a.exact
    assert (a.frequency, a.ci_low, a.ci_high) == (b.frequency, b.ci_low, b.ci_high)
    assert a.ci_low <= float(a.frequency) <= a.ci_high


def test_branch_substitution_transfer_on_cycles():
    rng = random.Random(8)
    for _ in range(40):
        assert branch_substitution_transfer_check(C4, 3, rng)
    with pytest.raises(DisconnectedGraphError):
        branch_substitution_transfer_check(Multigraph(4, ((0, 1), (2, 3))), 2, rng)
    with pytest.raises(ParameterError):
        branch_substitution_transfer_check(C4, 0, rng)


def test_cut_witness_validation():
    with pytest.raises(ParameterError):
        CutWitness((0, 1), 3, 4, 4, Fraction(1, 2))  # 3/4 != 1/2


@settings(max_examples=50, deadline=None)
@given(st.randoms(use_true_random=False))
def test_cheeger_symmetry_property(rng):
    g = random_multigraph(rng, max_vertices=7)
    wit = cheeger_exact(g)
    comp = tuple(v for v in range(g.n_vertices) if v not in set(wit.subset))
    if comp:
        assert h_value(g, comp).h_value == wit.h_value  # h(X) == h(complement)
