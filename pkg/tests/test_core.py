from __future__ import annotations

import random
from collections import Counter
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from unimap.core import (
    BranchDecomposition,
    branch_size_profile,
    core,
    core_less_M,
    reconstruct,
)
from unimap.errors import DecompositionError, ParameterError
from unimap.maps import from_polygon_gluing, genus, vertex_degrees
from unimap.samplers import enumerate_pairings, sample_polygon_gluing
from unimap.trees import tree_edges

SQUARE = from_polygon_gluing(((0, 2), (1, 3)), 2)
# hexagon with one pendant edge folded in: genus 1, one vertex of degree 2
PENDANT = from_polygon_gluing(((0, 1), (2, 4), (3, 5)), 3)


def unicellular_maps(n: int, min_genus: int = 1):
    for pairing in enumerate_pairings(n):
        m = from_polygon_gluing(pairing, n)
        if genus(m) >= min_genus:
            yield m


def test_square_decomposes_to_itself():
    dec = core(SQUARE)
    assert dec.core == SQUARE
    assert dec.root_branch_index == 0
    assert dec.marked_edge == (0,)
    assert [tree_edges(b.tree) for b in dec.branches] == [1, 1]
    assert reconstruct(dec) == SQUARE


def test_pendant_hexagon_profile():
    dec = core(PENDANT)
    assert dec.core.n_edges == 2
    assert sorted(tree_edges(b.tree) for b in dec.branches) == [1, 2]
    assert reconstruct(dec) == PENDANT
    marked, others = branch_size_profile(PENDANT)
    assert (marked, others) in {(1, (2,)), (2, (1,))}


def test_core_rejects_genus_zero():
    tree = from_polygon_gluing(((0, 1), (2, 3)), 2)
    with pytest.raises(DecompositionError):
        core(tree)
    with pytest.raises(DecompositionError):
        branch_size_profile(tree)


@pytest.mark.parametrize("n", range(2, 6))
def test_round_trip_exact_exhaustive_small(n):
    for m in unicellular_maps(n):
        assert reconstruct(core(m)) == m


def test_round_trip_exact_sampled_larger():
    rng = random.Random(20240816)
    done = 0
    while done < 400:
        n = rng.randint(2, 40)
        m = sample_polygon_gluing(n, rng)
        if genus(m) == 0:
            continue
        assert reconstruct(core(m)) == m
        done += 1


@pytest.mark.parametrize("n", range(2, 7))
def test_core_invariants(n):
    for m in unicellular_maps(n):
        dec = core(m)
        c = dec.core
        assert min(vertex_degrees(c)) >= 3
        assert genus(c) == genus(m)
        assert c.n_faces() == 1
        assert dec.total_size == n
        assert len(dec.branches) == c.n_edges
        # profile fast path agrees with the full decomposition
        marked, others = branch_size_profile(m)
        assert marked == tree_edges(dec.branches[dec.root_branch_index].tree)
        assert others == tuple(
            sorted(
                tree_edges(b.tree)
                for i, b in enumerate(dec.branches)
                if i != dec.root_branch_index
            )
        )


def test_branch_sizes_count_every_edge_once():
    rng = random.Random(77)
    for _ in range(60):
        m = sample_polygon_gluing(rng.randint(4, 30), rng)
        if genus(m) == 0:
            continue
        dec = core(m)
        assert sum(tree_edges(b.tree) for b in dec.branches) == m.n_edges


def test_core_less_m_extremes():
    rng = random.Random(5)
    for _ in range(30):
        m = sample_polygon_gluing(rng.randint(3, 24), rng)
        if genus(m) == 0:
            continue
        # M above every branch size keeps the whole map
        assert core_less_M(m, m.n_edges + 1) == m
        # M = 2 keeps only size-1 branches: that is the core itself
        assert core_less_M(m, 2) == core(m).core


def test_core_less_m_validation():
    with pytest.raises(ParameterError):
        core_less_M(SQUARE, 1)


def test_core_less_m_interpolates_edge_count():
    rng = random.Random(31)
    for _ in range(40):
        m = sample_polygon_gluing(rng.randint(6, 30), rng)
        if genus(m) == 0:
            continue
        prev = None
        for M in range(2, m.n_edges + 2):
            edges = core_less_M(m, M).n_edges
            if prev is not None:
                assert edges >= prev
            prev = edges
        assert prev == m.n_edges


def test_decomposition_validation():
    dec = core(PENDANT)
    with pytest.raises(DecompositionError):
        BranchDecomposition(
            dec.core,
            dec.branches[:1],  # wrong branch count
            dec.root_branch_index,
            dec.marked_edge,
            dec.attachments,
        )
    with pytest.raises((DecompositionError, ParameterError)):
        replace(dec, marked_edge=(9, 9, 9))  # unresolvable address


def test_bookkeeping_identity_after_trimming():
    # edges(core^{<M}) + sum over removed branches of their sizes = n
    rng = random.Random(13)
    for _ in range(40):
        m = sample_polygon_gluing(rng.randint(6, 40), rng)
        if genus(m) == 0:
            continue
        dec = core(m)
        for M in (2, 3, 5):
            kept = core_less_M(m, M).n_edges
            removed = sum(
                tree_edges(b.tree) - 1
                for b in dec.branches
                if tree_edges(b.tree) >= M
            )
            assert kept + removed == m.n_edges


def test_profile_census_total():
    # all profiles over U(6, *) cover every genus >= 1 gluing exactly once
    census = Counter()
    total = 0
    for m in unicellular_maps(6):
        census[branch_size_profile(m)] += 1
        total += 1
    assert sum(census.values()) == total
    # frozen spot value: marked branch carries the whole map iff core is
    # a single loop... which cannot happen; smallest profile has 2 branches
    assert all(1 + len(others) >= 2 for (_, others) in census)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 16), st.randoms(use_true_random=False))
def test_round_trip_property(n, rng):
    m = sample_polygon_gluing(n, rng)
    if genus(m) == 0:
        return
    dec = core(m)
    assert reconstruct(dec) == m
    assert dec.total_size == n
