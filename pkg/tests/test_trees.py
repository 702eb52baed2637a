from __future__ import annotations

import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from unimap.errors import ParameterError
from unimap.maps import genus
from unimap.trees import (
    DoublyRootedTree,
    children_to_map,
    doubly_rooted_count,
    doubly_rooted_to_map,
    dyck_to_children,
    entry_dart,
    enumerate_doubly_rooted_trees,
    enumerate_plane_trees,
    sample_doubly_rooted_tree,
    sample_dyck_word,
    sample_plane_tree,
    tree_edges,
)

from .oracles import brute_doubly_rooted_count, catalan


@pytest.mark.parametrize("k", range(1, 8))
def test_plane_tree_count_is_catalan(k):
    trees = enumerate_plane_trees(k)
    assert len(trees) == catalan(k)
    assert len(set(trees)) == len(trees)


def test_dyck_words_balanced():
    rng = random.Random(4)
    for _ in range(200):
        k = rng.randint(1, 30)
        word = sample_dyck_word(k, rng)
        assert len(word) == 2 * k
        height = 0
        for step in word:
            assert step in (1, -1)
            height += step
            assert height >= 0
        assert height == 0


def test_dyck_sampler_uniform_on_small_support():
    # k = 3 has 5 trees; chi-square style tolerance on 5000 draws
    rng = random.Random(8)
    counts = Counter(dyck_to_children(sample_dyck_word(3, rng)) for _ in range(5000))
    assert set(counts) == set(enumerate_plane_trees(3))
    for c in counts.values():
        assert 830 <= c <= 1170


@pytest.mark.parametrize("k", range(1, 7))
def test_children_to_map_is_a_plane_tree(k):
    for tree in enumerate_plane_trees(k):
        m = children_to_map(tree)
        assert m.n_edges == k
        assert genus(m) == 0
        assert m.n_faces() == 1


def test_tree_edges_counts_whole_subtree():
    tree = (((),), ())  # root with two children, first has one child
    assert tree_edges(tree) == 3
    assert tree_edges(()) == 0


def test_entry_dart_is_parent_side():
    tree = (((),), ())
    m = children_to_map(tree)
    d0 = entry_dart(tree, (0,))
    # the parent-side dart of the first root edge is the root dart itself
    assert d0 == m.root
    with pytest.raises(ParameterError):
        entry_dart(tree, (2,))
    with pytest.raises(ParameterError):
        entry_dart(tree, ())


@pytest.mark.parametrize("k", range(1, 7))
def test_doubly_rooted_enumeration_matches_brute_force(k):
    enumerated = enumerate_doubly_rooted_trees(k)
    assert len(enumerated) == doubly_rooted_count(k) == math.comb(2 * k - 1, k - 1)
    assert len(set(enumerated)) == len(enumerated)
    assert brute_doubly_rooted_count(k, enumerate_plane_trees(k)) == len(enumerated)


def test_doubly_rooted_validation():
    with pytest.raises(ParameterError):
        DoublyRootedTree(((),), ())  # empty path
    with pytest.raises(ParameterError):
        DoublyRootedTree(((), ()), (1,))  # v2 must sit under child 0


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_doubly_rooted_sampler_uniform(k):
    rng = random.Random(k)
    support = enumerate_doubly_rooted_trees(k)
    draws = 4000
    counts = Counter(sample_doubly_rooted_tree(k, rng) for _ in range(draws))
    assert set(counts) <= set(support)
    expected = draws / len(support)
    for c in counts.values():
        assert abs(c - expected) < 6 * math.sqrt(expected) + 10


def test_doubly_rooted_to_map_shape():
    for drt in enumerate_doubly_rooted_trees(3):
        m, v1, v2 = doubly_rooted_to_map(drt)
        assert genus(m) == 0
        assert m.n_edges == 3
        assert 0 <= v1 < m.n_darts and 0 <= v2 < m.n_darts
        if len(drt.path) == 1 and drt.tree[0] == ():
            assert v1 != v2  # v2 a child of the root


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 40), st.randoms(use_true_random=False))
def test_sampled_trees_have_right_size(k, rng):
    m = sample_plane_tree(k, rng)
    assert m.n_edges == k
    assert genus(m) == 0
    drt = sample_doubly_rooted_tree(min(k, 12), rng)
    assert tree_edges(drt.tree) == min(k, 12)
