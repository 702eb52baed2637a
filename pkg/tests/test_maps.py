from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from unimap.errors import GenusError, MalformedMapError
from unimap.maps import (
    CombinatorialMap,
    Multigraph,
    canonical_form,
    decode_map,
    encode_map,
    face_order_form,
    face_order_relabeling,
    face_tour,
    from_polygon_gluing,
    genus,
    parse_multigraph,
    rooted_isomorphic,
    underlying_graph,
    vertex_degrees,
    write_multigraph,
)
from unimap.samplers import sample_pairing, sample_polygon_gluing

from .oracles import corner_genus

SQUARE = from_polygon_gluing(((0, 2), (1, 3)), 2)


def random_gluings(seed: int, count: int, n_lo: int = 1, n_hi: int = 12):
    rng = random.Random(seed)
    for _ in range(count):
        yield sample_polygon_gluing(rng.randint(n_lo, n_hi), rng)


def test_square_is_the_torus_map():
    assert SQUARE.n_vertices() == 1
    assert SQUARE.n_faces() == 1
    assert SQUARE.n_edges == 2
    assert genus(SQUARE) == 1


def test_malformed_inputs_rejected():
    with pytest.raises(MalformedMapError):
        CombinatorialMap(4, (1, 0, 3, 3), (1, 2, 3, 0), 0)  # alpha not involution
    with pytest.raises(MalformedMapError):
        CombinatorialMap(4, (0, 1, 3, 2), (1, 0, 3, 2), 0)  # alpha has fixed points
    with pytest.raises(MalformedMapError):
        CombinatorialMap(4, (1, 0, 3, 2), (1, 2, 3, 0), 7)  # root out of range
    with pytest.raises(MalformedMapError):
        CombinatorialMap(3, (1, 0, 2), (0, 1, 2), 0)  # odd dart count


def test_genus_agrees_with_corner_walk_oracle():
    for m in random_gluings(seed=101, count=300):
        assert genus(m) == corner_genus(m)


def test_genus_requires_connected():
    # two disjoint loops on one "map": sigma fixes each pair separately
    m = CombinatorialMap(4, (1, 0, 3, 2), (0, 1, 2, 3), 0)
    with pytest.raises(GenusError):
        genus(m)


def test_face_tour_covers_polygon_in_order():
    assert list(face_tour(SQUARE)) == [0, 1, 2, 3]
    m = sample_polygon_gluing(9, random.Random(3))
    assert list(face_tour(m)) == list(range(18))


def test_encode_decode_round_trip():
    for m in random_gluings(seed=7, count=50):
        assert decode_map(encode_map(m)) == m
    with pytest.raises(MalformedMapError):
        decode_map("{not json")
    with pytest.raises(MalformedMapError):
        decode_map('{"n_darts": 2}')


def test_face_order_form_is_identity_on_gluings():
    # polygon gluings already carry the face-order labelling
    for m in random_gluings(seed=13, count=40):
        assert face_order_form(m) == m


def test_face_order_form_canonicalizes_rooted_isomorphic_maps():
    rng = random.Random(99)
    for m in random_gluings(seed=17, count=40):
        # relabel darts by a random permutation fixing nothing structural
        perm = list(range(m.n_darts))
        rng.shuffle(perm)
        alpha = [0] * m.n_darts
        sigma = [0] * m.n_darts
        for d in range(m.n_darts):
            alpha[perm[d]] = perm[m.alpha[d]]
            sigma[perm[d]] = perm[m.sigma[d]]
        relabeled = CombinatorialMap(
            m.n_darts, tuple(alpha), tuple(sigma), perm[m.root]
        )
        assert rooted_isomorphic(m, relabeled)
        assert face_order_form(relabeled) == m


def test_face_order_relabeling_fixes_root():
    for m in random_gluings(seed=23, count=20):
        assert face_order_relabeling(m)[m.root] == 0


def test_canonical_form_invariant_under_relabeling():
    m = sample_polygon_gluing(6, random.Random(5))
    assert canonical_form(m) == canonical_form(face_order_form(m))
    assert rooted_isomorphic(m, m)


def test_vertex_degrees_sum_to_dart_count():
    for m in random_gluings(seed=31, count=50):
        degs = vertex_degrees(m)
        assert sum(degs) == m.n_darts
        assert degs == tuple(sorted(degs))


def test_underlying_graph_degrees_match():
    for m in random_gluings(seed=37, count=50):
        g, dart_vertex = underlying_graph(m)
        assert g.n_edges == m.n_edges
        assert tuple(sorted(g.degrees)) == vertex_degrees(m)
        assert len(dart_vertex) == m.n_darts


def test_multigraph_conventions():
    g = Multigraph(3, ((1, 0), (2, 2), (0, 1)))
    assert g.edges == ((0, 1), (2, 2), (0, 1))  # endpoints normalized, order kept
    assert g.degrees == (2, 2, 2)  # the loop counts twice at vertex 2
    assert list(g.adjacency()[0]) == [1]  # no multiplicity, no loops


def test_multigraph_text_round_trip():
    g = Multigraph(4, ((0, 1), (1, 2), (2, 3), (1, 1)))
    assert parse_multigraph(write_multigraph(g)) == g
    with pytest.raises(ValueError):
        parse_multigraph("0 1\n")
    with pytest.raises(ValueError):
        parse_multigraph("p mg 2 3\n0 1\n")


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9), st.randoms(use_true_random=False))
def test_euler_formula_property(n, rng):
    m = from_polygon_gluing(sample_pairing(2 * n, rng), n)
    g = genus(m)
    assert m.n_vertices() - m.n_edges + m.n_faces() == 2 - 2 * g
    assert m.n_faces() == 1
    assert 0 <= 2 * g <= n
