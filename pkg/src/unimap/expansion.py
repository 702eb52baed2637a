"""Edge expansion: exact Cheeger constants, spectral brackets, and the
subset-counting estimates used to certify expansion of random cores.

Conventions, fixed once for the whole package: the volume of a vertex set
is its degree sum, loops count 2 toward volume and never cross a cut,
parallel edges count with multiplicity, and

    h(X) = boundary(X) / min(vol(X), vol(complement)).

The exact engine only enumerates connected subsets with vol <= total/2.
That restriction is lossless: any optimal cut side of at most half the
volume splits into components, and by the mediant inequality one of the
components does at least as well.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DisconnectedGraphError,
    EmptySideError,
    EnumerationCapError,
    ParameterError,
)
from .maps import Multigraph, is_connected
from .samplers import DegreeSequence, enumerate_pairings, sample_pairing
from .trees import DoublyRootedTree, sample_doubly_rooted_tree

__all__ = [
    "BadEventEstimate",
    "CutWitness",
    "SubsetVolumeCount",
    "branch_substitution_transfer_check",
    "cheeger_exact",
    "count_subset_volumes",
    "estimate_bad_event",
    "h_value",
    "is_kappa_expander",
    "spectral_cheeger_bounds",
    "wilson_interval",
]


@dataclass(frozen=True)
class CutWitness:
    """A vertex subset with its cut data; h_value is exact."""

    subset: tuple[int, ...]
    boundary: int
    vol_x: int
    vol_complement: int
    h_value: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "subset", tuple(sorted(self.subset)))
        if not self.subset:
            raise EmptySideError("witness subset is empty")
        small = min(self.vol_x, self.vol_complement)
        expect = Fraction(0) if self.boundary == 0 else Fraction(self.boundary, small)
        if self.h_value != expect:
            raise ParameterError("h_value inconsistent with cut fields")


def _edge_multiplicities(g: Multigraph) -> dict[tuple[int, int], int]:
    mult: dict[tuple[int, int], int] = {}
    for u, v in g.edges:
        mult[(u, v)] = mult.get((u, v), 0) + 1
    return mult


def h_value(g: Multigraph, subset: Iterable[int]) -> CutWitness:
    """Exact expansion of one cut.

    Loops lie entirely on their own side, so they add to volume and never
    to the boundary.  Both sides must be nonempty.
    """
    x = frozenset(subset)
    if not x:
        raise EmptySideError("subset is empty")
    if not x <= set(range(g.n_vertices)):
        raise ParameterError(f"subset {sorted(x)} out of range")
    if len(x) == g.n_vertices:
        raise EmptySideError("complement is empty")
    boundary = 0
    for u, v in g.edges:
        if (u in x) != (v in x):
            boundary += 1
    vol_x = g.volume(x)
    vol_c = sum(g.degrees) - vol_x
    small = min(vol_x, vol_c)
    # a boundary edge gives the smaller side a dart, so small = 0 forces
    # boundary = 0; define h = 0 there instead of dividing
    h = Fraction(0) if boundary == 0 else Fraction(boundary, small)
    return CutWitness(tuple(sorted(x)), boundary, vol_x, vol_c, h)


def _components(g: Multigraph) -> list[list[int]]:
    adj = g.adjacency()
    seen = bytearray(g.n_vertices)
    comps = []
    for start in range(g.n_vertices):
        if seen[start]:
            continue
        comp = [start]
        seen[start] = 1
        stack = [start]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = 1
                    comp.append(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def cheeger_exact(g: Multigraph, *, cap: int = 24) -> CutWitness:
    """Minimum of h over all cuts, with an argmin witness.

    Enumerates connected subsets grown upward from their minimum vertex,
    pruning once the volume passes half of the total; ties go to the
    lexicographically smallest subset.  Disconnected graphs short-circuit
    to h = 0 with a component as the witness.
    """
    n = g.n_vertices
    if n < 2:
        raise EmptySideError("expansion needs at least two vertices")
    if n > cap:
        raise EnumerationCapError(f"{n} vertices exceeds the exact cap {cap}")
    if not is_connected(g):
        return h_value(g, _components(g)[0])

    deg = g.degrees
    total = sum(deg)
    adj_mask = [0] * n
    for u, v in g.edges:
        if u != v:
            adj_mask[u] |= 1 << v
            adj_mask[v] |= 1 << u
    mult = _edge_multiplicities(g)
    # degree toward a growing subset, rebuilt incrementally would need the
    # full matrix anyway at these sizes
    mult_row = [[0] * n for _ in range(n)]
    for (u, v), k in mult.items():
        if u != v:
            mult_row[u][v] = k
            mult_row[v][u] = k
    plain_deg = [deg[v] - 2 * mult.get((v, v), 0) for v in range(n)]

    best: tuple[int, int, tuple[int, ...]] | None = None  # (boundary, small-vol, subset)

    def consider(mask: int, vol: int, boundary: int) -> None:
        nonlocal best
        small = min(vol, total - vol)
        if best is not None:
            b_bnd, b_small, b_sub = best
            if boundary * b_small > b_bnd * small:
                return
            if boundary * b_small == b_bnd * small:
                subset = tuple(v for v in range(n) if mask >> v & 1)
                if subset >= b_sub:
                    return
                best = (boundary, small, subset)
                return
        best = (boundary, small, tuple(v for v in range(n) if mask >> v & 1))

    for anchor in range(n):
        if 2 * deg[anchor] > total:
            continue
        above = ~((1 << (anchor + 1)) - 1)
        start = 1 << anchor
        consider(start, deg[anchor], plain_deg[anchor])
        # states: (subset mask, candidates, permanently banned, vol, boundary);
        # each connected subset with minimum vertex = anchor shows up exactly
        # once because siblings ban every candidate branched on before them
        stack = [(start, adj_mask[anchor] & above, 0, deg[anchor], plain_deg[anchor])]
        while stack:
            mask, cand, banned, vol, bnd = stack.pop()
            tried = 0
            c = cand
            while c:
                vbit = c & -c
                c ^= vbit
                new_vol = vol + deg[vbit.bit_length() - 1]
                if 2 * new_vol <= total:
                    v = vbit.bit_length() - 1
                    into = sum(mult_row[v][u] for u in range(n) if mask >> u & 1)
                    new_bnd = bnd + plain_deg[v] - 2 * into
                    new_mask = mask | vbit
                    consider(new_mask, new_vol, new_bnd)
                    new_banned = banned | tried
                    new_cand = ((cand & ~tried & ~vbit) | (adj_mask[v] & above)) & ~new_mask & ~new_banned
                    stack.append((new_mask, new_cand, new_banned, new_vol, new_bnd))
                tried |= vbit

    if best is None:
        raise EmptySideError("no subset with volume at most half the total")
    return h_value(g, best[2])


def is_kappa_expander(
    g: Multigraph, kappa: Fraction | int | str, *, cap: int = 24
) -> tuple[bool, CutWitness | None]:
    """Whether every cut satisfies h >= kappa; a violating cut otherwise.

    A one-vertex graph has no cut at all, so it is vacuously an expander.
    """
    kq = Fraction(kappa)
    if kq < 0:
        raise ParameterError(f"kappa must be nonnegative, got {kappa}")
    if g.n_vertices == 1:
        return True, None
    wit = cheeger_exact(g, cap=cap)
    if wit.h_value >= kq:
        return True, None
    return False, wit


def spectral_cheeger_bounds(g: Multigraph) -> tuple[float, float]:
    """(lambda_2/2, sqrt(2 lambda_2)) for the degree-normalized Laplacian.

    Loops add 2 to the degree and 2 to the diagonal adjacency entry, which
    matches their cut behavior: pure lazy weight.  The pair brackets the
    exact Cheeger constant on every connected graph.
    """
    n = g.n_vertices
    if n < 2:
        raise EmptySideError("expansion needs at least two vertices")
    if not is_connected(g):
        raise DisconnectedGraphError("spectral bounds need a connected graph")
    adj = np.zeros((n, n))
    for u, v in g.edges:
        if u == v:
            adj[u, u] += 2.0
        else:
            adj[u, v] += 1.0
            adj[v, u] += 1.0
    inv_sqrt_deg = 1.0 / np.sqrt(np.array(g.degrees, dtype=float))
    lap = np.eye(n) - inv_sqrt_deg[:, None] * adj * inv_sqrt_deg[None, :]
    lam2 = float(np.linalg.eigvalsh(lap)[1])
    lam2 = max(lam2, 0.0)
    return lam2 / 2.0, math.sqrt(2.0 * lam2)


@dataclass(frozen=True)
class SubsetVolumeCount:
    """N_V(d) together with its combinatorial ceiling."""

    V: int
    count: int
    bound: int


def count_subset_volumes(
    d: DegreeSequence | Sequence[int], V: int
) -> SubsetVolumeCount:
    """Exact number of vertex subsets of total degree V, with the ceiling
    floor(V/3) * binom(floor(|d|/3), floor(V/3)).

    Needs every degree >= 3 and 0 < V <= |d|/2; under those the count
    never exceeds the ceiling, which is the estimate driving the
    bad-event union bound.
    """
    if not isinstance(d, DegreeSequence):
        d = DegreeSequence(tuple(d))
    total = d.total
    if not 0 < 2 * V <= total:
        raise ParameterError(f"volume {V} outside (0, {total}/2]")
    dp = [0] * (V + 1)
    dp[0] = 1
    for di in d.entries:
        for s in range(V, di - 1, -1):
            dp[s] += dp[s - di]
    bound = (V // 3) * math.comb(total // 3, V // 3)
    return SubsetVolumeCount(V=V, count=dp[V], bound=bound)


def wilson_interval(
    successes: int, trials: int, z: float = 2.5758293035489004
) -> tuple[float, float]:
    """Wilson score interval; the default z is the two-sided 99% quantile."""
    if trials <= 0:
        raise ParameterError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ParameterError("successes outside [0, trials]")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class BadEventEstimate:
    """Frequency of the sparse-cut event, exact or with a Wilson 99% CI."""

    frequency: Fraction
    ci_low: float
    ci_high: float
    exact: bool
    trials: int


def _volume_subsets(entries: tuple[int, ...], V: int) -> list[int]:
    """Bitmasks of all vertex subsets with degree sum exactly V."""
    out = []
    k = len(entries)
    for mask in range(1, 1 << k):
        vol = 0
        mm = mask
        while mm:
            i = (mm & -mm).bit_length() - 1
            vol += entries[i]
            if vol > V:
                break
            mm &= mm - 1
        if vol == V:
            out.append(mask)
    return out


def _has_sparse_subset(
    pairing: Sequence[tuple[int, int]],
    dart_vertex: Sequence[int],
    subsets: Sequence[int],
    max_boundary: int,
) -> bool:
    """Whether some listed subset has strictly fewer than ``max_boundary``+1
    boundary darts, i.e. boundary <= max_boundary."""
    for mask in subsets:
        boundary = 0
        ok = True
        for a, b in pairing:
            if (mask >> dart_vertex[a] & 1) != (mask >> dart_vertex[b] & 1):
                boundary += 1
                if boundary > max_boundary:
                    ok = False
                    break
        if ok:
            return True
    return False


def estimate_bad_event(
    d: DegreeSequence | Sequence[int],
    V: int,
    delta: Fraction | float | str,
    trials: int,
    rng: random.Random,
) -> BadEventEstimate:
    """Probability that a configuration-model draw has a volume-V subset
    whose boundary dart count is strictly below delta*V.

    Small dart totals (<= 14, at most 135k pairings) are enumerated
    exactly; otherwise ``trials`` Monte Carlo draws with a Wilson 99%
    interval.  The threshold comparison is exact rational arithmetic.
    """
    if not isinstance(d, DegreeSequence):
        d = DegreeSequence(tuple(d))
    dq = Fraction(delta)
    if not 0 < dq < 1:
        raise ParameterError(f"delta must lie in (0, 1), got {delta}")
    total = d.total
    if total % 2:
        raise ParameterError(f"degree sum must be even, got {total}")
    if not 0 < 2 * V <= total:
        raise ParameterError(f"volume {V} outside (0, {total}/2]")

    dart_vertex = []
    for i, di in enumerate(d.entries):
        dart_vertex.extend([i] * di)
    subsets = _volume_subsets(d.entries, V)
    # boundary < delta*V  <=>  boundary <= ceil(delta*V) - 1
    threshold = dq * V
    max_boundary = math.ceil(threshold) - 1 if threshold != int(threshold) else int(threshold) - 1

    if total <= 14:
        hits = count = 0
        for pairing in enumerate_pairings(total // 2):
            count += 1
            if subsets and _has_sparse_subset(pairing, dart_vertex, subsets, max_boundary):
                hits += 1
        freq = Fraction(hits, count)
        return BadEventEstimate(freq, float(freq), float(freq), True, count)

    if trials <= 0:
        raise ParameterError("trials must be positive for the Monte Carlo path")
    hits = 0
    for _ in range(trials):
        pairing = sample_pairing(total, rng)
        if subsets and _has_sparse_subset(pairing, dart_vertex, subsets, max_boundary):
            hits += 1
    lo, hi = wilson_interval(hits, trials)
    return BadEventEstimate(Fraction(hits, trials), lo, hi, False, trials)


def _tree_as_edges(
    drt: DoublyRootedTree, u: int, v: int, next_id: int
) -> tuple[list[tuple[int, int]], int]:
    """Edges of the doubly rooted tree with its first root at ``u`` and its
    second at ``v``; inner nodes get fresh ids starting at ``next_id``."""
    ids = {(): u}
    edges: list[tuple[int, int]] = []
    stack: list[tuple[tuple[int, ...], tuple]] = [((), drt.tree)]
    while stack:
        addr, node = stack.pop()
        for i, child in enumerate(node):
            caddr = addr + (i,)
            if caddr == drt.path:
                ids[caddr] = v
            else:
                ids[caddr] = next_id
                next_id += 1
            edges.append((ids[addr], ids[caddr]))
            stack.append((caddr, child))
    return edges, next_id


def branch_substitution_transfer_check(
    h_graph: Multigraph, M: int, rng: random.Random
) -> bool:
    """Substitute a random doubly rooted tree of size <= M for every edge
    and check that the expansion drops by a factor of at most 2M+1.

    Sizes are uniform on 1..M and trees uniform given the size.  Both
    Cheeger constants are exact, so the inequality check is too.
    """
    if M < 1:
        raise ParameterError(f"M must be at least 1, got {M}")
    if not is_connected(h_graph):
        raise DisconnectedGraphError("substitution needs a connected graph")
    base = cheeger_exact(h_graph)
    edges: list[tuple[int, int]] = []
    next_id = h_graph.n_vertices
    for u, v in h_graph.edges:
        size = rng.randint(1, M)
        drt = sample_doubly_rooted_tree(size, rng)
        tree_edges, next_id = _tree_as_edges(drt, u, v, next_id)
        edges.extend(tree_edges)
    big = Multigraph(next_id, tuple(edges))
    wit = cheeger_exact(big, cap=max(24, big.n_vertices))
    return wit.h_value >= base.h_value / (2 * M + 1)
