"""Random generation of maps, pairings and branch sizes.

The samplers are all exact: uniform pairings drive the polygon-gluing and
configuration models, rejection gives the fixed-genus law, and the branch
size laws use their exact weight tables (truncated where a certified
geometric tail bound says the lost mass is below 1e-12).
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import (
    EnumerationCapError,
    ParameterError,
    SamplerExhaustedError,
)
from .maps import CombinatorialMap, from_polygon_gluing, genus
from .series import eval_C, eval_D

_log = logging.getLogger(__name__)

__all__ = [
    "BranchSizeSampler",
    "DegreeSequence",
    "count_one_vertex_maps",
    "double_factorial_odd",
    "enumerate_pairings",
    "sample_branch_size",
    "sample_configuration_model",
    "sample_pairing",
    "sample_polygon_gluing",
    "sample_unicellular_fixed_genus",
]


@dataclass(frozen=True)
class DegreeSequence:
    """A degree sequence (d_1, ..., d_k) in the core regime: every d_i >= 3.

    ``admits_unicellular`` is the parity gate for one-face outcomes of the
    configuration model: the dart count must be even and half of it plus the
    vertex count must be odd, otherwise no pairing of the half-edges can
    close up into a single face.
    """

    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise ParameterError("degree sequence is empty")
        if any(d < 3 for d in entries):
            raise ParameterError(f"degrees must be >= 3, got {entries}")

    @property
    def total(self) -> int:
        return sum(self.entries)

    @property
    def k(self) -> int:
        return len(self.entries)

    @property
    def admits_unicellular(self) -> bool:
        t = self.total
        return t % 2 == 0 and (t // 2 + self.k) % 2 == 1


def double_factorial_odd(p: int) -> int:
    """(2p-1)!! = the number of perfect matchings on 2p points."""
    if p < 0:
        raise ParameterError(f"p must be nonnegative, got {p}")
    out = 1
    for k in range(1, 2 * p, 2):
        out *= k
    return out


def count_one_vertex_maps(p: int) -> Fraction:
    """(2p)! / (2^p p! (p+1)) as an exact rational.

    This is the closed count of gluings of the 2p-gon with a single vertex.
    It is an integer for even p (where it equals the matching count divided
    by p+1) and a non-integer rational for odd p, which is the quick sanity
    check that no one-vertex gluing parity is being miscounted.
    """
    if p < 1:
        raise ParameterError(f"p must be positive, got {p}")
    return Fraction(math.factorial(2 * p), 2**p * math.factorial(p) * (p + 1))


def sample_pairing(n_points: int, rng: random.Random) -> tuple[tuple[int, int], ...]:
    """A uniform perfect matching of 0..n_points-1.

    Matching the smallest unmatched point with a uniformly random partner,
    repeatedly, is uniform over all (n-1)!! matchings.
    """
    if n_points <= 0 or n_points % 2:
        raise ParameterError(f"n_points must be positive and even, got {n_points}")
    free = list(range(n_points))
    pairs: list[tuple[int, int]] = []
    while free:
        a = free.pop(0)
        b = free.pop(rng.randrange(len(free)))
        pairs.append((a, b))
    return tuple(pairs)


def enumerate_pairings(
    n_pairs: int, cap: int = 8
) -> Iterator[tuple[tuple[int, int], ...]]:
    """All perfect matchings of 0..2*n_pairs-1, lexicographically.

    There are (2p-1)!! of them, so the generator refuses to start beyond
    ``cap`` pairs; pass a larger cap explicitly to override.
    """
    if n_pairs < 0:
        raise ParameterError(f"n_pairs must be nonnegative, got {n_pairs}")
    if n_pairs > cap:
        raise EnumerationCapError(
            f"{n_pairs} pairs means {double_factorial_odd(n_pairs)} matchings; "
            f"raise cap={cap} explicitly if you mean it"
        )

    n = 2 * n_pairs
    used = bytearray(n)
    pairs: list[tuple[int, int]] = []

    def rec(start: int) -> Iterator[tuple[tuple[int, int], ...]]:
        a = start
        while a < n and used[a]:
            a += 1
        if a == n:
            yield tuple(pairs)
            return
        used[a] = 1
        for b in range(a + 1, n):
            if used[b]:
                continue
            used[b] = 1
            pairs.append((a, b))
            yield from rec(a + 1)
            pairs.pop()
            used[b] = 0
        used[a] = 0

    return rec(0)


def sample_polygon_gluing(n: int, rng: random.Random) -> CombinatorialMap:
    """Glue the sides of a 2n-gon along a uniform pairing.

    The result is a uniform rooted one-face map with n edges; its genus is
    whatever the pairing dictates.
    """
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    return from_polygon_gluing(sample_pairing(2 * n, rng), n)


def sample_unicellular_fixed_genus(
    n: int,
    g: int,
    rng: random.Random,
    max_attempts: int = 10**7,
) -> CombinatorialMap:
    """A uniform one-face map with n edges and genus g, by rejection.

    Polygon gluings restricted to a genus class stay uniform on it, so the
    loop below is exact.  Feasibility needs 0 <= g <= n/2; the acceptance
    rate degrades quickly once g sits far below n/2 (the random gluing's
    vertex count concentrates around log(2n)), hence the attempt cap.
    """
    if not 0 <= 2 * g <= n:
        raise ParameterError(f"genus {g} infeasible for {n} edges")
    for attempt in range(1, max_attempts + 1):
        m = sample_polygon_gluing(n, rng)
        if genus(m) == g:
            _log.debug("accepted genus-%d gluing after %d attempts", g, attempt)
            return m
    raise SamplerExhaustedError(
        f"no genus-{g} gluing with {n} edges in {max_attempts} attempts",
        attempts=max_attempts,
        accepted=0,
    )


def sample_configuration_model(
    degrees: DegreeSequence | Sequence[int], rng: random.Random
) -> CombinatorialMap:
    """The map configuration model: fixed rotations, uniform pairing.

    Vertex i owns a consecutive block of ``degrees[i]`` darts whose clockwise
    rotation is the increasing order of the block; the edge involution is a
    uniform matching of all darts and the root is a uniform dart.  The
    outcome may be disconnected, so callers that need a surface should check
    connectivity (a one-face outcome always is connected).
    """
    if isinstance(degrees, DegreeSequence):
        degrees = degrees.entries
    if not degrees:
        raise ParameterError("degree sequence is empty")
    if any(d < 1 for d in degrees):
        raise ParameterError(f"degrees must be positive, got {tuple(degrees)}")
    n_darts = sum(degrees)
    if n_darts % 2:
        raise ParameterError(f"degree sum must be even, got {n_darts}")
    sigma = [0] * n_darts
    offset = 0
    for d in degrees:
        for j in range(d):
            sigma[offset + j] = offset + (j + 1) % d
        offset += d
    pairing = sample_pairing(n_darts, rng)
    alpha = [0] * n_darts
    for a, b in pairing:
        alpha[a] = b
        alpha[b] = a
    return CombinatorialMap(
        n_darts=n_darts,
        alpha=tuple(alpha),
        sigma=tuple(sigma),
        root=rng.randrange(n_darts),
    )


class BranchSizeSampler:
    """Samples the two branch-size laws at a fixed weight beta in (0, 1/4).

    The plain law puts mass dt_k beta^k / D(beta) on size k, the marked law
    k dt_k beta^k / C(beta).  Weight tables follow the exact term ratio
    dt_{k+1}/dt_k = 2k(2k+1)/(k(k+1)) and are truncated once the geometric
    bound D(A beta)/(D(beta) A^K) with A = 1/(2 sqrt(beta)) certifies that
    the remaining mass is below 1e-12; the truncated table is renormalised,
    so the sampled law is within total variation 1e-12 of the true one.
    """

    def __init__(self, beta: float, mass_tol: float = 1e-12):
        if not 0.0 < beta < 0.25:
            raise ParameterError(f"beta must lie in (0, 1/4), got {beta}")
        self.beta = beta
        amp = 1.0 / (2.0 * math.sqrt(beta))  # geometric mean of 1 and 1/(4 beta)
        d_beta = eval_D(beta)
        tail_prefactor = eval_D(amp * beta) / d_beta
        k_max = max(4, math.ceil(math.log(tail_prefactor / mass_tol) / math.log(amp)))

        weights = [0.0, beta]  # dt_1 beta^1
        for k in range(1, k_max):
            weights.append(weights[-1] * beta * 2 * k * (2 * k + 1) / (k * (k + 1)))

        plain_cum: list[float] = []
        marked_cum: list[float] = []
        acc_p = acc_m = acc_m2 = 0.0
        for k, w in enumerate(weights):
            acc_p += w
            acc_m += k * w
            acc_m2 += k * k * w
            plain_cum.append(acc_p)
            marked_cum.append(acc_m)
        self._plain_cum = [c / acc_p for c in plain_cum]
        self._marked_cum = [c / acc_m for c in marked_cum]
        self._mean_plain = acc_m / acc_p
        self._mean_marked = acc_m2 / acc_m
        self.k_max = k_max
        # sanity: the table must carry essentially all of D(beta) and C(beta)
        if abs(acc_p - d_beta) > 1e-9 * d_beta:
            raise ParameterError("branch-size table failed its D mass check")
        if abs(acc_m - eval_C(beta)) > 1e-9 * eval_C(beta):
            raise ParameterError("branch-size table failed its C mass check")

    def _draw(self, cum: list[float], rng: random.Random) -> int:
        u = rng.random()
        while u == 0.0:
            u = rng.random()
        lo, hi = 0, len(cum) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if cum[mid] < u:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def sample_plain(self, rng: random.Random) -> int:
        """A size from the plain law (every doubly rooted tree weighted beta^k)."""
        return self._draw(self._plain_cum, rng)

    def sample_marked(self, rng: random.Random) -> int:
        """A size from the marked law (an extra factor k for the marked edge)."""
        return self._draw(self._marked_cum, rng)

    def plain_pmf(self, k: int) -> float:
        if k < 1:
            return 0.0
        if k >= len(self._plain_cum):
            return 0.0
        return self._plain_cum[k] - self._plain_cum[k - 1]

    def marked_pmf(self, k: int) -> float:
        if k < 1:
            return 0.0
        if k >= len(self._marked_cum):
            return 0.0
        return self._marked_cum[k] - self._marked_cum[k - 1]

    def table_mean_plain(self) -> float:
        """Mean of the truncated plain table; equals beta D'(beta)/D(beta)
        up to the certified truncation mass."""
        return self._mean_plain

    def table_mean_marked(self) -> float:
        """Mean of the truncated marked table; closed form 1 + 6 beta/(1-4 beta)."""
        return self._mean_marked


@lru_cache(maxsize=64)
def _branch_size_tables(beta: float) -> BranchSizeSampler:
    return BranchSizeSampler(beta)


def sample_branch_size(law: str, beta: float, rng: random.Random) -> int:
    """One draw from a branch-size law at weight ``beta``.

    ``law`` is "Y" for the plain law (mass dt_k beta^k) or "X" for the
    marked law (an extra factor k); the weight tables are cached per beta.
    """
    sampler = _branch_size_tables(beta)
    if law == "X":
        return sampler.sample_marked(rng)
    if law == "Y":
        return sampler.sample_plain(rng)
    raise ParameterError(f"law must be 'X' or 'Y', got {law!r}")
