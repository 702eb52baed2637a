"""Exact tree series, the branch-weight equation, and the constant pipeline.

Everything here is desk arithmetic: truncated power series over exact
rationals for the tree families, closed-form real evaluations for the
Boltzmann weights, and the deterministic derivation of the expander
constants (A, B, W, c, delta, M, kappa) from the two user-facing inputs
theta and epsilon.

Series cast:

* ``T`` rooted plane trees with at least one edge, by edge count;
* ``D`` doubly rooted trees (an ordered pair of distinct marked vertices),
  which decompose along the root-to-root path as ``D = T + T*D``;
* ``C = z*D'`` doubly rooted trees with one marked edge.

The closed forms are rational expressions in ``s = sqrt(1-4z)``.  For real
evaluation we use the algebraically simplified forms ``D = 2z/(s(1+s))``
and ``C = z/s**3`` (obtained from the textbook expressions via
``1-s = 4z/(1+s)``), which are numerically stable near ``z = 0``; the
literal expressions are expanded coefficient-by-coefficient in the tests
and must agree exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InfeasibleConstantsError, ParameterError

__all__ = [
    "ConstantPipeline",
    "TruncatedSeries",
    "catalan",
    "derive_constants",
    "eval_C",
    "eval_D",
    "expected_marked_size",
    "expected_plain_size",
    "rate_function",
    "series_C",
    "series_C_closed_form",
    "series_D",
    "series_D_closed_form",
    "series_T",
    "series_sqrt_one_minus_4z",
    "solve_beta",
    "solve_beta_closed_form",
    "solve_beta_finite_n",
    "sup_rate_over_block",
    "tail_bound",
]


def catalan(k: int) -> int:
    return math.comb(2 * k, k) // (k + 1)


def _normalize(x: Fraction | int) -> Fraction | int:
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


class TruncatedSeries:
    """A power series truncated at a fixed order, with exact coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Fraction | int]):
        self.coeffs: tuple[Fraction | int, ...] = tuple(_normalize(c) for c in coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction | int:
        return self.coeffs[k]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return all(
            Fraction(a) == Fraction(b) for a, b in zip(self.coeffs, other.coeffs)
        ) and len(self.coeffs) == len(other.coeffs)

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in self.coeffs[:8])
        tail = ", ..." if len(self.coeffs) > 8 else ""
        return f"TruncatedSeries([{head}{tail}], order={self.order})"

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order)
        return TruncatedSeries([self.coeffs[k] + other.coeffs[k] for k in range(n + 1)])

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order)
        return TruncatedSeries([self.coeffs[k] - other.coeffs[k] for k in range(n + 1)])

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out: list[Fraction | int] = [0] * (n + 1)
        for i in range(min(len(a), n + 1)):
            ai = a[i]
            if not ai:
                continue
            for j in range(min(len(b), n + 1 - i)):
                if b[j]:
                    out[i + j] += ai * b[j]
        return TruncatedSeries(out)

    def scale(self, factor: Fraction | int) -> "TruncatedSeries":
        return TruncatedSeries([factor * c for c in self.coeffs])

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by z**k, keeping the truncation order."""
        return TruncatedSeries(([0] * k + list(self.coeffs))[: self.order + 1])

    def derivative(self) -> "TruncatedSeries":
        """Formal derivative; the order drops by one."""
        return TruncatedSeries([k * self.coeffs[k] for k in range(1, len(self.coeffs))])

    def z_derivative(self) -> "TruncatedSeries":
        """z * d/dz, which keeps the order."""
        return TruncatedSeries([k * self.coeffs[k] for k in range(len(self.coeffs))])

    def valuation(self) -> int:
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return len(self.coeffs)

    def __truediv__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        """Exact division.  A common power of z is cancelled first, so the
        divisor may vanish at 0 as long as the quotient is still a power
        series; the result loses that many orders of truncation."""
        v = other.valuation()
        if v > other.order:
            raise ZeroDivisionError("division by the zero series")
        if self.valuation() < v:
            raise ArithmeticError("quotient is not a power series")
        num = self.coeffs[v:]
        den = other.coeffs[v:]
        n = min(len(num), len(den))
        inv_lead = Fraction(1, 1) / Fraction(den[0])
        out: list[Fraction | int] = []
        for k in range(n):
            acc = Fraction(num[k]) if k < len(num) else Fraction(0)
            for j in range(1, k + 1):
                if j < len(den) and den[j]:
                    acc -= Fraction(den[j]) * out[k - j]
            out.append(acc * inv_lead)
        return TruncatedSeries(out)

    def pow(self, e: int) -> "TruncatedSeries":
        result = TruncatedSeries([1] + [0] * self.order)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """self(inner(z)); inner must have zero constant term (Horner scheme)."""
        if inner.coeffs and inner.coeffs[0]:
            raise ArithmeticError("composition needs a zero constant term")
        n = min(self.order, inner.order)
        acc = TruncatedSeries([self.coeffs[n]] + [0] * n)
        for k in range(n - 1, -1, -1):
            acc = acc * inner
            acc = acc + TruncatedSeries([self.coeffs[k]] + [0] * n)
        return acc


def series_sqrt_one_minus_4z(order: int) -> TruncatedSeries:
    """sqrt(1-4z) expanded exactly: 1 - 2*sum_{k>=1} Cat(k-1) z^k."""
    coeffs: list[int] = [1]
    coeffs.extend(-2 * catalan(k - 1) for k in range(1, order + 1))
    return TruncatedSeries(coeffs)


def series_T(order: int) -> TruncatedSeries:
    """Rooted plane trees with >= 1 edge: coefficient of z^k is Cat(k)."""
    return TruncatedSeries([0] + [catalan(k) for k in range(1, order + 1)])


def series_D(order: int) -> TruncatedSeries:
    """Doubly rooted trees via the path decomposition D = T/(1-T)."""
    t = series_T(order)
    one = TruncatedSeries([1] + [0] * order)
    return t / (one - t)


def series_C(order: int) -> TruncatedSeries:
    """Doubly rooted trees with a marked edge: C = z*D'."""
    return series_D(order).z_derivative()


def series_D_closed_form(order: int) -> TruncatedSeries:
    """Expansion of (-2z + 1 - s)/(4z - 1 + s), s = sqrt(1-4z)."""
    pad = order + 2
    s = series_sqrt_one_minus_4z(pad)
    one = TruncatedSeries([1] + [0] * pad)
    z = TruncatedSeries([0, 1] + [0] * (pad - 1))
    num = one - z.scale(2) - s
    den = z.scale(4) - one + s
    return TruncatedSeries((num / den).coeffs[: order + 1])


def series_C_closed_form(order: int) -> TruncatedSeries:
    """Expansion of z(2 - 2s - 4z)/((4z - 1 + s)^2 s), s = sqrt(1-4z)."""
    pad = order + 4
    s = series_sqrt_one_minus_4z(pad)
    one = TruncatedSeries([1] + [0] * pad)
    z = TruncatedSeries([0, 1] + [0] * (pad - 1))
    num = z * (one.scale(2) - s.scale(2) - z.scale(4))
    den = (z.scale(4) - one + s) * (z.scale(4) - one + s) * s
    return TruncatedSeries((num / den).coeffs[: order + 1])


def _check_beta(z: float) -> None:
    if not 0.0 < z < 0.25:
        raise ParameterError(f"series argument must lie in (0, 1/4), got {z}")


def eval_D(z: float) -> float:
    """Closed-form value of D at a real point in [0, 1/4)."""
    if z == 0.0:
        return 0.0
    _check_beta(z)
    s = math.sqrt(1.0 - 4.0 * z)
    return 2.0 * z / (s * (1.0 + s))


def eval_C(z: float) -> float:
    """Closed-form value of C at a real point in [0, 1/4)."""
    if z == 0.0:
        return 0.0
    _check_beta(z)
    s = math.sqrt(1.0 - 4.0 * z)
    return z / s**3


def expected_plain_size(beta: float) -> float:
    """E(Y_beta) = C(beta)/D(beta) for the plain branch-size law."""
    _check_beta(beta)
    s = math.sqrt(1.0 - 4.0 * beta)
    return (1.0 + s) / (2.0 * s * s)


def expected_marked_size(beta: float) -> float:
    """E(X_beta) = beta*C'(beta)/C(beta) = 1 + 6*beta/(1-4*beta)."""
    _check_beta(beta)
    return 1.0 + 6.0 * beta / (1.0 - 4.0 * beta)


def solve_beta(c: float, tol: float = 1e-15) -> float:
    """The root of c*C(beta)/D(beta) = 1 in [0, 1/4), found by bisection.

    C/D is the mean branch size under the plain law; it increases from 1 at
    beta = 0 and diverges at 1/4, so a root exists for every c in (0, 1].
    At c = 1 the root is beta = 0 exactly.
    """
    if not 0.0 < c <= 1.0:
        raise ParameterError(f"c must lie in (0, 1], got {c}")
    if c == 1.0:
        return 0.0

    def residual(beta: float) -> float:
        return c * expected_plain_size(beta) - 1.0

    lo, hi = 0.0, 0.25 - 1e-17
    # expected_plain_size(0+) -> 1, so residual(0+) = c - 1 < 0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if residual(mid) >= 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo < tol * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def solve_beta_closed_form(c: float) -> float:
    """Closed-form root -c(c/4 + sqrt(c^2+8c)/4)/8 - c/8 + 1/4 of the same equation."""
    if not 0.0 < c <= 1.0:
        raise ParameterError(f"c must lie in (0, 1], got {c}")
    return -c * (c / 4.0 + math.sqrt(c * c + 8.0 * c) / 4.0) / 8.0 - c / 8.0 + 0.25


def solve_beta_finite_n(n: int, n_plain: int, tol: float = 1e-12) -> float:
    """Weight beta with E(X_beta) + n_plain * E(Y_beta) = n exactly.

    This is the finite-n version of the branch-weight equation: one marked
    branch plus ``n_plain`` plain branches must average to total size ``n``.
    Requires n > 1 + n_plain (the minimum possible expectation).
    """
    if n <= 1 + n_plain:
        raise ParameterError(f"need n > 1 + n_plain, got n={n}, n_plain={n_plain}")

    def mean(beta: float) -> float:
        return expected_marked_size(beta) + n_plain * expected_plain_size(beta)

    lo, hi = 1e-300, 0.25 - 1e-17
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mean(mid) >= n:
            hi = mid
        else:
            lo = mid
        if hi - lo < tol * max(hi, 1e-6):
            break
    return 0.5 * (lo + hi)


def _xlogx(x: float) -> float:
    """x*log(x) with the continuous extension 0 at x = 0."""
    if x < 0.0:
        raise ParameterError(f"negative argument {x} in rate function")
    return 0.0 if x == 0.0 else x * math.log(x)


def rate_function(u: float, y: float) -> float:
    """The exponential rate f(u, y) of the bad-cut event at volume fraction u.

    ``u`` is the subset volume divided by the edge count, ``y`` the matched
    boundary fraction on the same scale; the admissible block is
    0 < u <= 1, 0 <= y < u.  All x**x factors use the 0**0 = 1 convention.
    Written as a sum of x*log(x) terms; the tests expand the literal product
    form and both must agree.
    """
    if not 0.0 < u <= 1.0:
        raise ParameterError(f"u must lie in (0, 1], got {u}")
    if not 0.0 <= y < u:
        raise ParameterError(f"y must lie in [0, u), got {y}")
    return (
        -math.log(2.0) / 3.0
        + (2.0 / 3.0) * (_xlogx(u) + _xlogx(2.0 - u))
        - _xlogx(y)
        - 0.5 * _xlogx(u - y)
        - 0.5 * _xlogx(2.0 - u - y)
    )


def sup_rate_over_block(eta: float, y_cap: float, u_step: float = 1e-3) -> float:
    """sup of f(u, y) over u in [eta, 1], y in [0, y_cap].

    For fixed u the function is unimodal in y (its y-derivative is strictly
    decreasing), with maximiser y* = u - u^2/2, so the supremum over the
    interval is attained at min(y_cap, y*).  Over u we scan a fixed grid.
    """
    best = -math.inf
    steps = max(1, round((1.0 - eta) / u_step))
    for i in range(steps + 1):
        u = min(1.0, eta + i * u_step)
        y = min(y_cap, u - 0.5 * u * u)
        val = rate_function(u, y)
        if val > best:
            best = val
    return best


@dataclass(frozen=True)
class ConstantPipeline:
    """All derived constants for one (theta, epsilon, eta) input triple."""

    theta: float
    epsilon: float
    eta: float
    beta_star: float
    A: float
    B: float
    r: float
    W: float
    c: float
    delta: float
    M: int
    kappa: float

    def as_dict(self) -> dict[str, float | int]:
        return {
            "theta": self.theta,
            "epsilon": self.epsilon,
            "eta": self.eta,
            "beta_star": self.beta_star,
            "A": self.A,
            "B": self.B,
            "r": self.r,
            "W": self.W,
            "c": self.c,
            "delta": self.delta,
            "M": self.M,
            "kappa": self.kappa,
        }


def derive_constants(
    theta: float,
    epsilon: float,
    eta: float = 0.05,
    delta_step: float = 1e-3,
) -> ConstantPipeline:
    """Run the full constant pipeline for genus rate theta and slack epsilon.

    Order of derivation: beta* from the branch-weight equation at c = theta;
    A the geometric mean of 1 and 1/(4 beta*) so that A*beta* stays below the
    singularity; B = (1+A)/2 and r = B/A; W the tail constant D(A beta*)/(A beta*);
    c = -f(eta, 0)/2; delta the largest grid value whose bad-cut block keeps
    sup f below -c; M the smallest integer killing the branch-tail factor up
    to the epsilon budget; kappa = delta/(2M - 1).
    """
    if not 0.0 < theta < 0.5:
        raise ParameterError(f"theta must lie in (0, 1/2), got {theta}")
    if not 0.0 < epsilon < 1.0:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0.0 < eta < 1.0:
        raise ParameterError(f"eta must lie in (0, 1), got {eta}")

    beta_star = solve_beta(theta)
    A = 2.0 if beta_star < 1e-12 else math.sqrt(1.0 / (4.0 * beta_star))
    B = (1.0 + A) / 2.0
    r = B / A
    W = eval_D(A * beta_star) / (A * beta_star)
    c = -rate_function(eta, 0.0) / 2.0

    # Largest delta on the grid keeping the whole block below -c; the
    # feasible set is downward closed so a binary search over the grid index
    # finds its top.  The y-interval [0, eta*delta) is open; by continuity
    # its supremum equals the closed-interval supremum used here.
    n_grid = round(1.0 / delta_step) - 1
    lo_idx, hi_idx = 0, n_grid + 1

    def feasible(idx: int) -> bool:
        delta_cand = idx * delta_step
        return sup_rate_over_block(eta, eta * delta_cand) < -c

    if not feasible(1):
        raise InfeasibleConstantsError(
            f"no feasible delta at eta={eta}: even the smallest grid value fails"
        )
    while hi_idx - lo_idx > 1:
        mid = (lo_idx + hi_idx) // 2
        if feasible(mid):
            lo_idx = mid
        else:
            hi_idx = mid
    if lo_idx == 0:
        raise InfeasibleConstantsError(f"no feasible delta at eta={eta}")
    delta = lo_idx * delta_step

    budget = (epsilon / 2.0) * math.log(B)
    M = 1
    while math.log(1.0 + W * r**M / (1.0 - r)) > budget:
        M += 1
        if M > 10**7:
            raise InfeasibleConstantsError("M search did not terminate")
    kappa = delta / (2 * M - 1)

    return ConstantPipeline(
        theta=theta,
        epsilon=epsilon,
        eta=eta,
        beta_star=beta_star,
        A=A,
        B=B,
        r=r,
        W=W,
        c=c,
        delta=delta,
        M=M,
        kappa=kappa,
    )


def tail_bound(beta_star: float, A: float, k: int) -> float:
    """Geometric tail bound W/A^k for P(Y_beta >= k), valid for beta <= beta*.

    ``A`` must exceed 1 with A*beta* still inside the disc of convergence;
    W = D(A beta*)/(A beta*) is the usual exponential-moment constant.
    """
    if A <= 1.0:
        raise ParameterError(f"A must exceed 1, got {A}")
    if not 0.0 < A * beta_star < 0.25:
        raise ParameterError(f"A*beta* = {A * beta_star} outside (0, 1/4)")
    if k < 0:
        raise ParameterError(f"k must be nonnegative, got {k}")
    W = eval_D(A * beta_star) / (A * beta_star)
    return W / A**k


def probability_total_size(n: int, n_plain: int, beta: float) -> float:
    """P(X + Y_1 + ... + Y_{n_plain} = n) under the branch-size laws at beta.

    Computed by exact coefficient convolution of C * D^{n_plain} and the
    closed-form normalisers; used for the depoissonisation check that the
    point mass at the conditioning event has order 1/sqrt(n).
    """
    _check_beta(beta)
    if n < 1 + n_plain:
        return 0.0
    coeff = Fraction((series_C(n) * series_D(n).pow(n_plain))[n])
    # math.log handles arbitrary-size ints, unlike float(coeff)
    log_p = (
        math.log(coeff.numerator)
        - math.log(coeff.denominator)
        + n * math.log(beta)
        - math.log(eval_C(beta))
        - n_plain * math.log(eval_D(beta))
    )
    return math.exp(log_p)
