"""Closed-form recovery constants and sufficient-condition thresholds for
multi-weight l1 recovery.

All functions are pure and operate on plain floats / small tuples; they are
safe to call concurrently.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field


class TheoryDomainError(ValueError):
    """Raised when an input leaves the domain of a closed-form expression."""


_MAX_CORNER_SETS = 20


def _validate_unit(name, value):
    if not 0.0 <= value <= 1.0:
        raise TheoryDomainError(f"{name}={value} outside [0, 1]")


@dataclass(frozen=True)
class TheoryParams:
    """Parameters of a multi-weight recovery setup.

    ``weights[i]`` is the weight applied on the i-th support-estimate set,
    ``rhos[i]`` its size relative to the sparsity s, and ``alphas[i]`` the
    fraction of its indices that are actually in the true support.  Weights
    are sorted nonincreasing at construction (rhos/alphas permuted in
    lockstep); the theory assumes this ordering without loss of generality.
    """

    weights: tuple[float, ...]
    rhos: tuple[float, ...]
    alphas: tuple[float, ...]
    a: float = 3.0

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        rhos = tuple(float(r) for r in self.rhos)
        alphas = tuple(float(al) for al in self.alphas)
        if not (len(weights) == len(rhos) == len(alphas) >= 1):
            raise TheoryDomainError("weights, rhos, alphas must have equal length >= 1")
        for w in weights:
            _validate_unit("weight", w)
        for al in alphas:
            _validate_unit("alpha", al)
        for r in rhos:
            if r < 0:
                raise TheoryDomainError(f"rho={r} must be nonnegative")
        if self.a <= 1:
            raise TheoryDomainError(f"a={self.a} must exceed 1")
        if sum(r * (1 - al) for r, al in zip(rhos, alphas)) > self.a + 1e-12:
            raise TheoryDomainError("sum rho_i(1-alpha_i) exceeds a")
        order = sorted(range(len(weights)), key=lambda i: -weights[i])
        object.__setattr__(self, "weights", tuple(weights[i] for i in order))
        object.__setattr__(self, "rhos", tuple(rhos[i] for i in order))
        object.__setattr__(self, "alphas", tuple(alphas[i] for i in order))

    @property
    def n_sets(self):
        return len(self.weights)


@dataclass(frozen=True)
class BoundConstants:
    """Multiplicative constants of the recovery error bound."""

    c0: float
    c1: float
    delta_as: float
    delta_a1s: float
    kn: float = field(default=0.0)


def b_constant(w, rho, alpha):
    """Single-set recovery constant w + (1 - w) sqrt(1 + rho - 2 alpha rho)."""
    _validate_unit("w", w)
    _validate_unit("alpha", alpha)
    if rho < 0:
        raise TheoryDomainError(f"rho={rho} must be nonnegative")
    radicand = 1.0 + rho - 2.0 * alpha * rho
    if radicand < 0:
        raise TheoryDomainError(f"negative radicand {radicand}")
    return w + (1.0 - w) * math.sqrt(radicand)


def k_n(p: TheoryParams):
    """Multi-weight recovery constant.

    Three-term sum over the nonincreasing weights: the smallest weight, a
    (1 - w_1) term with the full tail radicand, and telescoping weight-gap
    terms with progressively shorter tails.  Reduces to :func:`b_constant`
    for a single set.
    """
    w, rho, alpha = p.weights, p.rhos, p.alphas
    n = p.n_sets

    def tail_radicand(j):
        # 1 + sum_{i=j..N} (rho_i - 2 alpha_i rho_i), 0-based j
        rad = 1.0 + sum(rho[i] - 2.0 * alpha[i] * rho[i] for i in range(j, n))
        if rad < -1e-15:
            raise TheoryDomainError(f"negative radicand {rad} at tail {j}")
        return max(rad, 0.0)

    total = w[n - 1] + (1.0 - w[0]) * math.sqrt(tail_radicand(0))
    for j in range(1, n):
        total += (w[j - 1] - w[j]) * math.sqrt(tail_radicand(j))
    return total


def gamma_constant(p: TheoryParams):
    """Competing multi-weight constant from the earlier literature.

    May be negative for N > 1; returned as-is.
    """
    w, rho, alpha = p.weights, p.rhos, p.alphas
    n = p.n_sets
    total = sum(w) - (n - 1)
    for i in range(n):
        rad = 1.0 + rho[i] - 2.0 * alpha[i] * rho[i]
        if rad < -1e-15:
            raise TheoryDomainError(f"negative radicand {rad} at set {i}")
        total += (1.0 - w[i]) * math.sqrt(max(rad, 0.0))
    return total


def delta_threshold(constant, a):
    """Sufficient RIP threshold (a - c^2) / (a + c^2).

    Pass b, K_N or gamma as ``constant``; a negative gamma enters squared.
    """
    if a <= 1:
        raise TheoryDomainError(f"a={a} must exceed 1")
    c2 = constant * constant
    return (a - c2) / (a + c2)


def rip_condition_holds(delta_as, delta_a1s, kn, a):
    """Whether delta_as + (a/K^2) delta_(a+1)s < a/K^2 - 1.

    ``kn == 0`` makes the condition vacuous (the error-bound denominator is
    positive whenever delta_(a+1)s < 1); returns True in that case.
    """
    if kn < 0:
        raise TheoryDomainError(f"kn={kn} must be nonnegative")
    if kn == 0.0:
        return delta_a1s < 1.0
    ratio = a / (kn * kn)
    return delta_as + ratio * delta_a1s < ratio - 1.0


def bound_constants(p: TheoryParams, delta_as, delta_a1s):
    """Error-bound constants for a parameter set and RIP pair.

    Fails when the shared denominator sqrt(1 - delta_(a+1)s)
    - (K_N / sqrt(a)) sqrt(1 + delta_as) is not positive, which is exactly
    the failure of the RIP condition.
    """
    kn = k_n(p)
    a = p.a
    denom = math.sqrt(1.0 - delta_a1s) - (kn / math.sqrt(a)) * math.sqrt(1.0 + delta_as)
    if denom <= 0:
        raise TheoryDomainError(f"RIP condition violated: denominator {denom} <= 0")
    c0 = 2.0 * (1.0 + kn / math.sqrt(a)) / denom
    c1 = (2.0 / math.sqrt(a)) * (math.sqrt(1.0 - delta_a1s) + math.sqrt(1.0 + delta_as)) / denom
    return BoundConstants(c0=c0, c1=c1, delta_as=delta_as, delta_a1s=delta_a1s, kn=kn)


def error_bound(p: TheoryParams, consts: BoundConstants, eps, s,
                tail_l1, off_estimate_tail_l1, per_set_tail_l1):
    """Evaluate the recovery error bound for concrete signal tail norms.

    ``tail_l1`` is ||x - x_s||_1, ``off_estimate_tail_l1`` the l1 norm of x
    on indices off both the true support and every estimate set, and
    ``per_set_tail_l1[i]`` the l1 norm of x on the i-th estimate set minus
    the true support.
    """
    if eps < 0:
        raise TheoryDomainError(f"eps={eps} must be nonnegative")
    if s < 1:
        raise TheoryDomainError(f"s={s} must be positive")
    w = p.weights
    omega = sum(w)
    if len(per_set_tail_l1) != p.n_sets:
        raise TheoryDomainError("one per-set tail norm required per estimate set")
    cross = sum((omega - w[i]) * per_set_tail_l1[i] for i in range(p.n_sets))
    tail_term = tail_l1 * omega + (1.0 - omega) * off_estimate_tail_l1 - cross
    return consts.c0 * eps + consts.c1 / math.sqrt(s) * tail_term


def optimize_weights(rhos, alphas, a=3.0):
    """Minimize K_N over weight assignments by corner enumeration.

    The minimum of K_N over the box [0, 1]^N sits at a corner, so each
    optimal weight is binary.  Enumeration runs in lexicographically
    descending order and keeps strict improvements only, so ties resolve
    to the largest (most conservative) weight vector.
    """
    n = len(rhos)
    if n != len(alphas):
        raise TheoryDomainError("rhos and alphas must have equal length")
    if n > _MAX_CORNER_SETS:
        raise TheoryDomainError(f"corner enumeration unsupported beyond N={_MAX_CORNER_SETS}")
    best_weights = None
    best_kn = math.inf
    for corner in itertools.product((1.0, 0.0), repeat=n):
        value = k_n(TheoryParams(weights=corner, rhos=rhos, alphas=alphas, a=a))
        if value < best_kn - 1e-15:
            best_kn = value
            best_weights = corner
    return best_weights, best_kn


def proposition_ordering(p: TheoryParams, tol=1e-12):
    """Whether delta^b(w_1) <= delta^{K_N} <= delta^b(w_N) for equal accuracies.

    Requires all alphas equal; the property suite asserts equivalence of the
    sandwich with alpha >= 1/2.
    """
    alpha = p.alphas[0]
    if any(abs(al - alpha) > 1e-12 for al in p.alphas):
        raise TheoryDomainError("proposition requires all alphas equal")
    rho = sum(p.rhos)
    a = p.a
    d_top = delta_threshold(b_constant(p.weights[0], rho, alpha), a)
    d_bot = delta_threshold(b_constant(p.weights[-1], rho, alpha), a)
    d_kn = delta_threshold(k_n(p), a)
    return d_top <= d_kn + tol and d_kn <= d_bot + tol
