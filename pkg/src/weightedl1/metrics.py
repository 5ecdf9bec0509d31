"""Error metrics, PSNR, the cone-constraint residual used as an executable
check on solver output, and the end-to-end theorem bound check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import theory
from .models import SparseSignal, WeightedPrior


class MetricError(ValueError):
    pass


def relative_error(x, xhat):
    x = np.asarray(x, dtype=float)
    denom = np.linalg.norm(x)
    if denom == 0.0:
        raise MetricError("relative error undefined for a zero true signal")
    return float(np.linalg.norm(x - np.asarray(xhat, dtype=float)) / denom)


def psnr(x, xhat, pixel_count):
    """Peak signal-to-noise ratio in dB for 8-bit imagery; +inf when exact."""
    err = float(np.sum((np.asarray(x, dtype=float) - np.asarray(xhat, dtype=float)) ** 2))
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(pixel_count * 255.0 ** 2 / err)


def _l1(v, idx):
    return float(np.sum(np.abs(v[idx]))) if len(idx) else 0.0


@dataclass(frozen=True)
class ConeConstraintContext:
    """Everything needed to evaluate the cone constraint on a recovery error.

    ``h`` is xhat - x; sets and weights come ordered nonincreasing in weight.
    ``omega`` is the weight sum and ``d`` the signal-tail constant of the
    constraint.
    """

    h: np.ndarray
    t0: np.ndarray
    sets: tuple
    weights: tuple
    omega: float
    d: float

    @classmethod
    def from_instance(cls, x, xhat, prior: WeightedPrior, t0):
        order = sorted(range(len(prior.weights)), key=lambda i: -prior.weights[i])
        sets = tuple(np.asarray(prior.sets[i], dtype=int) for i in order)
        weights = tuple(float(prior.weights[i]) for i in order)
        x = np.asarray(x, dtype=float)
        t0 = np.asarray(t0, dtype=int)
        n = x.size
        t0_mask = np.zeros(n, dtype=bool)
        t0_mask[t0] = True
        union_mask = np.zeros(n, dtype=bool)
        for t in sets:
            union_mask[t] = True
        omega = sum(weights)
        t0c = np.flatnonzero(~t0_mask)
        off_both = np.flatnonzero(~t0_mask & ~union_mask)
        d = omega * _l1(x, t0c) + (1.0 - omega) * _l1(x, off_both)
        for t, w in zip(sets, weights):
            ti_off = t[~t0_mask[t]]
            d -= (omega - w) * _l1(x, ti_off)
        return cls(h=np.asarray(xhat, dtype=float) - x, t0=t0, sets=sets,
                   weights=weights, omega=omega, d=d)


def cone_residual(ctx: ConeConstraintContext):
    """RHS minus LHS of the cone constraint; nonnegative (to solver
    tolerance) for any minimizer of the weighted program.

    The j-th tail set is (T0 union the estimate sets from j on) minus the
    correctly-estimated indices of those sets, with the set difference
    binding last.
    """
    h = ctx.h
    n = h.size
    t0_mask = np.zeros(n, dtype=bool)
    t0_mask[ctx.t0] = True
    nsets = len(ctx.sets)

    def tail_set_l1(j):
        mask = t0_mask.copy()
        removed = np.zeros(n, dtype=bool)
        for t in ctx.sets[j:]:
            mask[t] = True
            removed[t[t0_mask[t]]] = True
        return _l1(h, np.flatnonzero(mask & ~removed))

    w = ctx.weights
    rhs = w[-1] * _l1(h, np.flatnonzero(t0_mask)) + (1.0 - w[0]) * tail_set_l1(0)
    for j in range(1, nsets):
        rhs += (w[j - 1] - w[j]) * tail_set_l1(j)
    rhs += 2.0 * ctx.d
    lhs = _l1(h, np.flatnonzero(~t0_mask))
    return rhs - lhs


@dataclass(frozen=True)
class TheoremCheck:
    holds: bool
    bound: float
    actual: float
    skipped: bool = False


def theorem_bound_check(signal: SparseSignal, xhat, prior: WeightedPrior,
                        eps, a, delta_as, delta_a1s, tol=1e-6):
    """Evaluate the recovery bound on a concrete instance.

    Returns skipped=True (not a failure) when the RIP condition does not
    hold for the supplied constants.  ``tol`` absorbs first-order solver
    error when the bound itself is 0 (exact recovery regime).
    """
    rhos, alphas = prior.measured(signal)
    params = theory.TheoryParams(weights=prior.weights, rhos=rhos, alphas=alphas, a=a)
    kn = theory.k_n(params)
    if not theory.rip_condition_holds(delta_as, delta_a1s, kn, a):
        return TheoremCheck(holds=False, bound=math.nan, actual=math.nan, skipped=True)
    consts = theory.bound_constants(params, delta_as, delta_a1s)

    x = signal.values
    n = x.size
    s = signal.s
    t0_mask = np.zeros(n, dtype=bool)
    t0_mask[signal.support] = True
    union_mask = np.zeros(n, dtype=bool)
    for t in prior.sets:
        union_mask[np.asarray(t, dtype=int)] = True
    tail_l1 = _l1(x, np.flatnonzero(~t0_mask))
    off_tail = _l1(x, np.flatnonzero(~t0_mask & ~union_mask))
    # per-set tails in the sorted order TheoryParams enforces
    order = sorted(range(len(prior.weights)), key=lambda i: -prior.weights[i])
    per_set = []
    for i in order:
        t = np.asarray(prior.sets[i], dtype=int)
        per_set.append(_l1(x, t[~t0_mask[t]]))
    bound = theory.error_bound(params, consts, eps, s, tail_l1, off_tail, per_set)
    actual = float(np.linalg.norm(np.asarray(xhat, dtype=float) - x))
    return TheoremCheck(holds=actual <= bound + tol, bound=bound, actual=actual)
