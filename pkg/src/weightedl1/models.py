"""Synthetic signal generation, support-estimate construction, and prior
probability models (power-law, binary tree) with the probability-to-weight
map used in the experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ModelError(ValueError):
    pass


PROBABILITY_CUTOFF = 0.025  # probabilities strictly below this are zeroed


def _round_half_up(x):
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class SparseSignal:
    values: np.ndarray
    support: np.ndarray

    @property
    def n(self):
        return self.values.size

    @property
    def s(self):
        return self.support.size


@dataclass(frozen=True)
class WeightedPrior:
    """Disjoint support-estimate sets with one weight per set.

    ``weight_vector`` expands to an n-vector: w_i on the i-th set, 1 off
    every set.
    """

    sets: tuple
    weights: tuple
    n: int
    rhos: tuple = field(default=())
    alphas: tuple = field(default=())

    def __post_init__(self):
        if len(self.sets) != len(self.weights):
            raise ModelError("one weight per estimate set required")
        seen = set()
        for t in self.sets:
            idx = set(int(i) for i in t)
            if idx & seen:
                raise ModelError("support-estimate sets must be disjoint")
            if idx and (min(idx) < 0 or max(idx) >= self.n):
                raise ModelError("estimate indices out of range")
            seen |= idx

    def weight_vector(self):
        w = np.ones(self.n)
        for t, wi in zip(self.sets, self.weights):
            w[np.asarray(t, dtype=int)] = wi
        return w

    def measured(self, signal: SparseSignal):
        """Realized (rho_i, alpha_i) against a ground-truth signal."""
        t0 = set(int(i) for i in signal.support)
        rhos, alphas = [], []
        for t in self.sets:
            size = len(t)
            rhos.append(size / signal.s if signal.s else 0.0)
            alphas.append(sum(1 for i in t if int(i) in t0) / size if size else 0.0)
        return tuple(rhos), tuple(alphas)


def gen_sparse_signal(n, s, seed):
    """Exactly s-sparse signal: uniform random support, standard normal values."""
    if s > n:
        raise ModelError(f"s={s} exceeds n={n}")
    rng = np.random.default_rng(seed)
    values = np.zeros(n)
    support = rng.choice(n, size=s, replace=False) if s else np.empty(0, dtype=int)
    support.sort()
    values[support] = rng.standard_normal(s)
    return SparseSignal(values=values, support=support)


def gen_support_estimates(signal: SparseSignal, rhos, alphas, weights, seed):
    """Disjoint estimate sets with prescribed relative sizes and accuracies.

    Set i gets round(alpha_i rho_i s) indices from still-unclaimed true
    support and the remainder of round(rho_i s) from unclaimed off-support
    indices (round-half-up).
    """
    if not len(rhos) == len(alphas) == len(weights):
        raise ModelError("rhos, alphas, weights must have equal length")
    rng = np.random.default_rng(seed)
    s, n = signal.s, signal.n
    true_pool = list(int(i) for i in signal.support)
    false_pool = list(sorted(set(range(n)) - set(true_pool)))
    sets = []
    for rho, alpha in zip(rhos, alphas):
        size = _round_half_up(rho * s)
        n_true = _round_half_up(alpha * rho * s)
        n_false = size - n_true
        if n_true > len(true_pool) or n_false > len(false_pool):
            raise ModelError(f"infeasible (rho={rho}, alpha={alpha}): pools exhausted")
        chosen_true = rng.choice(len(true_pool), size=n_true, replace=False) if n_true else []
        chosen_false = rng.choice(len(false_pool), size=n_false, replace=False) if n_false else []
        picked = sorted([true_pool[i] for i in chosen_true] + [false_pool[i] for i in chosen_false])
        for i in sorted(chosen_true, reverse=True):
            true_pool.pop(i)
        for i in sorted(chosen_false, reverse=True):
            false_pool.pop(i)
        sets.append(tuple(picked))
    return WeightedPrior(sets=tuple(sets), weights=tuple(float(w) for w in weights),
                         n=n, rhos=tuple(rhos), alphas=tuple(alphas))


def prob_to_weight(p):
    """Exponential probability-to-weight map; 1 at p=0, 0 at p=1."""
    p = np.asarray(p, dtype=float)
    if np.any(p < 0) or np.any(p > 1):
        raise ModelError("probabilities must lie in [0, 1]")
    scale = math.exp(-5.0)
    out = (np.exp(-5.0 * p) - scale) / (1.0 - scale)
    return float(out) if out.ndim == 0 else out


def power_law_prior(n):
    """P_i = 1/i (1-based), zeroed strictly below the 0.025 cutoff."""
    if n < 1:
        raise ModelError("n must be positive")
    p = 1.0 / np.arange(1, n + 1)
    p[p < PROBABILITY_CUTOFF] = 0.0
    return p


def draw_bernoulli_support(probabilities, rng):
    """Support draw with independent per-index inclusion probabilities."""
    mask = rng.random(probabilities.size) < probabilities
    return np.flatnonzero(mask)


def tree_children(index, n):
    """Children of a node in the breadth-first binary-tree layout.

    Index 0 is the top node with a single child (index 1); every later
    index j has children 2j and 2j+1.
    """
    if index == 0:
        kids = [1]
    else:
        kids = [2 * index, 2 * index + 1]
    return [k for k in kids if k < n]


def draw_tree_support(n, s, rng):
    """Tree-sparse support: take the top index, then s-1 rounds each adding a
    uniformly random unselected index whose parent is already selected."""
    if s > n:
        raise ModelError(f"s={s} exceeds n={n}")
    if s == 0:
        return np.empty(0, dtype=int)
    selected = [0]
    frontier = list(tree_children(0, n))
    for _ in range(s - 1):
        if not frontier:
            break
        pick = int(rng.integers(len(frontier)))
        node = frontier.pop(pick)
        selected.append(node)
        frontier.extend(tree_children(node, n))
    return np.array(sorted(selected), dtype=int)


def tree_prior(n, s, trials=10_000, seed=0, truncate=True):
    """Empirical per-index selection probabilities of the tree-sparse model,
    zeroed strictly below the 0.025 cutoff unless ``truncate`` is False.
    Raw (pre-truncation) probabilities sum to s exactly."""
    rng = np.random.default_rng(seed)
    counts = np.zeros(n)
    for _ in range(trials):
        counts[draw_tree_support(n, s, rng)] += 1.0
    p = counts / trials
    if truncate:
        p[p < PROBABILITY_CUTOFF] = 0.0
    return p


def save_prior(path, probabilities):
    """Two-column text format: index, probability."""
    with open(path, "w") as fh:
        for i, p in enumerate(probabilities):
            fh.write(f"{i} {p:.12g}\n")


def load_prior(path):
    indices, probs = [], []
    with open(path) as fh:
        for line in fh:
            i, p = line.split()
            indices.append(int(i))
            probs.append(float(p))
    out = np.zeros(max(indices) + 1)
    out[np.array(indices)] = probs
    return out
