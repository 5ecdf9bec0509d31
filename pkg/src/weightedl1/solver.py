"""First-order primal-dual solver for weighted basis pursuit denoising:

    minimize sum_i w_i |x_i|  subject to  ||A x - y||_2 <= eps.

Each iteration costs one forward and one adjoint operator application plus a
weighted soft threshold and a Euclidean ball projection.  Deterministic: no
randomness beyond the operator itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import MeasurementOperator, operator_norm


class SolverError(RuntimeError):
    pass


@dataclass
class RecoveryProblem:
    operator: MeasurementOperator
    y: np.ndarray
    epsilon: float
    weights: np.ndarray

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.y.shape != (self.operator.m,):
            raise SolverError(f"y has shape {self.y.shape}, expected ({self.operator.m},)")
        if self.weights.shape != (self.operator.n,):
            raise SolverError(f"weights shape {self.weights.shape}, expected ({self.operator.n},)")
        if self.epsilon < 0:
            raise SolverError("epsilon must be nonnegative")
        if self.weights.min() < 0 or self.weights.max() > 1:
            raise SolverError("weights must lie in [0, 1]")

    def objective(self, x):
        return float(np.sum(self.weights * np.abs(x)))


@dataclass
class SolverConfig:
    max_iter: int = 50_000
    step_tol: float = 1e-8
    feas_tol: float = 1e-6
    obj_tol: float = 1e-6
    check_every: int = 10


@dataclass
class SolverReport:
    solution: np.ndarray
    iterations: int
    primal_feasibility_gap: float
    objective: float
    converged: bool
    status: str = field(default="converged")


def weighted_shrink(v, thresholds):
    """Proximal map of the weighted l1 norm: per-entry soft threshold."""
    v = np.asarray(v, dtype=float)
    thresholds = np.asarray(thresholds, dtype=float)
    return np.sign(v) * np.maximum(np.abs(v) - thresholds, 0.0)


def project_ball(u, center, radius):
    """Euclidean projection onto the ball of given center and radius."""
    diff = np.asarray(u, dtype=float) - center
    dist = np.linalg.norm(diff)
    if dist <= radius:
        return np.asarray(u, dtype=float).copy()
    if dist == 0.0:
        return np.asarray(center, dtype=float).copy()
    return center + (radius / dist) * diff


def solve(problem: RecoveryProblem, config: SolverConfig | None = None,
          trace=None) -> SolverReport:
    """Run the primal-dual splitting to a feasible near-minimizer.

    ``trace``, if a list, receives (objective, feasibility_gap) pairs at
    every convergence check for diagnostic use.
    """
    config = config or SolverConfig()
    A = problem.operator
    y = problem.y
    eps = problem.epsilon

    norm_a = operator_norm(A) * 1.05  # safety margin keeps tau*sigma*||A||^2 < 1
    if norm_a == 0.0:
        norm_a = 1.0
    tau = 1.0 / norm_a
    sigma = 1.0 / norm_a
    shrink_thresholds = tau * problem.weights

    x = A.adjoint(y)
    x_bar = x.copy()
    q = np.zeros(A.m)
    y_scale = max(1.0, np.linalg.norm(y))

    converged = False
    status = "max_iter"
    iterations = config.max_iter
    gap_history = []
    for it in range(1, config.max_iter + 1):
        q_tilde = q + sigma * A.forward(x_bar)
        q = q_tilde - sigma * project_ball(q_tilde / sigma, y, eps)
        x_new = weighted_shrink(x - tau * A.adjoint(q), shrink_thresholds)
        step = np.linalg.norm(x_new - x)
        x_bar = 2.0 * x_new - x
        x = x_new

        if it % config.check_every == 0 or it == config.max_iter:
            gap = max(0.0, float(np.linalg.norm(A.forward(x) - y)) - eps)
            if trace is not None:
                trace.append((problem.objective(x), gap))
            small_step = step <= config.step_tol * max(1.0, float(np.linalg.norm(x)))
            feasible = gap <= config.feas_tol * y_scale
            if small_step and feasible:
                converged = True
                status = "converged"
                iterations = it
                break
            gap_history.append(gap)
            if len(gap_history) > 200:
                # infeasible-looking stall: tiny steps but no feasibility progress
                recent, older = gap_history[-1], gap_history[-100]
                if small_step and recent > config.feas_tol * y_scale and recent >= older * 0.999:
                    status = "stalled"
                    iterations = it
                    break

    gap = max(0.0, float(np.linalg.norm(A.forward(x) - y)) - eps)
    return SolverReport(
        solution=x,
        iterations=iterations,
        primal_feasibility_gap=gap,
        objective=problem.objective(x),
        converged=converged,
        status=status,
    )
