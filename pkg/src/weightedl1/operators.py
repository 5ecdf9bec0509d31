"""Measurement operators, orthonormal 2D DCT, and a brute-force restricted
isometry oracle for tiny instances.

Operators are immutable after construction and can be shared across
concurrent solves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.fft


class OperatorError(ValueError):
    pass


def dct2(image):
    """Orthonormal type-II 2D DCT; Parseval holds exactly."""
    return scipy.fft.dctn(image, norm="ortho")


def idct2(coefficients):
    """Inverse of :func:`dct2`."""
    return scipy.fft.idctn(coefficients, norm="ortho")


@dataclass(frozen=True)
class RipEstimate:
    s: int
    delta: float


class MeasurementOperator:
    """Linear map with matched forward/adjoint applications."""

    kind: str
    m: int
    n: int

    def forward(self, x):
        raise NotImplementedError

    def adjoint(self, y):
        raise NotImplementedError

    def to_dense(self):
        """Materialize the m x n matrix (tiny instances only)."""
        eye = np.eye(self.n)
        return np.column_stack([self.forward(eye[:, j]) for j in range(self.n)])


class DenseOperator(MeasurementOperator):
    kind = "dense"

    def __init__(self, matrix):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2:
            raise OperatorError("dense operator needs a 2D matrix")
        self.matrix = matrix
        self.m, self.n = matrix.shape

    def forward(self, x):
        return self.matrix @ x

    def adjoint(self, y):
        return self.matrix.T @ y

    def to_dense(self):
        return self.matrix.copy()


class RestrictedDCTOperator(MeasurementOperator):
    """A = R D^{-1}: maps 2D-DCT coefficients to randomly sampled pixels.

    The unknown is the coefficient vector; measurements are m pixel samples
    of the image whose DCT coefficients are the unknown.  The adjoint embeds
    samples at their pixel positions and applies the forward DCT.
    """

    kind = "restricted-transform"

    def __init__(self, rows, shape):
        h, w = shape
        self.shape = (int(h), int(w))
        self.n = int(h) * int(w)
        rows = np.asarray(rows, dtype=int)
        if rows.ndim != 1 or len(np.unique(rows)) != rows.size:
            raise OperatorError("restriction rows must be distinct")
        if rows.size > self.n or rows.min(initial=0) < 0 or rows.max(initial=0) >= self.n:
            raise OperatorError("restriction rows out of range")
        self.rows = rows
        self.m = rows.size

    def forward(self, c):
        pixels = idct2(np.asarray(c, dtype=float).reshape(self.shape))
        return pixels.ravel()[self.rows]

    def adjoint(self, y):
        embedded = np.zeros(self.n)
        embedded[self.rows] = y
        return dct2(embedded.reshape(self.shape)).ravel()


def gaussian_operator(m, n, seed):
    """i.i.d. N(0, 1/m) dense operator; columns have unit norm in expectation."""
    if not 0 < m <= n:
        raise OperatorError(f"need 0 < m <= n, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    return DenseOperator(rng.standard_normal((m, n)) / math.sqrt(m))


def restricted_dct_operator(m, shape, seed, rows=None):
    """Restriction-of-inverse-DCT operator on an h x w block.

    ``rows`` overrides the sampled pixel set; otherwise m distinct pixels
    are drawn uniformly without replacement from ``seed``.
    """
    h, w = shape
    n = h * w
    if not 0 < m <= n:
        raise OperatorError(f"need 0 < m <= n, got m={m}, n={n}")
    if rows is None:
        rng = np.random.default_rng(seed)
        rows = rng.choice(n, size=m, replace=False)
        rows.sort()
    return RestrictedDCTOperator(rows=rows, shape=shape)


def exhaustive_rip(operator, s, budget=10**6):
    """Exact restricted isometry constant by enumerating all column subsets.

    delta_s = max over size-s subsets of max(sigma_max^2 - 1, 1 - sigma_min^2)
    of the corresponding submatrix.  Only feasible for tiny instances.
    """
    n = operator.n
    count = math.comb(n, s)
    if count > budget:
        raise OperatorError(f"C({n},{s})={count} exceeds enumeration budget {budget}")
    dense = operator.to_dense()
    delta = 0.0
    for cols in combinations(range(n), s):
        sub = dense[:, cols]
        eigs = np.linalg.eigvalsh(sub.T @ sub)
        delta = max(delta, eigs[-1] - 1.0, 1.0 - eigs[0])
    return RipEstimate(s=s, delta=float(delta))


def operator_norm(operator, iterations=50, seed=0):
    """Spectral norm estimate by power iteration on A^T A."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(operator.n)
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(iterations):
        u = operator.adjoint(operator.forward(v))
        norm = np.linalg.norm(u)
        if norm == 0.0:
            return 0.0
        v = u / norm
        sigma = math.sqrt(norm)
    return sigma
