"""The power vector: the positive left fixed point of a politics matrix.

Three routes are offered and are expected to agree: iterating ``x <- xA``,
the closed-form block solve pivoted on one person, and the common row of
``A^k`` for large ``k`` (repeated squaring).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PoliticsMatrix, block, complement
from .errors import NoConvergence, SingularBlock

DEFAULT_TOL = 1e-12
MAX_ITERS = 10**6


@dataclass(frozen=True)
class PowerVector:
    weights: np.ndarray
    iterations: int = 0

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.weights, dtype=dtype)

    def __len__(self):
        return len(self.weights)


@dataclass(frozen=True)
class ContractionBound:
    """Smallest entry of ``A`` and the guaranteed per-step shrink factor of
    the range of ``Au`` relative to ``u``."""

    eps_min: float
    factor: float

    def max_steps(self, tol: float, initial_range: float = 1.0) -> int | None:
        """Steps after which the range is guaranteed below ``tol``; ``None``
        when the factor is zero (a single step suffices)."""
        if self.factor <= 0.0:
            return None
        if initial_range <= tol:
            return 0
        return math.ceil(math.log(tol / initial_range) / math.log(self.factor))


def contraction_bound(a: PoliticsMatrix) -> ContractionBound:
    m = np.asarray(a)
    eps = float(m.min())
    return ContractionBound(eps, max(0.0, 1.0 - m.shape[0] * eps))


def value_range(u) -> float:
    u = np.asarray(u)
    return float(u.max() - u.min())


def power_iterative(a: PoliticsMatrix, tol: float = DEFAULT_TOL) -> PowerVector:
    """Iterate ``x <- xA`` from the uniform distribution until
    ``max|xA - x| <= tol``.

    Every component of ``x A^k`` is a weighted mean of one column of ``A^k``,
    whose range is at most ``factor**k``, so the step count is bounded in
    advance by the contraction factor.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = np.asarray(a)
    n = m.shape[0]
    bound = contraction_bound(a)
    steps = bound.max_steps(tol)
    limit = MAX_ITERS if steps is None else steps + 1

    x = np.full(n, 1.0 / n)
    for k in range(1, limit + 1):
        y = x @ m
        if np.max(np.abs(y - x)) <= tol:
            return PowerVector(y / y.sum(), k)
        x = y
    raise NoConvergence(
        f"power iteration did not reach tol={tol:g} in {limit} steps "
        f"(contraction factor {bound.factor:.6g})"
    )


def stationary_row(m: np.ndarray, pivot: int = 0) -> np.ndarray:
    """Left fixed point of a stochastic matrix, normalized to sum 1, by the
    block solve ``w_J = w_p A_pJ (I - A_JJ)^{-1}`` around ``pivot``.

    Requires ``I - A_JJ`` to be invertible, which holds for every politics
    matrix and for any irreducible stochastic block.
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if n == 1:
        return np.ones(1)
    rest = complement([pivot], n)
    lhs = np.eye(n - 1) - block(m, rest, rest)
    rhs = block(m, [pivot], rest)[0]
    try:
        tail = np.linalg.solve(lhs.T, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularBlock(f"I - A_JJ around pivot {pivot + 1} is singular") from exc
    if not np.all(np.isfinite(tail)):
        raise SingularBlock(f"I - A_JJ around pivot {pivot + 1} is singular")
    w = np.empty(n)
    w[pivot] = 1.0
    w[list(rest)] = tail
    return w / w.sum()


def power_explicit(a: PoliticsMatrix, pivot: int = 0) -> PowerVector:
    return PowerVector(stationary_row(np.asarray(a), pivot))


def power_rows_limit(a: PoliticsMatrix, tol: float = 1e-14, max_squarings: int = 64):
    """Square ``A`` until every column of ``A^k`` is constant to within
    ``tol``; returns ``(row, A^k)`` where ``row`` is the mean row."""
    p = np.asarray(a, dtype=float).copy()
    for _ in range(max_squarings + 1):
        if np.max(p.max(axis=0) - p.min(axis=0)) <= tol:
            row = p.mean(axis=0)
            return row / row.sum(), p
        p = p @ p
    raise NoConvergence(f"A^(2^{max_squarings}) still has column range above {tol:g}")


def iterate_limit(a: PoliticsMatrix, u, tol: float = DEFAULT_TOL) -> float:
    """Constant ``c`` with ``A^k u -> c * ones``; iterates ``u <- Au`` until
    the range is at most ``2 * tol`` and returns the midpoint."""
    m = np.asarray(a)
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError("u must be finite")
    r0 = value_range(u)
    steps = contraction_bound(a).max_steps(2 * tol, r0) if r0 > 0 else 0
    limit = MAX_ITERS if steps is None else steps + 1
    for _ in range(limit + 1):
        if value_range(u) <= 2 * tol:
            return float(0.5 * (u.max() + u.min()))
        u = m @ u
    raise NoConvergence(f"A^k u did not flatten to tol={tol:g} in {limit} steps")


def left_eigenvector(a) -> np.ndarray:
    """Unnormalized left eigenvector for eigenvalue 1, taken from a general
    eigensolver (so its sign and scale are arbitrary)."""
    m = np.asarray(a, dtype=float)
    vals, vecs = np.linalg.eig(m.T)
    k = int(np.argmin(np.abs(vals - 1.0)))
    return np.real(vecs[:, k])
