"""Support matrices: the probability that voter ``i`` ends up supporting
candidate ``j`` once candidates are selfish, ``D_IJ = (I - A_II)^{-1} A_IJ``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    EXACT_ZERO_TOL,
    DominatedMatrix,
    IndexPartition,
    PoliticsMatrix,
    SubmatrixBlock,
    block,
    is_singular,
    validate,
)
from .errors import SingularBlock, SingularVoterBlock, ValidationError
from .families import family_in_block

NEAR_SINGULAR_COND = 1e12
NEUMANN_MAX_TERMS = 10**6


@dataclass(frozen=True)
class SupportMatrix:
    partition: IndexPartition
    entries: np.ndarray
    condition: float = 1.0
    method: str = "direct"

    @property
    def near_singular(self) -> bool:
        return self.condition > NEAR_SINGULAR_COND

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def to_json(self) -> dict:
        return {
            "voters": [i + 1 for i in self.partition.voters],
            "candidates": [j + 1 for j in self.partition.candidates],
            "D": np.asarray(self.entries).tolist(),
            "condition": float(self.condition),
            "near_singular": self.near_singular,
            "method": self.method,
        }


def structural_support(m, voters, cands) -> np.ndarray:
    """Boolean mask of ``(i, j)`` pairs for which some listening path from
    voter ``i`` through voters reaches candidate ``j``; ``D_IJ`` vanishes
    exactly off this mask."""
    m = np.asarray(m, dtype=float)
    reach = np.eye(len(voters), dtype=bool) | (block(m, voters, voters) > EXACT_ZERO_TOL)
    while True:
        grown = reach | ((reach.astype(int) @ reach.astype(int)) > 0)
        if np.array_equal(grown, reach):
            break
        reach = grown
    return (reach.astype(int) @ (block(m, voters, cands) > EXACT_ZERO_TOL).astype(int)) > 0


def support_matrix(a: PoliticsMatrix | DominatedMatrix, partition: IndexPartition) -> SupportMatrix:
    """Dense solve of ``(I - A_II) D = A_IJ``.

    For a dominated matrix a singular voter block means a family lives
    inside the voters; the raised :class:`SingularVoterBlock` names it.
    """
    m = np.asarray(a, dtype=float)
    voters, cands = partition.voters, partition.candidates
    lhs = np.eye(len(voters)) - block(m, voters, voters)
    if is_singular(lhs):
        family = family_in_block(m, voters)
        if family is not None:
            raise SingularVoterBlock(family)
        raise SingularBlock("I - A_II is numerically singular")
    d = np.linalg.solve(lhs, block(m, voters, cands))
    if isinstance(a, DominatedMatrix):
        d[~structural_support(m, voters, cands)] = 0.0
    return SupportMatrix(partition, d, float(np.linalg.cond(lhs)))


def neumann_inverse(mat, tol: float = 1e-12) -> np.ndarray:
    """``(I - M)^{-1}`` as the partial sums of ``sum_k M^k``.

    Summation stops once the guaranteed tail ``|M^l 1| r/(1-r)`` (``r`` the
    largest row sum of ``M``) drops below ``tol``, so every entry of the
    result is within ``tol`` of the exact inverse.
    """
    if isinstance(mat, SubmatrixBlock):
        m = np.asarray(mat.entries)
    else:
        m = np.asarray(validate(mat, "submatrix").entries)
    k = m.shape[0]
    if m.shape != (k, k):
        raise ValidationError(f"Neumann series needs a square block, got {m.shape}")
    r = float(m.sum(axis=1).max()) if k else 0.0
    tail_factor = max(1.0, r / (1.0 - r))
    total = np.eye(k)
    term = np.eye(k)
    for _ in range(NEUMANN_MAX_TERMS):
        term = term @ m
        total += term
        if term.sum(axis=1).max(initial=0.0) * tail_factor < tol:
            return total
    raise SingularBlock("Neumann series did not converge")


def neumann_support(a, partition: IndexPartition, tol: float = 1e-12) -> SupportMatrix:
    """Series-based twin of :func:`support_matrix`, kept as its oracle."""
    m = np.asarray(a, dtype=float)
    voters, cands = partition.voters, partition.candidates
    inv = neumann_inverse(block(m, voters, voters), tol)
    return SupportMatrix(partition, inv @ block(m, voters, cands), method="neumann")


def support_from_centered(abar, partition: IndexPartition) -> SupportMatrix:
    """``D_IJ = -Abar_II^{-1} Abar_IJ`` for any row-rescaled centered matrix."""
    m = np.asarray(getattr(abar, "entries", abar), dtype=float)
    voters, cands = partition.voters, partition.candidates
    lhs = block(m, voters, voters)
    if is_singular(lhs):
        raise SingularBlock("centered voter block is singular")
    return SupportMatrix(partition, -np.linalg.solve(lhs, block(m, voters, cands)),
                         float(np.linalg.cond(lhs)))


def garden_support(b, partition: IndexPartition, tol: float = 1e-12) -> SupportMatrix:
    """Support matrix of the near-identity society ``I + eps B``; the scale
    ``eps`` cancels, leaving ``-B_II^{-1} B_IJ``."""
    m = np.asarray(b, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"B must be square, got shape {m.shape}")
    rows = np.abs(m.sum(axis=1))
    if rows.max() > tol * max(1.0, np.abs(m).max()):
        raise ValidationError(f"B rows must sum to 0 (worst row {int(rows.argmax()) + 1})")
    off = m - np.diag(np.diag(m))
    if np.any(off < 0):
        raise ValidationError("off-diagonal entries of B must be nonnegative")
    lhs = block(m, partition.voters, partition.voters)
    if is_singular(lhs):
        raise SingularBlock("B_II is singular")
    d = -np.linalg.solve(lhs, block(m, partition.voters, partition.candidates))
    return SupportMatrix(partition, d, float(np.linalg.cond(lhs)), method="garden")
