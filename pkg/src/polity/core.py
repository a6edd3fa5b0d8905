"""Validated matrix types and the small linear-algebra toolkit shared by
every other module.

Person indices are 0-based inside the library. File formats, CLI flags and
JSON reports use 1-based indices; conversion happens only at that boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadIndexSet,
    NegativeEntry,
    NonFinite,
    NonPositiveEntry,
    NonPositiveWeight,
    NonSquare,
    NotSubstochastic,
    RowSumViolation,
)

ROW_TOL = 1e-9
SUB_TOL = 1e-12
RANK_TOL = 1e-10
EXACT_ZERO_TOL = 1e-14


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PoliticsMatrix:
    """Strictly positive row-stochastic matrix; ``entries[i, j]`` is the
    probability that person ``i`` listens to person ``j``."""

    entries: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True)
class DominatedMatrix:
    """Nonnegative row-stochastic matrix. Zeros are structural: the family
    topology is read off its sign pattern."""

    entries: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True)
class SubmatrixBlock:
    rows: tuple
    cols: tuple
    entries: np.ndarray = field(repr=False)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True)
class CenteredMatrix:
    """``A - I``; rows sum to zero and off-diagonal entries are nonnegative."""

    entries: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def index_set(items: Iterable[int], n: int | None = None) -> tuple:
    """Normalize ``items`` into a sorted, duplicate-free tuple of ints,
    checking the range when ``n`` is known."""
    items = list(items)
    out = tuple(sorted(set(int(i) for i in items)))
    if len(out) != len(items):
        raise BadIndexSet(f"duplicate indices in {items}")
    if n is not None and out and (out[0] < 0 or out[-1] >= n):
        raise BadIndexSet(f"indices {[i + 1 for i in out]} out of range 1..{n}")
    return out


def complement(items: Iterable[int], n: int) -> tuple:
    s = set(items)
    return tuple(i for i in range(n) if i not in s)


@dataclass(frozen=True)
class IndexPartition:
    """Voters ``I`` and candidates ``J`` of an election; disjoint, nonempty."""

    voters: tuple
    candidates: tuple
    n: int

    def __post_init__(self):
        voters = index_set(self.voters, self.n)
        candidates = index_set(self.candidates, self.n)
        if not voters or not candidates:
            raise BadIndexSet("voter and candidate sets must both be nonempty")
        overlap = set(voters) & set(candidates)
        if overlap:
            raise BadIndexSet(
                f"persons {sorted(i + 1 for i in overlap)} are both voter and candidate"
            )
        object.__setattr__(self, "voters", voters)
        object.__setattr__(self, "candidates", candidates)

    @classmethod
    def elect(cls, candidates: Iterable[int], n: int) -> "IndexPartition":
        """Everybody who is not a candidate votes."""
        candidates = index_set(candidates, n)
        return cls(complement(candidates, n), candidates, n)

    @property
    def is_complete(self) -> bool:
        return len(self.voters) + len(self.candidates) == self.n


def _check_finite(a: np.ndarray) -> None:
    if not np.all(np.isfinite(a)):
        bad = np.argwhere(~np.isfinite(a))[0]
        raise NonFinite(f"non-finite entry at {tuple(int(k) + 1 for k in bad)}")


def _check_rows(a: np.ndarray, tol: float) -> np.ndarray:
    sums = a.sum(axis=1)
    dev = sums - 1.0
    worst = int(np.argmax(np.abs(dev)))
    if abs(dev[worst]) > tol:
        raise RowSumViolation(worst, float(dev[worst]))
    return sums


def validate(raw, kind: str = "politics", *, rows=None, cols=None):
    """Check ``raw`` against the invariants of ``kind`` and return the typed
    value.

    ``kind`` is one of ``"politics"`` (entries > 0, rows sum to 1),
    ``"dominated"`` (entries >= 0, rows sum to 1) or ``"submatrix"``
    (entries >= 0, every row sum below ``1 - SUB_TOL``; may be rectangular).
    Stochastic rows are renormalized after passing the ``ROW_TOL`` check.
    """
    a = np.array(raw, dtype=float)
    if a.ndim != 2:
        raise NonSquare(f"expected a 2-d matrix, got shape {a.shape}")
    _check_finite(a)

    if kind == "submatrix":
        neg = np.argwhere(a < 0)
        if len(neg):
            i, j = neg[0]
            raise NegativeEntry(int(i), int(j), float(a[i, j]))
        sums = a.sum(axis=1)
        if len(sums):
            worst = int(np.argmax(sums))
            if sums[worst] >= 1.0 - SUB_TOL:
                raise NotSubstochastic(
                    worst,
                    float(sums[worst] - 1.0),
                    f"row {worst + 1} sums to {sums[worst]!r}; submatrix rows must sum below 1",
                )
        r = tuple(range(a.shape[0])) if rows is None else tuple(rows)
        c = tuple(range(a.shape[1])) if cols is None else tuple(cols)
        return SubmatrixBlock(r, c, _frozen(a))

    if a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise NonSquare(f"expected a nonempty square matrix, got shape {a.shape}")

    if kind == "politics":
        bad = np.argwhere(a <= 0)
        if len(bad):
            i, j = bad[0]
            raise NonPositiveEntry(int(i), int(j), float(a[i, j]))
        sums = _check_rows(a, ROW_TOL)
        return PoliticsMatrix(_frozen(a / sums[:, None]))

    if kind == "dominated":
        a[np.abs(a) < EXACT_ZERO_TOL] = 0.0
        neg = np.argwhere(a < 0)
        if len(neg):
            i, j = neg[0]
            raise NegativeEntry(int(i), int(j), float(a[i, j]))
        sums = _check_rows(a, ROW_TOL)
        return DominatedMatrix(_frozen(a / sums[:, None]))

    raise ValueError(f"unknown matrix kind {kind!r}")


def as_stochastic(m) -> np.ndarray:
    """Plain array view of a politics or dominated matrix (or raw array)."""
    return np.asarray(m, dtype=float)


def block(m, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    return a[np.ix_(list(rows), list(cols))]


def submatrix(m, rows: Sequence[int], cols: Sequence[int]) -> SubmatrixBlock:
    rows, cols = tuple(rows), tuple(cols)
    return SubmatrixBlock(rows, cols, _frozen(block(m, rows, cols)))


def centered(a: PoliticsMatrix | DominatedMatrix) -> CenteredMatrix:
    m = np.asarray(a, dtype=float)
    return CenteredMatrix(_frozen(m - np.eye(m.shape[0])))


def row_rescale(abar: CenteredMatrix, weights) -> CenteredMatrix:
    """Multiply row ``i`` of ``abar`` by ``weights[i]`` (all weights > 0)."""
    w = np.asarray(weights, dtype=float)
    if w.shape != (abar.n,):
        raise ValueError(f"expected {abar.n} weights, got shape {w.shape}")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise NonPositiveWeight(f"rescale weights must be positive, got {w.tolist()}")
    return CenteredMatrix(_frozen(abar.entries * w[:, None]))


# -- rank-revealing helpers ------------------------------------------------

def singular_values(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return np.zeros(0)
    return np.linalg.svd(m, compute_uv=False)


def _rank_from_sv(s: np.ndarray, tol: float) -> int:
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def numerical_rank(m, tol: float | None = None) -> int:
    """Rank via SVD, counting singular values above ``tol * s_max``
    (``tol`` defaults to the module-level ``RANK_TOL``)."""
    return _rank_from_sv(singular_values(m), RANK_TOL if tol is None else tol)


def is_singular(m, tol: float | None = None) -> bool:
    m = np.asarray(m, dtype=float)
    return numerical_rank(m, tol) < min(m.shape)


def kernels(m, tol: float | None = None):
    """Return ``(V, Ustar)``: orthonormal bases of the right kernel
    (columns of ``V``, ``m @ V = 0``) and left kernel (rows of ``Ustar``,
    ``Ustar @ m = 0``) of a square matrix."""
    m = np.asarray(m, dtype=float)
    u, s, vt = np.linalg.svd(m)
    r = _rank_from_sv(s, RANK_TOL if tol is None else tol)
    return vt[r:].T.copy(), u[:, r:].T.copy()


def left_kernel_vector(m) -> np.ndarray:
    """One unnormalized vector ``u`` with ``u @ m = 0``; the singular vector of
    the smallest singular value."""
    u, _, _ = np.linalg.svd(np.asarray(m, dtype=float))
    return u[:, -1].copy()
