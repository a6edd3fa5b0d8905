"""Small-``eps`` analysis of ``A = A_hat + eps * B``.

``A_hat`` is a dominated matrix carrying the family structure, ``B`` has
zero row sums and is positive wherever ``A_hat`` has a structural zero.
This module computes the limit power and its first-order correction, the
two leading terms of the inverse of a singular matrix under perturbation,
and the limit support matrix with its family consensus.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import core
from .core import (
    DominatedMatrix,
    IndexPartition,
    block,
    complement,
    index_set,
    is_singular,
    kernels,
    numerical_rank,
    singular_values,
    validate,
)
from .election import SupportMatrix, structural_support
from .errors import (
    AmbiguousMixing,
    BadIndexSet,
    FullRank,
    InvalidAtEps,
    NotUpperClass,
    OmegaSingular,
    SingularBlock,
    ThresholdTooLarge,
    ValidationError,
)
from .families import upper_class_families
from .power import stationary_row

DEFAULT_ORACLE_EPS = (1e-3, 1e-4, 1e-5)


@dataclass(frozen=True)
class Decomposition:
    dominated: DominatedMatrix
    scale: float
    correction: np.ndarray = field(repr=False)

    def reconstruct(self, eps: float | None = None) -> np.ndarray:
        eps = self.scale if eps is None else eps
        return np.asarray(self.dominated) + eps * self.correction


def decompose(a, threshold: float) -> Decomposition:
    """Split ``a`` into ``A_hat + eps * B``.

    In each row, entries at or below ``threshold`` are dropped from
    ``A_hat`` and the removed mass is spread over the surviving entries in
    proportion to their size. ``eps`` is the largest mass removed from any
    row and ``B = (A - A_hat) / eps``. When nothing is removed, ``B = 0``
    and ``eps = n * threshold``.
    """
    m = np.asarray(a, dtype=float)
    n = m.shape[0]
    if not threshold > 0:
        raise ValidationError(f"threshold must be positive, got {threshold!r}")
    keep = m > threshold
    empty = np.flatnonzero(~keep.any(axis=1))
    if empty.size:
        raise ThresholdTooLarge(
            f"threshold {threshold:g} removes every entry of row {int(empty[0]) + 1}"
        )
    kept = np.where(keep, m, 0.0)
    a_hat = kept / kept.sum(axis=1, keepdims=True)
    removed = np.where(keep, 0.0, m).sum(axis=1)
    eps = float(removed.max())
    if eps == 0.0:
        return Decomposition(validate(a_hat, "dominated"), n * threshold, np.zeros((n, n)))
    return Decomposition(validate(a_hat, "dominated"), eps, (m - a_hat) / eps)


@dataclass(frozen=True)
class DominatedPower:
    """Limit power ``omega_hat`` and first-order correction ``sigma``:
    ``omega(eps) = omega_hat + eps * sigma + O(eps^2)``."""

    omega_hat: np.ndarray
    sigma: np.ndarray
    upper_class: tuple
    stationaries: np.ndarray = field(repr=False)
    mixing: np.ndarray = field(repr=False)
    coupling: np.ndarray = field(repr=False)

    @property
    def kernel_dim(self) -> int:
        """Dimension of the solution set of the first-order equation
        ``sigma (I - A_hat) = omega_hat B`` with ``sigma . 1 = 0``; the
        second-order solvability condition picks one member."""
        return len(self.upper_class) - 1

    def to_json(self) -> dict:
        return {
            "omega_hat": self.omega_hat.tolist(),
            "sigma": self.sigma.tolist(),
            "upper_class": [sorted(i + 1 for i in u) for u in self.upper_class],
            "mixing": self.mixing.tolist(),
            "sigma_kernel_dim": self.kernel_dim,
        }


def absorption_vectors(a_hat, upper: list) -> np.ndarray:
    """Column ``l``: probability that the ``A_hat`` chain started at ``i``
    ends in upper-class family ``l``."""
    m = np.asarray(a_hat, dtype=float)
    n = m.shape[0]
    inside = sorted(set().union(*upper))
    transient = complement(inside, n)
    v = np.zeros((n, len(upper)))
    for k, u in enumerate(upper):
        v[sorted(u), k] = 1.0
    if transient:
        lhs = np.eye(len(transient)) - block(m, transient, transient)
        rhs = np.column_stack([block(m, transient, sorted(u)).sum(axis=1) for u in upper])
        v[list(transient)] = np.linalg.solve(lhs, rhs)
    return v


def dominated_power(a_hat, b) -> DominatedPower:
    """Limit of the power of ``A_hat + eps * B`` as ``eps -> 0``.

    Each upper-class family carries its own stationary distribution; the
    weights given to them come from the aggregated chain
    ``C[k, l] = pi_k B v_l``, whose stationary vector ``alpha`` must be
    unique. The correction ``sigma`` solves ``sigma (I - A_hat) = omega_hat B``
    and is pinned inside that equation's solution set by requiring the
    next-order equation ``tau (I - A_hat) = sigma B`` to be solvable.
    """
    m = np.asarray(a_hat, dtype=float)
    bm = np.asarray(b, dtype=float)
    n = m.shape[0]
    upper = upper_class_families(m)
    q = len(upper)

    pis = np.zeros((q, n))
    for k, u in enumerate(upper):
        members = sorted(u)
        pis[k, members] = stationary_row(block(m, members, members))

    v = absorption_vectors(m, upper)
    coupling = pis @ bm @ v
    if q == 1:
        alpha = np.ones(1)
    else:
        rank = numerical_rank(coupling, 1e-9)
        if rank < q - 1:
            raise AmbiguousMixing(q - rank)
        lhs = np.vstack([coupling.T, np.ones((1, q))])
        rhs = np.zeros(q + 1)
        rhs[-1] = 1.0
        alpha = np.linalg.lstsq(lhs, rhs, rcond=None)[0]
    omega_hat = alpha @ pis

    lap = np.eye(n) - m
    sigma_p = np.linalg.lstsq(lap.T, omega_hat @ bm, rcond=None)[0]
    lhs = np.vstack([coupling.T, np.ones((1, q))])
    rhs = np.concatenate([-(sigma_p @ bm @ v), [-sigma_p.sum()]])
    beta = np.linalg.lstsq(lhs, rhs, rcond=None)[0]
    sigma = sigma_p + beta @ pis
    return DominatedPower(omega_hat, sigma, tuple(upper), pis, alpha, coupling)


def _lagrange_at_zero(xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    w = np.ones(len(xs))
    for i in range(len(xs)):
        for j in range(len(xs)):
            if i != j:
                w[i] *= xs[j] / (xs[j] - xs[i])
    return w


def power_at(a_hat, b, eps: float) -> np.ndarray:
    """Power of ``A_hat + eps * B`` by the block solve."""
    try:
        a = validate(np.asarray(a_hat) + eps * np.asarray(b), "politics")
    except ValidationError as exc:
        raise InvalidAtEps(eps, exc) from exc
    return stationary_row(np.asarray(a))


def power_limit_oracle(a_hat, b, eps_list=DEFAULT_ORACLE_EPS) -> np.ndarray:
    """Polynomial (Richardson) extrapolation of ``omega(eps)`` to zero."""
    eps_list = tuple(eps_list)
    samples = np.array([power_at(a_hat, b, e) for e in eps_list])
    return _lagrange_at_zero(eps_list) @ samples


@dataclass(frozen=True)
class SingularInverseExpansion:
    """``(M + eps N)^{-1} = pole_term / eps + regular_term + O(eps)``."""

    right_kernel: np.ndarray
    left_kernel: np.ndarray
    omega_block: np.ndarray
    pole_term: np.ndarray
    regular_term: np.ndarray
    pivot: tuple

    def approx(self, eps: float) -> np.ndarray:
        return self.pole_term / eps + self.regular_term


def _pivot_set(m: np.ndarray, size: int, tol: float) -> tuple:
    """Indices ``G`` with ``M_GG`` invertible, chosen greedily to keep the
    smallest singular value of ``M_GG`` as large as possible."""
    n = m.shape[0]
    scale = singular_values(m)[0] if n else 1.0
    chosen = []
    for _ in range(size):
        best, best_s = None, 0.0
        for i in range(n):
            if i in chosen:
                continue
            g = sorted(chosen + [i])
            s = singular_values(m[np.ix_(g, g)])[-1]
            if s > best_s:
                best, best_s = i, s
        if best is None or best_s <= tol * scale:
            break
        chosen.append(best)
    if len(chosen) == size:
        return tuple(sorted(chosen))
    if n <= 12:
        for g in itertools.combinations(range(n), size):
            if not is_singular(m[np.ix_(g, g)], tol):
                return g
    raise SingularBlock(f"no invertible principal {size}x{size} block found")


def singular_inverse_expansion(m, n_mat, tol: float | None = None) -> SingularInverseExpansion:
    """Leading terms of ``(M + eps N)^{-1}`` for singular ``M``: with ``V``
    and ``U*`` bases of the right and left kernels of ``M``,
    ``Omega = U* N V`` and ``W = V Omega^{-1} U*``, the pole term is ``W``
    and the regular term ``(I - W N) Z (I - N W)``, where ``Z`` inverts an
    invertible principal block ``M_GG`` of full rank size and is zero
    elsewhere."""
    tol = core.RANK_TOL if tol is None else tol
    m = np.asarray(m, dtype=float)
    n_mat = np.asarray(n_mat, dtype=float)
    size = m.shape[0]
    rank = numerical_rank(m, tol)
    if rank == size:
        raise FullRank("M is invertible; solve (M + eps N) directly")
    v, ustar = kernels(m, tol)
    omega = ustar @ n_mat @ v
    if is_singular(omega, tol):
        raise OmegaSingular(omega)
    w = v @ np.linalg.solve(omega, ustar)
    g = _pivot_set(m, rank, tol) if rank else ()
    z = np.zeros_like(m)
    if g:
        z[np.ix_(g, g)] = np.linalg.inv(m[np.ix_(g, g)])
    eye = np.eye(size)
    regular = (eye - w @ n_mat) @ z @ (eye - n_mat @ w)
    return SingularInverseExpansion(v, ustar, omega, w, regular, tuple(g))


def limit_support(a_hat, b, partition: IndexPartition) -> SupportMatrix:
    """``lim_{eps -> 0} (I - A_II)^{-1} A_IJ`` for ``A = A_hat + eps B``.

    With no family inside the voters this is the plain support matrix of
    ``A_hat``. Otherwise the voter block is expanded around its singular
    limit and the ``eps^0`` coefficient of the product is returned.
    """
    m = np.asarray(a_hat, dtype=float)
    bm = np.asarray(b, dtype=float)
    voters, cands = partition.voters, partition.candidates
    lhs = np.eye(len(voters)) - block(m, voters, voters)
    a_ij = block(m, voters, cands)
    if not is_singular(lhs):
        d = np.linalg.solve(lhs, a_ij)
        d[~structural_support(m, voters, cands)] = 0.0
        return SupportMatrix(partition, d, float(np.linalg.cond(lhs)), method="regular")
    exp = singular_inverse_expansion(lhs, -block(bm, voters, voters))
    d = exp.pole_term @ block(bm, voters, cands) + exp.regular_term @ a_ij
    return SupportMatrix(partition, d, float("inf"), method="expansion")


@dataclass(frozen=True)
class Consensus:
    family: frozenset
    raw: np.ndarray
    normalized: np.ndarray

    def to_json(self) -> dict:
        return {
            "family": sorted(i + 1 for i in self.family),
            "raw": self.raw.tolist(),
            "normalized": self.normalized.tolist(),
        }


def consensus(a_hat, b, family, partition: IndexPartition) -> Consensus:
    """Candidate weights an upper-class family inside the voters converges
    to: ``c_J = omega_F (B_FJ + B_FH D_HJ)`` with ``H`` the other voters and
    ``D_HJ`` their limit support, then normalized to sum 1."""
    m = np.asarray(a_hat, dtype=float)
    bm = np.asarray(b, dtype=float)
    n = m.shape[0]
    fam = frozenset(index_set(family, n))
    if fam not in upper_class_families(m):
        raise NotUpperClass(f"{sorted(i + 1 for i in fam)} is not an upper-class family")
    if not fam <= set(partition.voters):
        raise BadIndexSet("the family must lie inside the voter set")
    f = sorted(fam)
    h = [i for i in partition.voters if i not in fam]
    j = list(partition.candidates)
    omega_f = stationary_row(block(m, f, f))
    weights = block(bm, f, j)
    if h:
        d_hj = limit_support(m, bm, IndexPartition(h, j, n)).entries
        weights = weights + block(bm, f, h) @ d_hj
    raw = omega_f @ weights
    return Consensus(fam, raw, raw / raw.sum())


def power_expansion_error(a_hat, b, dp: DominatedPower, eps: float) -> float:
    return float(np.abs(power_at(a_hat, b, eps) - dp.omega_hat - eps * dp.sigma).max())


def inverse_expansion_error(m, n_mat, exp: SingularInverseExpansion, eps: float) -> float:
    exact = np.linalg.inv(np.asarray(m) + eps * np.asarray(n_mat))
    return float(np.abs(exact - exp.approx(eps)).max())
