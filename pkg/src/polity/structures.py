"""Generators for archetype societies: father and sons, family trees,
families with equality, the near-identity garden, and the two 4-person
correlation cases."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .core import DominatedMatrix, PoliticsMatrix, ROW_TOL, index_set, validate
from .errors import (
    BadDistribution,
    BadParameters,
    CyclicSpec,
    EpsTooLarge,
    ValidationError,
)


def gen_father_and_sons(k: int, leader_row=None) -> DominatedMatrix:
    """Everybody listens to person 0. With ``leader_row`` the leader listens
    to the family according to that distribution instead of only himself."""
    if k < 1:
        raise BadParameters("family size must be at least 1")
    a = np.zeros((k, k))
    a[:, 0] = 1.0
    if leader_row is not None:
        row = np.asarray(leader_row, dtype=float)
        if (row.shape != (k,) or not np.all(np.isfinite(row)) or np.any(row < 0)
                or abs(row.sum() - 1.0) > ROW_TOL):
            raise BadDistribution(f"leader row must be a distribution over {k} persons")
        a[0] = row
    return validate(a, "dominated")


@dataclass(frozen=True)
class TreeSpec:
    """``parent[i]`` is whom person ``i`` reports to; the root is its own
    parent."""

    parent: tuple

    def __post_init__(self):
        parent = tuple(int(p) for p in self.parent)
        n = len(parent)
        if n == 0 or any(p < 0 or p >= n for p in parent):
            raise BadParameters(f"parent indices out of range: {parent}")
        roots = [i for i, p in enumerate(parent) if p == i]
        if len(roots) != 1:
            raise CyclicSpec(f"expected exactly one root, found {len(roots)}")
        for i in range(n):
            seen = set()
            while parent[i] != i:
                if i in seen:
                    raise CyclicSpec(f"parent links cycle through person {i + 1}")
                seen.add(i)
                i = parent[i]
        object.__setattr__(self, "parent", parent)

    @classmethod
    def from_mapping(cls, parent: Mapping[int, int], n: int | None = None) -> "TreeSpec":
        n = len(parent) if n is None else n
        return cls(tuple(parent[i] for i in range(n)))

    @property
    def root(self) -> int:
        return next(i for i, p in enumerate(self.parent) if p == i)

    @property
    def n(self) -> int:
        return len(self.parent)


def gen_family_tree(spec: TreeSpec) -> DominatedMatrix:
    a = np.zeros((spec.n, spec.n))
    a[np.arange(spec.n), spec.parent] = 1.0
    return validate(a, "dominated")


@dataclass(frozen=True)
class TreeGroups:
    """Non-candidate, non-root persons split by the first candidate on their
    chain of superiors; ``leader`` holds those whose chain reaches the root
    first (the root not being a candidate)."""

    leader: frozenset
    by_candidate: dict


def tree_preference_groups(spec: TreeSpec, candidates: Iterable[int]) -> TreeGroups:
    cands = set(index_set(candidates, spec.n))
    if not cands:
        raise BadParameters("candidate set must be nonempty")
    root = spec.root
    groups = {j: set() for j in sorted(cands)}
    leader = set()
    for i in range(spec.n):
        if i in cands or i == root:
            continue
        x = spec.parent[i]
        while x not in cands and x != root:
            x = spec.parent[x]
        (groups[x] if x in cands else leader).add(i)
    return TreeGroups(frozenset(leader), {j: frozenset(g) for j, g in groups.items()})


def gen_equality(k: int, s: float) -> DominatedMatrix:
    """Everybody listens to each other member with weight ``s`` and to
    himself with ``1 - (k-1) s``."""
    if k < 1 or not s > 0 or (k - 1) * s > 1.0 + 1e-15:
        raise BadParameters(f"need s > 0 and (k-1)s <= 1, got k={k}, s={s}")
    a = np.full((k, k), float(s))
    np.fill_diagonal(a, max(0.0, 1.0 - (k - 1) * s))
    return validate(a, "dominated")


def gen_garden(b, eps: float) -> PoliticsMatrix:
    """The near-identity society ``I + eps B``."""
    b = np.asarray(b, dtype=float)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise BadParameters(f"B must be square, got shape {b.shape}")
    if np.abs(b.sum(axis=1)).max() > 1e-12 * max(1.0, np.abs(b).max()):
        raise BadParameters("B rows must sum to 0")
    off = b[~np.eye(b.shape[0], dtype=bool)]
    if np.any(off <= 0):
        raise BadParameters("off-diagonal entries of B must be positive")
    if not eps > 0:
        raise BadParameters("eps must be positive")
    try:
        return validate(np.eye(b.shape[0]) + eps * b, "politics")
    except ValidationError as exc:
        raise EpsTooLarge(f"eps={eps:g} is too large for B: {exc}") from exc


def mix_uniform(a_hat, eps: float) -> PoliticsMatrix:
    """``(1 - eps) A_hat + eps U`` with ``U`` uniform: a strictly positive
    matrix whose dominated part is ``A_hat``."""
    m = np.asarray(a_hat, dtype=float)
    if not 0 < eps < 1:
        raise BadParameters("mixing eps must lie in (0, 1)")
    n = m.shape[0]
    return validate((1 - eps) * m + eps / n, "politics")


def gen_correlation_case(case: int, eps: float = 1e-4) -> DominatedMatrix:
    """The 4-person society with voters {0, 1} and candidates {2, 3}.

    Case 1: person 1 listens to person 0 half the time. Case 2: person 1
    listens almost only to himself. Candidates listen only to themselves.
    """
    if case == 1:
        row1 = [0.5, 0.0, 0.4, 0.1]
    elif case == 2:
        if not 0 < eps < 1:
            raise BadParameters("eps must lie in (0, 1)")
        row1 = [0.5 * eps, 1.0 - eps, 0.4 * eps, 0.1 * eps]
    else:
        raise BadParameters(f"unknown case {case}")
    a = np.array([[0.5, 0.0, 0.4, 0.1], row1, [0, 0, 1, 0], [0, 0, 0, 1]], dtype=float)
    return validate(a, "dominated")


SAMPLE_TREE = TreeSpec((0, 0, 0, 1, 1, 2))
