"""Monte Carlo oracle for support probabilities.

Marginals: every voter runs a random walk on ``A`` until it hits a
candidate; the hit distribution is the absorption probability
``(I - A_II)^{-1} A_IJ``.

Joints: within one trial each voter draws a single choice from its row.
Choosing a candidate settles the vote. Choosing another voter means adopting
that voter's realized decision, so voters who listen to each other agree.
Choosing oneself means deciding privately: an independent walk that shares
nothing with the others' realized decisions. Delegation cycles among
voters are broken by redrawing the choices of the cycle members.

Randomness is split into fixed chunks of trials, each seeded from
``(seed, chunk index)``, so results do not depend on how many workers run
the chunks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import IndexPartition
from .errors import ResampleLimit, ValidationError, WalkLimitExceeded
from .families import family_in_block

CHUNK = 1 << 16
STEP_LIMIT = 10**6
RESAMPLE_LIMIT = 10**4


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, chunk])))


def _chunks(trials: int):
    return [(c, min(CHUNK, trials - start)) for c, start in enumerate(range(0, trials, CHUNK))]


@dataclass(frozen=True)
class SimulationResult:
    partition: IndexPartition
    trials: int
    seed: int
    counts: np.ndarray = field(repr=False)
    joint_counts: dict = field(repr=False, default_factory=dict)
    unresolved: int = 0

    @property
    def marginal(self) -> np.ndarray:
        return self.counts / self.trials

    @property
    def joint(self) -> dict:
        return {p: c / self.trials for p, c in self.joint_counts.items()}

    def probability(self, assignment: dict) -> float:
        """Frequency of trials in which every voter ``i`` in ``assignment``
        supported candidate ``assignment[i]``."""
        pos = {v: k for k, v in enumerate(self.partition.voters)}
        hits = sum(
            c for p, c in self.joint_counts.items()
            if all(p[pos[i]] == j for i, j in assignment.items())
        )
        return hits / self.trials

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "voters": [i + 1 for i in self.partition.voters],
            "candidates": [j + 1 for j in self.partition.candidates],
            "marginal": self.marginal.tolist(),
            "joint": [
                {"profile": [j + 1 for j in p], "freq": c / self.trials}
                for p, c in sorted(self.joint_counts.items())
            ],
            "unresolved": self.unresolved,
        }


class _Walker:
    """Vectorized absorbing walks. Self-loops are skipped by sampling each
    voter's row conditioned on leaving, which leaves the absorption
    distribution unchanged."""

    def __init__(self, m: np.ndarray, partition: IndexPartition):
        self.n = m.shape[0]
        self.voters = np.array(partition.voters)
        self.cands = np.array(partition.candidates)
        self.is_cand = np.zeros(self.n, dtype=bool)
        self.is_cand[self.cands] = True
        self.cand_pos = np.full(self.n, -1)
        self.cand_pos[self.cands] = np.arange(len(self.cands))
        self.voter_pos = np.full(self.n, -1)
        self.voter_pos[self.voters] = np.arange(len(self.voters))

        trapped = family_in_block(m, partition.voters)
        if trapped is not None:
            raise WalkLimitExceeded(
                f"persons {sorted(i + 1 for i in trapped)} never reach a candidate"
            )
        self.full_cum = self._cumulative(m)
        leave = m.copy()
        leave[self.voters, self.voters] = 0.0
        sums = leave.sum(axis=1, keepdims=True)
        leave = np.divide(leave, sums, out=np.zeros_like(leave), where=sums > 0)
        self.leave_cum = self._cumulative(leave)

    @staticmethod
    def _cumulative(p: np.ndarray) -> np.ndarray:
        cum = np.cumsum(p, axis=1)
        cum /= cum[:, -1:]
        return cum

    def draw(self, cum: np.ndarray, positions: np.ndarray, rng) -> np.ndarray:
        u = rng.random(len(positions))
        idx = (cum[positions] <= u[:, None]).sum(axis=1)
        return np.minimum(idx, self.n - 1)

    def absorb(self, starts: np.ndarray, rng) -> np.ndarray:
        pos = np.array(starts)
        active = np.flatnonzero(~self.is_cand[pos])
        steps = 0
        while active.size:
            steps += 1
            if steps > STEP_LIMIT:
                raise WalkLimitExceeded(f"walk exceeded {STEP_LIMIT} steps")
            pos[active] = self.draw(self.leave_cum, pos[active], rng)
            active = active[~self.is_cand[pos[active]]]
        return pos


def _check(a, partition: IndexPartition, trials: int, seed: int) -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    if int(seed) != seed or seed < 0:
        raise ValidationError("seed must be a nonnegative integer")
    if m.shape != (partition.n, partition.n):
        raise ValidationError("matrix and partition sizes differ")
    return m


def _run(job, chunks, workers: int):
    if workers <= 1:
        return [job(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, chunks))


def simulate_marginals(a, partition: IndexPartition, trials: int, seed: int,
                       workers: int = 1) -> SimulationResult:
    m = _check(a, partition, trials, seed)
    walker = _Walker(m, partition)
    n_i, n_j = len(partition.voters), len(partition.candidates)

    def job(chunk):
        index, size = chunk
        rng = chunk_rng(seed, index)
        counts = np.zeros((n_i, n_j), dtype=np.int64)
        for k, v in enumerate(partition.voters):
            ends = walker.absorb(np.full(size, v), rng)
            counts[k] = np.bincount(walker.cand_pos[ends], minlength=n_j)
        return counts

    counts = sum(_run(job, _chunks(trials), workers))
    return SimulationResult(partition, trials, int(seed), counts)


def _resolve(choices, private, walker, rng):
    """Decisions (global candidate indices, -1 where a cycle blocks) given
    each voter's choice. Missing private walks are run and written into
    ``private`` in place."""
    voters = walker.voters
    size, n_v = choices.shape
    own = choices == voters[None, :]
    need = own & (private < 0)
    if need.any():
        rows, cols = np.nonzero(need)
        private[rows, cols] = walker.absorb(voters[cols], rng)

    dec = np.full((size, n_v), -1)
    direct = walker.is_cand[choices]
    dec[direct] = choices[direct]
    dec[own] = private[own]
    ptr = walker.voter_pos[choices]
    delegated = ~direct & ~own
    rows, cols = np.nonzero(delegated)
    for _ in range(n_v):
        if rows.size == 0:
            break
        dec[rows, cols] = dec[rows, ptr[rows, cols]]
        left = dec[rows, cols] < 0
        rows, cols = rows[left], cols[left]
    return dec, ptr, delegated


def _cycle_members(ptr, delegated, rows):
    """Mask of voters, in trials ``rows``, sitting on a delegation cycle."""
    n_v = ptr.shape[1]
    p = ptr[rows]
    d = delegated[rows]
    cur = np.where(d, p, -1)
    start = np.broadcast_to(np.arange(n_v), cur.shape)
    on_cycle = np.zeros(cur.shape, dtype=bool)
    r = np.arange(len(rows))[:, None]
    for _ in range(n_v):
        on_cycle |= cur == start
        ok = cur >= 0
        nxt = np.where(ok, p[r, np.maximum(cur, 0)], -1)
        nxt = np.where(ok & d[r, np.maximum(cur, 0)], nxt, -1)
        cur = nxt
    return on_cycle


def simulate_joint(a, partition: IndexPartition, trials: int, seed: int,
                   workers: int = 1) -> SimulationResult:
    m = _check(a, partition, trials, seed)
    walker = _Walker(m, partition)
    voters = walker.voters
    n_v, n_j = len(voters), len(partition.candidates)

    def job(chunk):
        index, size = chunk
        rng = chunk_rng(seed, index)
        flat = np.tile(voters, size)
        choices = walker.draw(walker.full_cum, flat, rng).reshape(size, n_v)
        private = np.full((size, n_v), -1)
        dec, ptr, delegated = _resolve(choices, private, walker, rng)
        resamples = 0
        rounds = 0
        bad = np.flatnonzero((dec < 0).any(axis=1))
        while bad.size:
            rounds += 1
            if rounds > RESAMPLE_LIMIT:
                raise ResampleLimit(f"delegation cycles persisted for {RESAMPLE_LIMIT} redraws")
            resamples += bad.size
            cyc = _cycle_members(ptr, delegated, bad)
            rr, cc = np.nonzero(cyc)
            rows = bad[rr]
            choices[rows, cc] = walker.draw(walker.full_cum, voters[cc], rng)
            private[rows, cc] = -1
            sub_private = private[bad]
            sub_dec, sub_ptr, sub_del = _resolve(choices[bad], sub_private, walker, rng)
            private[bad] = sub_private
            dec[bad], ptr[bad], delegated[bad] = sub_dec, sub_ptr, sub_del
            bad = bad[(sub_dec < 0).any(axis=1)]

        counts = np.zeros((n_v, n_j), dtype=np.int64)
        pos = walker.cand_pos[dec]
        for k in range(n_v):
            counts[k] = np.bincount(pos[:, k], minlength=n_j)
        profiles, freq = np.unique(dec, axis=0, return_counts=True)
        joint = {tuple(int(x) for x in p): int(c) for p, c in zip(profiles, freq)}
        return counts, joint, resamples

    results = _run(job, _chunks(trials), workers)
    counts = sum(r[0] for r in results)
    joint: dict = {}
    for _, part, _ in results:
        for p, c in part.items():
            joint[p] = joint.get(p, 0) + c
    unresolved = sum(r[2] for r in results)
    return SimulationResult(partition, trials, int(seed), counts, dict(sorted(joint.items())),
                            unresolved)
