"""Random instance generators and brute-force oracles for the test suite.

The oracles here deliberately avoid the library's own algorithms: families
are found by checking every subset entry by entry, inverses by dense
``numpy.linalg.inv``, derivatives by finite differences.
"""

import itertools

import numpy as np

ACCEPTANCE_LINES = []


def random_politics(rng, n, low=0.05):
    a = rng.uniform(low, 1.0, (n, n))
    return a / a.sum(axis=1, keepdims=True)


def random_dominated(rng, n, density=0.35):
    """Nonnegative row-stochastic matrix with a random planted zero pattern;
    each row keeps at least one positive entry."""
    mask = rng.random((n, n)) < density
    for i in range(n):
        if not mask[i].any():
            mask[i, rng.integers(n)] = True
    a = np.where(mask, rng.uniform(0.1, 1.0, (n, n)), 0.0)
    return a / a.sum(axis=1, keepdims=True)


def planted_families(rng, q, extra=None, max_size=3):
    """Dominated matrix with exactly ``q`` upper-class families (blocks at the
    front, each strictly positive) followed by transient persons that always
    lead into lower-numbered persons. Returns ``(a_hat, families)``."""
    sizes = rng.integers(1, max_size + 1, q)
    extra = int(rng.integers(1, 4)) if extra is None else extra
    n = int(sizes.sum()) + extra
    a = np.zeros((n, n))
    fams, start = [], 0
    for k in sizes:
        a[start:start + k, start:start + k] = rng.uniform(0.1, 1.0, (k, k))
        fams.append(frozenset(range(start, start + k)))
        start += k
    for i in range(start, n):
        row = rng.uniform(0.1, 1.0, i) * (rng.random(i) < 0.6)
        if not row.any():
            row[rng.integers(i)] = rng.uniform(0.1, 1.0)
        a[i, :i] = row
        if rng.random() < 0.5:
            a[i, i:] = rng.uniform(0.0, 1.0, n - i) * (rng.random(n - i) < 0.3)
    return a / a.sum(axis=1, keepdims=True), fams


def positive_correction(rng, a_hat):
    """``B = P - A_hat`` for a random strictly positive stochastic ``P``, so
    ``A_hat + eps B`` is a politics matrix for every ``0 < eps <= 1``."""
    p = random_politics(rng, a_hat.shape[0], 0.1)
    return p - a_hat


def brute_families(a_hat):
    """Every subset ``F`` with no positive entry from ``F`` to its complement."""
    n = a_hat.shape[0]
    out = []
    for r in range(n + 1):
        for f in itertools.combinations(range(n), r):
            fs = set(f)
            if all(a_hat[i][j] == 0 for i in f for j in range(n) if j not in fs):
                out.append(frozenset(f))
    return out


def brute_upper_class(a_hat):
    fams = [f for f in brute_families(a_hat) if f]
    return sorted((f for f in fams if not any(g < f for g in fams)), key=min)


def brute_disconnected(a_hat):
    """Definition: the whole set is a union of two disjoint nonempty families."""
    n = a_hat.shape[0]
    fams = set(brute_families(a_hat))
    full = frozenset(range(n))
    return any(f and (full - f) and (full - f) in fams for f in fams)


def finite_difference(fn, x, h=1e-6):
    return (fn(x + h) - fn(x - h)) / (2 * h)


def loglog_slope(xs, ys):
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def binomial_sigma(p, trials):
    return float(np.sqrt(p * (1 - p) / trials))


SAMPLE_TREE_MATRIX = np.array([
    [1, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0],
], dtype=float)
