"""Hand-built societies with known limit behaviour, shared by the perturb
and acceptance tests. Each returns ``(a_hat, b, partition)`` with
``a_hat + eps * b`` strictly positive for small ``eps``."""

import numpy as np

from polity.core import IndexPartition
from helpers import SAMPLE_TREE_MATRIX


def father_and_sons():
    """Four persons all listening to person 0; voters {0, 1}, candidates
    {2, 3}; the leader's correction toward the candidates is (0.3, 0.1)."""
    a_hat = np.zeros((4, 4))
    a_hat[:, 0] = 1.0
    p = np.array([
        [0.4, 0.2, 0.3, 0.1],
        [0.25, 0.25, 0.25, 0.25],
        [0.1, 0.2, 0.3, 0.4],
        [0.4, 0.3, 0.2, 0.1],
    ])
    return a_hat, p - a_hat, IndexPartition([0, 1], [2, 3], 4)


def family_tree():
    """The six-person tree with candidates {1, 2}; persons 3 and 4 report to
    candidate 1 and person 5 to candidate 2. The root's correction row puts
    0.1 on candidate 1 and 0.2 on each of persons 3 and 4."""
    a_hat = SAMPLE_TREE_MATRIX.copy()
    b = np.full((6, 6), 0.05) - 0.3 * a_hat
    b[0] = [-0.9, 0.1, 0.15, 0.2, 0.2, 0.25]
    b -= np.diag(b.sum(axis=1))
    return a_hat, b, IndexPartition([0, 3, 4, 5], [1, 2], 6)


def one_family():
    """Family {0, 1, 2} (strictly positive block) inside the voters {0, 1, 2,
    3}, with a fifth person who listens to the family and to person 3."""
    a_hat = np.array([
        [0.2, 0.5, 0.3, 0.0, 0.0, 0.0],
        [0.6, 0.1, 0.3, 0.0, 0.0, 0.0],
        [0.3, 0.3, 0.4, 0.0, 0.0, 0.0],
        [0.2, 0.0, 0.0, 0.3, 0.5, 0.0],
        [0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
    ])
    p = np.array([
        [0.1, 0.1, 0.1, 0.2, 0.3, 0.2],
        [0.2, 0.2, 0.2, 0.1, 0.1, 0.2],
        [0.1, 0.2, 0.1, 0.1, 0.4, 0.1],
        [0.2, 0.2, 0.2, 0.2, 0.1, 0.1],
        [0.1, 0.1, 0.2, 0.2, 0.2, 0.2],
        [0.3, 0.1, 0.1, 0.1, 0.2, 0.2],
    ])
    return a_hat, p - a_hat, IndexPartition([0, 1, 2, 3], [4, 5], 6)


def straddling_family():
    """Family {0, 1, 2} split into voters G = {0, 1} and candidate K = {2};
    voter 3 listens to the family and to the outside candidate 4."""
    a_hat = np.array([
        [0.2, 0.5, 0.3, 0.0, 0.0],
        [0.6, 0.1, 0.3, 0.0, 0.0],
        [0.3, 0.3, 0.4, 0.0, 0.0],
        [0.2, 0.1, 0.0, 0.3, 0.4],
        [0.0, 0.0, 0.0, 0.5, 0.5],
    ])
    p = np.full((5, 5), 0.2)
    return a_hat, p - a_hat, IndexPartition([0, 1, 3], [2, 4], 5)
