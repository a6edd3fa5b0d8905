import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polity.core import IndexPartition, centered, row_rescale, validate
from polity.election import (
    garden_support,
    neumann_inverse,
    neumann_support,
    structural_support,
    support_from_centered,
    support_matrix,
)
from polity.errors import SingularBlock, SingularVoterBlock, ValidationError
from polity.structures import SAMPLE_TREE, gen_family_tree, gen_garden
from helpers import random_politics

CASE1 = [[0.5, 0.0, 0.4, 0.1], [0.5, 0.0, 0.4, 0.1], [0, 0, 1, 0], [0, 0, 0, 1]]
VOTE = IndexPartition.elect([2, 3], 4)
GARDEN_B = np.array([
    [-1.0, 0.5, 0.5, 0.0],
    [0.5, -1.0, 0.0, 0.5],
    [0.3, 0.3, -0.6, 0.0],
    [0.2, 0.2, 0.0, -0.4],
])


class TestSupportMatrix:
    def test_case1(self):
        d = support_matrix(validate(CASE1, "dominated"), VOTE)
        assert np.abs(d.entries - [[0.8, 0.2], [0.8, 0.2]]).max() <= 1e-12

    def test_case2_eps_001(self):
        m = np.array(CASE1)
        m[1] = [0.005, 0.99, 0.004, 0.001]
        d = support_matrix(validate(m, "dominated"), VOTE)
        assert np.abs(d.entries - [[0.8, 0.2], [0.8, 0.2]]).max() <= 1e-12

    def test_single_voter(self):
        m = validate([[0.5, 0.4, 0.1], [0, 1, 0], [0, 0, 1]], "dominated")
        d = support_matrix(m, IndexPartition([0], [1, 2], 3))
        assert np.allclose(d.entries, [[0.8, 0.2]])

    def test_rows_sum_to_one(self, rng):
        a = validate(random_politics(rng, 7))
        d = support_matrix(a, IndexPartition.elect([1, 5], 7))
        assert np.allclose(d.entries.sum(axis=1), 1.0, atol=1e-12)
        assert np.all(d.entries > 0)

    def test_matches_dense_inverse(self, rng):
        m = random_politics(rng, 6)
        part = IndexPartition.elect([0, 3], 6)
        i, j = list(part.voters), list(part.candidates)
        expect = np.linalg.inv(np.eye(4) - m[np.ix_(i, i)]) @ m[np.ix_(i, j)]
        assert np.abs(support_matrix(validate(m), part).entries - expect).max() <= 1e-12

    def test_family_inside_voters_named(self):
        a = gen_family_tree(SAMPLE_TREE)
        with pytest.raises(SingularVoterBlock) as info:
            support_matrix(a, IndexPartition.elect([1, 2], 6))
        assert info.value.family == frozenset({0})

    def test_singular_voter_block_is_singular_block(self):
        assert issubclass(SingularVoterBlock, SingularBlock)

    def test_structural_zero_exact(self):
        a = gen_family_tree(SAMPLE_TREE)
        part = IndexPartition([3, 4, 5], [1, 2], 6)
        d = support_matrix(a, part).entries
        assert d.tolist() == [[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
        assert structural_support(a, part.voters, part.candidates).tolist() == [
            [True, False], [True, False], [False, True]]

    def test_to_json_is_one_based(self):
        out = support_matrix(validate(CASE1, "dominated"), VOTE).to_json()
        assert out["voters"] == [1, 2] and out["candidates"] == [3, 4]
        assert out["near_singular"] is False


class TestNeumann:
    def test_scalar(self):
        assert np.allclose(neumann_inverse([[0.5]]), [[2.0]], atol=1e-12)

    def test_zero(self):
        assert np.array_equal(neumann_inverse(np.zeros((3, 3))), np.eye(3))

    def test_case_block(self):
        assert np.abs(neumann_inverse([[0.5, 0], [0.5, 0]]) - [[2, 0], [1, 1]]).max() <= 1e-12

    def test_rejects_stochastic(self):
        with pytest.raises(ValidationError):
            neumann_inverse([[0.5, 0.5], [0.5, 0.5]])

    def test_slow_series_within_tol(self):
        m = np.array([[0.999 - 1e-3, 1e-3], [0.0, 0.99]])
        inv = neumann_inverse(m, 1e-10)
        assert np.abs(inv - np.linalg.inv(np.eye(2) - m)).max() <= 1e-9

    def test_support_twin(self, rng):
        a = validate(random_politics(rng, 5))
        part = IndexPartition.elect([4], 5)
        assert np.abs(neumann_support(a, part).entries
                      - support_matrix(a, part).entries).max() <= 1e-10


class TestCenteredAndGarden:
    def test_centered_formula(self, rng):
        a = validate(random_politics(rng, 5))
        part = IndexPartition.elect([0, 2], 5)
        d0 = support_matrix(a, part).entries
        assert np.abs(support_from_centered(centered(a), part).entries - d0).max() <= 1e-12

    def test_rescale(self, rng):
        a = validate(random_politics(rng, 5))
        part = IndexPartition.elect([1], 5)
        lam = rng.uniform(0.1, 10, 5)
        d0 = support_matrix(a, part).entries
        d1 = support_from_centered(row_rescale(centered(a), lam), part).entries
        assert np.abs(d1 - d0).max() <= 1e-10

    def test_garden_two_by_two(self):
        b = np.array([[-1, 0.5, 0.5, 0], [0.5, -1, 0, 0.5], [0, 0, 0, 0], [0, 0, 0, 0]])
        d = garden_support(b, IndexPartition.elect([2, 3], 4))
        assert np.abs(d.entries - [[2 / 3, 1 / 3], [1 / 3, 2 / 3]]).max() <= 1e-12

    def test_garden_scale_free(self):
        part = IndexPartition.elect([2, 3], 4)
        d1 = garden_support(GARDEN_B, part).entries
        d7 = garden_support(7.0 * GARDEN_B, part).entries
        assert np.abs(d1 - d7).max() <= 1e-13

    @pytest.mark.parametrize("eps", [1e-1, 1e-2, 1e-3])
    def test_garden_matches_society(self, eps):
        part = IndexPartition.elect([2, 3], 4)
        b = GARDEN_B + 0.01 * (1 - 4 * np.eye(4))
        d = support_matrix(gen_garden(b, eps), part).entries
        assert np.abs(d - garden_support(b, part).entries).max() <= 1e-9

    def test_garden_rejects_bad_rows(self):
        with pytest.raises(ValidationError):
            garden_support(GARDEN_B + 0.1, IndexPartition.elect([3], 4))


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 10), st.integers(0, 2**32 - 1))
def test_support_rows_are_distributions(n, seed):
    rng = np.random.default_rng(seed)
    a = validate(random_politics(rng, n))
    k = int(rng.integers(1, n))
    cands = rng.choice(n, size=k, replace=False)
    d = support_matrix(a, IndexPartition.elect(cands, n)).entries
    assert np.all(d > 0)
    assert np.abs(d.sum(axis=1) - 1).max() <= 1e-12
