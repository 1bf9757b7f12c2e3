import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bqism.exceptions import DimensionError
from bqism.rmatrix import r_matrix
from bqism.tensor import (
    commutator_norm,
    elementary,
    embed_pair,
    is_scalar_multiple,
    kron,
    matrix_from_json,
    matrix_to_json,
    partial_transpose,
    permutation_operator,
    trace_over_aux,
)

from oracles import perm_oracle, pt1_oracle


def rand_c(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


seeds = st.integers(min_value=0, max_value=2**32 - 1)


def basis(n, k):
    v = np.zeros(n)
    v[k] = 1
    return v


class TestKron:
    def test_identity(self):
        assert np.array_equal(kron(np.eye(3), np.eye(3)), np.eye(9))

    def test_unit_second_factor(self):
        e12 = elementary(1, 2, 3)
        assert np.array_equal(kron(e12, np.eye(1)), e12)

    def test_swap_on_three_qubits(self):
        # P_swap (x) I_2 sends e1 e2 e1 to e2 e1 e1; checked on all 8 basis vectors
        op = kron(permutation_operator(2), np.eye(2))
        for bits in itertools.product(range(2), repeat=3):
            src = np.ravel_multi_index(bits, (2, 2, 2))
            tgt = np.ravel_multi_index((bits[1], bits[0], bits[2]), (2, 2, 2))
            assert np.array_equal(op @ basis(8, src), basis(8, tgt))

    def test_index_convention(self):
        # |i> (x) |j> sits at row 3(i-1)+j (1-based)
        for i, j in itertools.product(range(1, 4), repeat=2):
            v = kron(basis(3, i - 1)[:, None], basis(3, j - 1)[:, None]).ravel()
            assert v[3 * (i - 1) + j - 1] == 1

    @settings(max_examples=25, deadline=None)
    @given(seeds)
    def test_associative(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (rand_c(rng, 3) for _ in range(3))
        assert np.allclose(kron(kron(a, b), c), kron(a, kron(b, c)), rtol=0, atol=1e-12)


class TestPartialTranspose:
    def test_identity_fixed(self):
        assert np.array_equal(partial_transpose(np.eye(9), 1), np.eye(9))

    def test_involution(self):
        m = rand_c(np.random.default_rng(0), 9)
        assert np.array_equal(partial_transpose(partial_transpose(m, 1), 1), m)

    def test_of_swap_is_rank_one_sum(self):
        expected = sum(kron(elementary(i, j), elementary(i, j)) for i in range(1, 4) for j in range(1, 4))
        assert np.array_equal(partial_transpose(permutation_operator(3), 1), expected)

    def test_matches_oracle(self):
        m = rand_c(np.random.default_rng(1), 9)
        assert np.array_equal(partial_transpose(m, 1), pt1_oracle(m))

    @settings(max_examples=25, deadline=None)
    @given(seeds)
    def test_both_spaces_give_full_transpose(self, seed):
        m = rand_c(np.random.default_rng(seed), 9)
        assert np.array_equal(partial_transpose(partial_transpose(m, 1), 2), m.T)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            partial_transpose(np.eye(8), 1)


class TestPermutation:
    def test_trivial(self):
        assert np.array_equal(permutation_operator(1), np.eye(1))

    def test_swaps_basis(self):
        p = permutation_operator(3)
        e1e2 = np.kron(basis(3, 0), basis(3, 1))
        assert np.array_equal(p @ e1e2, np.kron(basis(3, 1), basis(3, 0)))

    def test_matches_oracle_and_is_involution(self):
        p = permutation_operator(3)
        assert np.array_equal(p, perm_oracle())
        assert np.array_equal(p @ p, np.eye(9))
        assert np.array_equal(p.T, p)

    def test_equals_r_at_one(self):
        assert np.linalg.norm(r_matrix(1.0) - permutation_operator(3)) < 1e-14


class TestEmbedPair:
    def test_two_sites_is_identity_embedding(self):
        m = rand_c(np.random.default_rng(2), 9)
        assert np.array_equal(embed_pair(m, 1, 2), m)

    def test_identity(self):
        assert np.array_equal(embed_pair(np.eye(9), 2, 3), np.eye(27))

    def test_swaps_compose_to_three_cycle(self):
        p = permutation_operator(3)
        cyc = embed_pair(p, 1, 3) @ embed_pair(p, 2, 3)
        for s in itertools.product(range(3), repeat=3):
            src = np.ravel_multi_index(s, (3, 3, 3))
            # P_23 first swaps sites 2 and 3, then P_12 swaps sites 1 and 2
            tgt = np.ravel_multi_index((s[2], s[0], s[1]), (3, 3, 3))
            assert np.array_equal(cyc @ basis(27, src), basis(27, tgt))

    @pytest.mark.parametrize("site", [0, 3])
    def test_site_out_of_range(self, site):
        with pytest.raises(DimensionError):
            embed_pair(np.eye(9), site, 3)


class TestTraceOverAux:
    def test_identity_factor(self):
        w = rand_c(np.random.default_rng(3), 3)
        assert np.allclose(trace_over_aux(kron(np.eye(3), w)), 3 * w)

    def test_swap(self):
        assert np.array_equal(trace_over_aux(permutation_operator(3)), np.eye(3))

    def test_factorised_pairs(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            a, b = rand_c(rng, 3), rand_c(rng, 9)
            assert np.allclose(trace_over_aux(kron(a, b)), np.trace(a) * b, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            trace_over_aux(np.eye(10))


class TestScalarAndCommutator:
    def test_scalar(self):
        assert is_scalar_multiple(5 * np.eye(9)) == (True, 5)

    def test_swap_not_scalar(self):
        flag, s = is_scalar_multiple(permutation_operator(3))
        assert not flag and s is None

    def test_commutator_identity(self):
        a = rand_c(np.random.default_rng(5), 4)
        assert commutator_norm(np.eye(4), a) == 0

    def test_commutator_with_power(self):
        a = rand_c(np.random.default_rng(6), 4)
        assert commutator_norm(a, a @ a) < 1e-12

    def test_commutator_elementary(self):
        assert commutator_norm(elementary(1, 2, 2), elementary(2, 1, 2)) == pytest.approx(np.sqrt(2))

    def test_commutator_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            commutator_norm(np.eye(2), np.eye(3))


def test_matrix_json_round_trip():
    m = rand_c(np.random.default_rng(7), 3)
    obj = matrix_to_json(m)
    assert obj["dim"] == 3 and len(obj["entries"]) == 9
    assert np.array_equal(matrix_from_json(obj), m)
