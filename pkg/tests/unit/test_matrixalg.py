"""
Tests for the finite Heisenberg group generators and tensor embeddings.
"""

import cmath
import math

import numpy as np
import pytest

from src.core.exceptions import DimensionError
from src.services.matrixalg import (
    LatticeIndex,
    TensorLayout,
    basis_pair_stack,
    gen_lambda,
    gen_q,
    kappa,
    kron,
    permutation_p,
    t_basis,
    tensor_embed,
)

SIZES = [1, 2, 3, 4]


class TestGenerators:
    """Clock and shift matrices."""

    @pytest.mark.parametrize("n", SIZES)
    def test_nth_power_is_identity(self, n):
        eye = np.eye(n)
        np.testing.assert_allclose(np.linalg.matrix_power(gen_q(n), n), eye, atol=1e-13)
        np.testing.assert_allclose(np.linalg.matrix_power(gen_lambda(n), n), eye, atol=1e-13)

    @pytest.mark.parametrize("n", SIZES)
    def test_commutation_relation(self, n):
        q, lam = gen_q(n), gen_lambda(n)
        np.testing.assert_allclose(lam @ q, cmath.exp(2j * math.pi / n) * q @ lam, atol=1e-13)

    def test_cached_results_are_read_only(self):
        with pytest.raises(ValueError):
            gen_q(3)[0, 0] = 0


class TestSinBasis:
    """T_alpha and its structure constants."""

    @pytest.mark.parametrize("n", [2, 3])
    def test_product_rule(self, n):
        for alpha in [(1, 0), (0, 1), (1, 2), (2, 2)]:
            for beta in [(1, 1), (2, 0), (-1, 3)]:
                total = (alpha[0] + beta[0], alpha[1] + beta[1])
                np.testing.assert_allclose(
                    t_basis(alpha, n) @ t_basis(beta, n),
                    kappa(alpha, beta, n) * t_basis(total, n),
                    atol=1e-12,
                )

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_trace_orthogonality(self, n):
        indices = LatticeIndex.all(n)
        for alpha in indices:
            for beta in indices:
                trace = np.trace(t_basis(alpha, n) @ t_basis(beta, n).conj().T)
                expected = n if alpha == beta else 0
                assert abs(trace - expected) < 1e-12

    def test_zero_index_is_identity(self):
        np.testing.assert_allclose(t_basis((0, 0), 3), np.eye(3))

    def test_shift_by_n_picks_up_sign(self):
        n = 3
        # T_{(1,1) + N (1,1)} = (-1)^{1 + 1 + N} T_{(1,1)}
        np.testing.assert_allclose(t_basis((4, 4), n), -t_basis((1, 1), n), atol=1e-13)
        np.testing.assert_allclose(t_basis((3, 0), n), np.eye(n), atol=1e-13)

    def test_lattice_index_reduces(self):
        alpha = LatticeIndex(5, -1, 3)
        assert alpha.as_tuple() == (2, 2)
        assert (alpha + (-alpha)).is_zero
        assert abs(alpha.omega(0.8j) - (2 + 1.6j) / 3) < 1e-15
        with pytest.raises(ValueError):
            LatticeIndex(0, 0, 0)


class TestTensorEmbedding:
    """Slot embeddings, the permutation operator and basis pair stacks."""

    def test_embedding_order(self):
        layout = TensorLayout(3, 2)
        m = np.array([[1, 2], [3, 4]], dtype=complex)
        expected = np.kron(np.eye(2), np.kron(m, np.eye(2)))
        np.testing.assert_allclose(tensor_embed(m, 2, layout), expected)

    @pytest.mark.parametrize("n", [2, 3])
    def test_permutation(self, n):
        layout = TensorLayout(2, n)
        p = permutation_p(1, 2, layout)
        rng = np.random.default_rng(3)
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        np.testing.assert_allclose(p @ p, np.eye(n * n), atol=1e-14)
        np.testing.assert_allclose(p @ kron(a, b) @ p, kron(b, a), atol=1e-13)

    def test_permutation_equals_sin_basis_sum(self):
        n = 3
        layout = TensorLayout(2, n)
        np.testing.assert_allclose(basis_pair_stack(1, 2, layout).sum(axis=0) / n,
                                   permutation_p(1, 2, layout), atol=1e-13)

    def test_permutation_of_outer_slots(self):
        layout = TensorLayout(3, 2)
        a = np.array([[0, 1], [0, 0]], dtype=complex)
        p = permutation_p(1, 3, layout)
        np.testing.assert_allclose(p @ tensor_embed(a, 1, layout) @ p, tensor_embed(a, 3, layout))

    def test_bad_slots(self):
        layout = TensorLayout(2, 2)
        with pytest.raises(DimensionError):
            tensor_embed(np.eye(2), 3, layout)
        with pytest.raises(DimensionError):
            permutation_p(1, 1, layout)
        with pytest.raises(DimensionError):
            tensor_embed(np.eye(3), 1, layout)
