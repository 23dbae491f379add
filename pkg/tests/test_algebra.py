import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncsusy.algebra import NotInAlgebra, from_operators, generate, membership, tensor
from ncsusy.linalg import DimensionError

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def _block_diagonal_generator(rng, sizes):
    n = sum(sizes)
    out = np.zeros((n, n), dtype=complex)
    i = 0
    for k in sizes:
        out[i:i + k, i:i + k] = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        i += k
    return out


def test_diagonal_projection_generates_two_point_algebra():
    alg = generate([np.diag([1.0, 0.0])])
    assert alg.dim == 2
    assert alg.contains_identity


def test_random_matrix_generates_full_algebra():
    rng = np.random.default_rng(0)
    alg = generate([rng.standard_normal((3, 3))])
    assert alg.dim == 9
    assert alg.is_full_matrix_algebra


@given(seeds, st.lists(st.integers(1, 3), min_size=1, max_size=3))
def test_block_diagonal_generators_give_sum_of_squares(seed, sizes):
    rng = np.random.default_rng(seed)
    alg = generate([_block_diagonal_generator(rng, sizes) for _ in range(2)])
    assert alg.dim == sum(k * k for k in sizes)
    adj, prod = alg.closure_residuals()
    assert max(adj, prod) < 1e-10


@given(seeds)
def test_basis_is_hilbert_schmidt_orthonormal(seed):
    rng = np.random.default_rng(seed)
    alg = generate([_block_diagonal_generator(rng, [2, 1])])
    b = alg.basis.reshape(alg.dim, -1)
    assert np.allclose(b.conj() @ b.T, np.eye(alg.dim))


@given(seeds)
def test_coefficients_realize_round_trip(seed):
    rng = np.random.default_rng(seed)
    alg = generate([_block_diagonal_generator(rng, [2, 2])])
    x = alg.random_element(rng)
    assert alg.residual(x) < 1e-12
    assert np.allclose(alg.realize(alg.coefficients(x)), x)


def test_membership_rejects_outside_element():
    alg = generate([np.diag([1.0, 0.0])])
    with pytest.raises(NotInAlgebra):
        membership(np.array([[0, 1], [0, 0]]), alg)
    assert membership(np.diag([2.0, 3.0]), alg).matrix == pytest.approx(np.diag([2.0, 3.0]))


def test_tensor_dimension_and_faithfulness():
    a1 = generate([np.diag([1.0, 0.0])])
    a2 = generate([np.array([[0, 1], [1, 0]])])
    t = tensor(a1, a2)
    assert t.dim == a1.dim * a2.dim
    assert t.is_faithful


def test_faithfulness_rank_detects_repeated_operators():
    alg = from_operators([np.eye(2), np.eye(2)])
    assert alg.dim == 1
    assert alg.faithfulness_rank() == 1


def test_generate_validates_input():
    with pytest.raises(ValueError):
        generate([])
    with pytest.raises(DimensionError):
        generate([np.eye(2), np.eye(3)])
