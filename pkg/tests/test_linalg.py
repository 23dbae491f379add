import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncsusy.linalg import (
    AntilinearOp,
    DimensionError,
    Tolerance,
    anticommutator,
    commutator,
    kernel_of_hermitian,
    op_equal,
    opnorm,
    quotient_by,
    span_closure,
    unvec,
    vec,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def _rand(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@given(seeds, st.integers(1, 90), st.integers(1, 90))
def test_opnorm_matches_largest_singular_value(seed, r, c):
    x = _rand(np.random.default_rng(seed), r, c)
    ref = np.linalg.svd(x, compute_uv=False)[0]
    assert opnorm(x) == pytest.approx(ref, rel=1e-12)


def test_opnorm_of_empty_and_zero():
    assert opnorm(np.zeros((0, 0))) == 0.0
    assert opnorm(np.zeros((100, 100))) == 0.0


def test_opnorm_keeps_relative_accuracy_for_tiny_matrices():
    x = 1e-14 * _rand(np.random.default_rng(1), 80, 80)
    assert opnorm(x) == pytest.approx(np.linalg.norm(x, 2), rel=1e-12)


def test_commutator_rejects_mismatched_shapes():
    with pytest.raises(DimensionError):
        commutator(np.eye(2), np.eye(3))
    with pytest.raises(DimensionError):
        anticommutator(np.eye(2), np.eye(3))


def test_tolerance_validation():
    with pytest.raises(ValueError):
        Tolerance(eq_tol=1e-12, rank_tol=1e-10)
    with pytest.raises(ValueError):
        Tolerance(eq_tol=2.0)


def test_op_equal_reports_residual():
    cmp = op_equal(np.eye(2), np.eye(2) + 1e-3)
    assert not cmp
    assert cmp.residual == pytest.approx(2e-3)


@given(seeds, st.integers(1, 5))
def test_vec_unvec_round_trip(seed, n):
    x = _rand(np.random.default_rng(seed), n, n)
    assert np.array_equal(unvec(vec(x), n), x)


@given(seeds, st.integers(1, 5))
def test_antilinear_composition_laws(seed, n):
    rng = np.random.default_rng(seed)
    a = AntilinearOp(_rand(rng, n, n))
    b = AntilinearOp(_rand(rng, n, n))
    lin = _rand(rng, n, n)
    v = _rand(rng, n)
    assert np.allclose((a @ b) @ v, a(b(v)))
    assert np.allclose((a @ lin)(v), a(lin @ v))
    assert np.allclose((lin @ a)(v), lin @ a(v))
    z = complex(*rng.standard_normal(2))
    assert np.allclose(a(z * v), np.conj(z) * a(v))


@given(seeds, st.integers(1, 5))
def test_antilinear_inverse_and_antiunitarity(seed, n):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(_rand(rng, n, n))
    j = AntilinearOp(q)
    v = _rand(rng, n)
    assert np.allclose(j.inverse()(j(v)), v)
    assert j.antiunitarity_residual() < 1e-12
    w = _rand(rng, n)
    # antiunitary: <Jv, Jw> = conj(<v, w>)
    assert np.vdot(j(v), j(w)) == pytest.approx(np.conj(np.vdot(v, w)))


@given(seeds, st.integers(2, 8), st.integers(1, 4))
def test_span_closure_dimension_and_projector(seed, n, k):
    rng = np.random.default_rng(seed)
    base = _rand(rng, n, k)
    vectors = np.hstack([base, base @ _rand(rng, k, 2)])
    s = span_closure(vectors)
    assert s.dim == min(n, k)
    p = s.projector
    assert np.allclose(p @ p, p)
    assert np.allclose(p @ vectors, vectors)


@given(seeds, st.integers(2, 8), st.integers(0, 3))
def test_quotient_dimension(seed, n, k):
    k = min(k, n)
    rng = np.random.default_rng(seed)
    rel = span_closure(_rand(rng, n, k), ambient=n)
    q = quotient_by(n, rel)
    assert q.dim == n - k
    for col in rel.basis.T:
        assert np.linalg.norm(q.coordinates(col)) < 1e-10


@given(seeds, st.integers(1, 8), st.integers(0, 7))
def test_kernel_of_hermitian_splits_psd(seed, n, k):
    k = min(k, n)
    rng = np.random.default_rng(seed)
    b = _rand(rng, n, n - k)
    gram = b @ b.conj().T
    ker, ran = kernel_of_hermitian(gram)
    assert ker.shape[1] == k
    assert ker.shape[1] + ran.shape[1] == n
    assert np.linalg.norm(gram @ ker) < 1e-8 * max(1.0, np.linalg.norm(gram))
