"""Concrete unital *-algebras of matrices with Hilbert–Schmidt orthonormal bases."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .linalg import DimensionError, Tolerance, opnorm, resolve, span_closure, unvec, vec

__all__ = [
    "StarAlgebra",
    "AlgebraElement",
    "NotInAlgebra",
    "generate",
    "tensor",
    "membership",
    "from_operators",
]

log = logging.getLogger(__name__)


class NotInAlgebra(ValueError):
    """Raised by :func:`membership` when an operator lies outside the algebra."""

    def __init__(self, residual: float):
        super().__init__(f"operator is not in the algebra (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True, eq=False)
class StarAlgebra:
    """A unital *-closed subalgebra of ``M_N(C)``.

    Attributes:
        basis: Array of shape ``(dim, N, N)``, orthonormal for ``<X, Y> = Tr(X^* Y)``.
        tol: Tolerance the basis was computed with.
    """

    basis: np.ndarray
    tol: Tolerance

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def hilbert_dim(self) -> int:
        return self.basis.shape[1]

    @property
    def contains_identity(self) -> bool:
        return self.residual(np.eye(self.hilbert_dim)) <= self.tol.eq_tol

    @property
    def is_full_matrix_algebra(self) -> bool:
        return self.dim == self.hilbert_dim**2

    def coefficients(self, x: np.ndarray) -> np.ndarray:
        """Hilbert–Schmidt coefficients of ``x`` along the basis."""
        return np.einsum("kij,ij->k", self.basis.conj(), x)

    def realize(self, coeffs: np.ndarray) -> np.ndarray:
        return np.tensordot(coeffs, self.basis, axes=1)

    def residual(self, x: np.ndarray) -> float:
        """Operator-norm distance from ``x`` to the span of the basis."""
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.hilbert_dim, self.hilbert_dim):
            raise DimensionError(f"expected a {self.hilbert_dim}-square matrix, got {x.shape}")
        return opnorm(x - self.realize(self.coefficients(x)))

    def element(self, coeffs: np.ndarray) -> "AlgebraElement":
        return AlgebraElement(self, np.asarray(coeffs, dtype=complex))

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        c = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        return self.realize(c)

    def closure_residuals(self) -> tuple[float, float]:
        """Largest distance of basis adjoints and basis products from the span."""
        adj = max((self.residual(b.conj().T) for b in self.basis), default=0.0)
        prod = max(
            (self.residual(a @ b) for a in self.basis for b in self.basis), default=0.0
        )
        return adj, prod

    def faithfulness_rank(self) -> int:
        """Rank of the realization map from coefficients to operators."""
        if self.dim == 0:
            return 0
        mat = self.basis.reshape(self.dim, -1).T
        s = np.linalg.svd(mat, compute_uv=False)
        return int((s > self.tol.rank_tol * max(1.0, s[0])).sum())

    def is_faithful(self) -> bool:
        return self.faithfulness_rank() == self.dim


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """An element of a :class:`StarAlgebra` in basis coordinates."""

    algebra: StarAlgebra
    coefficients: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return self.algebra.realize(self.coefficients)


def _orthonormal_basis(ops: list[np.ndarray], n: int, tol: Tolerance) -> np.ndarray:
    sub = span_closure([vec(x) for x in ops], tol, ambient=n * n)
    return np.stack([unvec(sub.basis[:, k], n) for k in range(sub.dim)]) if sub.dim else (
        np.zeros((0, n, n), dtype=complex)
    )


def from_operators(ops, tol: Tolerance | None = None) -> StarAlgebra:
    """Wrap the span of ``ops`` as an algebra without closing it.

    The caller is responsible for ``ops`` spanning a unital *-algebra; use
    :func:`generate` when closure is needed.
    """
    tol = resolve(tol)
    ops = [np.asarray(x, dtype=complex) for x in ops]
    n = ops[0].shape[0]
    return StarAlgebra(_orthonormal_basis(ops, n, tol), tol)


def generate(generators, tol: Tolerance | None = None) -> StarAlgebra:
    """Smallest unital *-algebra containing ``generators``.

    Starts from the identity, the generators and their adjoints, then adds all
    pairwise products of basis elements until the dimension stabilizes.
    """
    tol = resolve(tol)
    gens = [np.asarray(g, dtype=complex) for g in generators]
    if not gens:
        raise ValueError("at least one generator is required")
    n = gens[0].shape[0]
    if any(g.shape != (n, n) for g in gens):
        raise DimensionError("generators must be square matrices of equal size")
    ops = [np.eye(n, dtype=complex)] + gens + [g.conj().T for g in gens]
    basis = _orthonormal_basis(ops, n, tol)
    while True:
        products = [a @ b for a in basis for b in basis]
        new = _orthonormal_basis(list(basis) + products, n, tol)
        if new.shape[0] == basis.shape[0]:
            break
        basis = new
    alg = StarAlgebra(basis, tol)
    if alg.is_full_matrix_algebra:
        log.info("generated algebra is the full matrix algebra M_%d", n)
    return alg


def tensor(a1: StarAlgebra, a2: StarAlgebra) -> StarAlgebra:
    """Algebra spanned by Kronecker products of the two bases.

    Kronecker products of orthonormal bases are again orthonormal, so no
    re-orthogonalization is needed.
    """
    basis = np.stack([np.kron(x, y) for x in a1.basis for y in a2.basis])
    return StarAlgebra(basis, a1.tol)


def membership(x: np.ndarray, alg: StarAlgebra, tol: Tolerance | None = None) -> AlgebraElement:
    """Express ``x`` in the algebra basis.

    Raises:
        NotInAlgebra: when the least-squares residual exceeds ``eq_tol``.
    """
    tol = resolve(tol)
    x = np.asarray(x, dtype=complex)
    coeffs = alg.coefficients(x)
    residual = opnorm(x - alg.realize(coeffs))
    if residual > tol.eq_tol:
        raise NotInAlgebra(residual)
    return AlgebraElement(alg, coeffs)
