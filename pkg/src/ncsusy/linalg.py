"""Dense complex linear algebra: tolerances, antilinear operators, subspaces, quotients.

Every construction in the package reduces to finite complex matrices. Linear
operators are plain ``numpy`` arrays; antilinear operators are stored as a matrix
``M`` with the action ``v -> M @ conj(v)`` so that composition signs are explicit.
Matrices are flattened column-major whenever they are treated as vectors.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "Tolerance",
    "DEFAULT_TOLERANCE",
    "get_tolerance",
    "set_tolerance",
    "using_tolerance",
    "resolve",
    "DimensionError",
    "adjoint",
    "commutator",
    "anticommutator",
    "opnorm",
    "Comparison",
    "op_equal",
    "vec",
    "unvec",
    "AntilinearOp",
    "Subspace",
    "span_closure",
    "Quotient",
    "quotient_by",
    "kernel_of_hermitian",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds used for equality and rank decisions.

    Attributes:
        eq_tol: Operator-norm threshold below which two operators count as equal.
        rank_tol: Relative singular-value cutoff used when computing spans.
    """

    eq_tol: float = 1e-10
    rank_tol: float = 1e-10

    def __post_init__(self) -> None:
        if not (0.0 < self.rank_tol <= self.eq_tol < 1.0):
            raise ValueError(
                f"need 0 < rank_tol <= eq_tol < 1, got rank_tol={self.rank_tol}, eq_tol={self.eq_tol}"
            )


DEFAULT_TOLERANCE = Tolerance()
_current: list[Tolerance] = [DEFAULT_TOLERANCE]


def get_tolerance() -> Tolerance:
    """Return the globally configured tolerance."""
    return _current[-1]


def set_tolerance(tol: Tolerance) -> None:
    """Replace the globally configured tolerance."""
    _current[-1] = tol


@contextlib.contextmanager
def using_tolerance(tol: Tolerance) -> Iterator[Tolerance]:
    """Temporarily install ``tol`` as the global tolerance."""
    _current.append(tol)
    try:
        yield tol
    finally:
        _current.pop()


def resolve(tol: Tolerance | None) -> Tolerance:
    """Return ``tol`` or the global default when it is ``None``."""
    return get_tolerance() if tol is None else tol


class DimensionError(ValueError):
    """Raised when operator shapes do not compose."""


def _check_square_pair(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape != y.shape or x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionError(f"incompatible operator shapes {x.shape} and {y.shape}")


def adjoint(x: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(x).conj().T


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Return ``xy - yx``."""
    _check_square_pair(x, y)
    return x @ y - y @ x


def anticommutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Return ``xy + yx``."""
    _check_square_pair(x, y)
    return x @ y + y @ x


def opnorm(x: np.ndarray) -> float:
    """Operator (spectral) norm; zero for empty matrices."""
    x = np.asarray(x)
    if x.size == 0:
        return 0.0
    if x.ndim == 1:
        return float(np.linalg.norm(x))
    if not np.any(x):
        return 0.0
    if min(x.shape) < 64:
        return float(np.linalg.norm(x, 2))
    # Largest eigenvalue of the smaller Gram matrix; it carries full relative accuracy.
    g = x.conj().T @ x if x.shape[1] <= x.shape[0] else x @ x.conj().T
    return float(np.sqrt(max(np.linalg.eigvalsh(g)[-1], 0.0)))


@dataclass(frozen=True)
class Comparison:
    """Outcome of an operator comparison; truthy when the operators agree."""

    equal: bool
    residual: float

    def __bool__(self) -> bool:
        return self.equal


def op_equal(x: np.ndarray, y: np.ndarray, tol: Tolerance | None = None) -> Comparison:
    """Compare two operators in operator norm.

    Args:
        x: First operator.
        y: Second operator, same shape as ``x``.
        tol: Tolerance; the global default when omitted.

    Returns:
        A :class:`Comparison` carrying the residual ``||x - y||``.
    """
    x, y = np.asarray(x), np.asarray(y)
    if x.shape != y.shape:
        raise DimensionError(f"cannot compare shapes {x.shape} and {y.shape}")
    residual = opnorm(x - y)
    return Comparison(residual <= resolve(tol).eq_tol, residual)


def vec(x: np.ndarray) -> np.ndarray:
    """Column-major flattening of a matrix."""
    return np.asarray(x).reshape(-1, order="F")


def unvec(v: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`vec` for square ``n x n`` matrices."""
    return np.asarray(v).reshape((n, n), order="F")


@dataclass(frozen=True, eq=False)
class AntilinearOp:
    """Antilinear operator ``v -> matrix @ conj(v)``.

    Composition follows the rules

    * antilinear @ antilinear is linear with matrix ``M_A conj(M_B)``,
    * antilinear @ linear is antilinear with matrix ``M_A conj(L)``,
    * linear @ antilinear is antilinear with matrix ``L M_A``.
    """

    matrix: np.ndarray

    __array_ufunc__ = None  # let numpy defer ``ndarray @ AntilinearOp`` to __rmatmul__

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2:
            raise DimensionError("antilinear operator needs a matrix")
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ np.conj(v)

    def __matmul__(self, other):
        if isinstance(other, AntilinearOp):
            return self.matrix @ other.matrix.conj()
        other = np.asarray(other)
        if other.ndim == 1:
            return self(other)
        return AntilinearOp(self.matrix @ other.conj())

    def __rmatmul__(self, other):
        return AntilinearOp(np.asarray(other) @ self.matrix)

    def inverse(self) -> "AntilinearOp":
        """Inverse antilinear map: ``w -> conj(M^{-1} w)``."""
        return AntilinearOp(np.linalg.inv(self.matrix).conj())

    def adjoint(self) -> "AntilinearOp":
        """Antilinear adjoint, defined by ``<Av, w> = conj(<v, A* w>)``."""
        return AntilinearOp(self.matrix.T)

    def conjugate(self, x: np.ndarray) -> np.ndarray:
        """Linear operator ``J x J^{-1}``."""
        return self.matrix @ np.asarray(x).conj() @ np.linalg.inv(self.matrix)

    def kron(self, other: "AntilinearOp") -> "AntilinearOp":
        """Tensor product, with a single conjugation on the product space."""
        return AntilinearOp(np.kron(self.matrix, other.matrix))

    def antiunitarity_residual(self) -> float:
        """``|| M^H M - 1 ||``; zero exactly for antiunitary operators."""
        m = self.matrix
        return opnorm(m.conj().T @ m - np.eye(m.shape[1]))


def _as_columns(vectors: Sequence[np.ndarray] | np.ndarray, ambient: int | None) -> np.ndarray:
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        return vectors.astype(complex, copy=False)
    cols = [vec(v) if np.ndim(v) == 2 else np.asarray(v) for v in vectors]
    if not cols:
        if ambient is None:
            raise ValueError("ambient dimension required for an empty span")
        return np.zeros((ambient, 0), dtype=complex)
    lengths = {c.shape[0] for c in cols}
    if len(lengths) != 1:
        raise DimensionError(f"vectors of inconsistent length {sorted(lengths)}")
    return np.stack(cols, axis=1).astype(complex)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of ``C^ambient`` given by orthonormal basis columns."""

    basis: np.ndarray
    tol: Tolerance = DEFAULT_TOLERANCE

    @property
    def ambient(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def distance(self, v: np.ndarray) -> float:
        """Norm of the component of ``v`` orthogonal to the subspace."""
        v = vec(v) if np.ndim(v) == 2 else np.asarray(v)
        return float(np.linalg.norm(v - self.basis @ (self.basis.conj().T @ v)))

    def contains(self, v: np.ndarray) -> bool:
        return self.distance(v) <= self.tol.eq_tol * max(1.0, float(np.linalg.norm(v)))

    def coordinates(self, v: np.ndarray) -> np.ndarray:
        return self.basis.conj().T @ v

    def __add__(self, other: "Subspace") -> "Subspace":
        return span_closure(np.hstack([self.basis, other.basis]), self.tol)

    def intersection_dim(self, other: "Subspace") -> int:
        return self.dim + other.dim - (self + other).dim

    def projector_distance(self, other: "Subspace") -> float:
        """Operator-norm distance between orthogonal projectors; zero iff equal."""
        return opnorm(self.projector - other.projector)

    def complement(self) -> "Subspace":
        """Orthogonal complement."""
        if self.dim == 0:
            return Subspace(np.eye(self.ambient, dtype=complex), self.tol)
        u, _, _ = np.linalg.svd(self.basis, full_matrices=True)
        return Subspace(u[:, self.dim:], self.tol)


def span_closure(
    vectors: Sequence[np.ndarray] | np.ndarray,
    tol: Tolerance | None = None,
    ambient: int | None = None,
) -> Subspace:
    """Orthonormal basis of the span of ``vectors``.

    Uses greedy Gram–Schmidt with reorthogonalization in input order, so the
    leading basis vectors are normalized versions of the leading inputs. A
    vector is kept when its residual exceeds ``rank_tol * max(1, norm)``.

    Args:
        vectors: Sequence of vectors or matrices (flattened column-major), or a
            2-D array whose columns are the vectors.
        tol: Tolerance; the global default when omitted.
        ambient: Ambient dimension, needed only for an empty input.
    """
    tol = resolve(tol)
    cols = _as_columns(vectors, ambient)
    n = cols.shape[0]
    basis = np.zeros((n, min(n, cols.shape[1])), dtype=complex)
    k = 0
    for j in range(cols.shape[1]):
        if k == n:
            break
        v = cols[:, j].copy()
        scale = max(1.0, float(np.linalg.norm(v)))
        for _ in range(2):
            v -= basis[:, :k] @ (basis[:, :k].conj().T @ v)
        r = float(np.linalg.norm(v))
        if r > tol.rank_tol * scale:
            basis[:, k] = v / r
            k += 1
    return Subspace(basis[:, :k].copy(), tol)


@dataclass(frozen=True, eq=False)
class Quotient:
    """Quotient of ``C^ambient`` by a relation subspace, modelled on its orthogonal complement.

    Attributes:
        basis: Orthonormal basis of the orthogonal complement of the relations;
            its columns are the canonical representatives of a quotient basis.
    """

    basis: np.ndarray
    tol: Tolerance = DEFAULT_TOLERANCE

    @property
    def ambient(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def representative(self, v: np.ndarray) -> np.ndarray:
        return self.basis @ (self.basis.conj().T @ v)

    def coordinates(self, v: np.ndarray) -> np.ndarray:
        return self.basis.conj().T @ v

    def section(self, coords: np.ndarray) -> np.ndarray:
        return self.basis @ coords

    def relations(self) -> Subspace:
        """Relation subspace, recovered as the orthogonal complement."""
        return Subspace(self.basis, self.tol).complement()


def quotient_by(ambient_dim: int, relations: Subspace) -> Quotient:
    """Quotient model of ``C^ambient_dim`` modulo ``relations``."""
    if relations.ambient != ambient_dim:
        raise DimensionError(
            f"relations live in dimension {relations.ambient}, not {ambient_dim}"
        )
    return Quotient(relations.complement().basis, relations.tol)


def kernel_of_hermitian(
    gram: np.ndarray, tol: Tolerance | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Split a positive semidefinite matrix into kernel and range.

    Eigenvalues at most ``rank_tol * max(1, lambda_max)`` are treated as zero.
    Because eigenvalues of a Gram matrix are squared singular values, this is a
    squared-singular-value cutoff.

    Returns:
        ``(kernel, range)`` as orthonormal column blocks.
    """
    tol = resolve(tol)
    n = gram.shape[0]
    if n == 0:
        empty = np.zeros((0, 0), dtype=complex)
        return empty, empty
    h = 0.5 * (gram + gram.conj().T)
    w, u = np.linalg.eigh(h)
    cutoff = tol.rank_tol * max(1.0, float(np.abs(w).max()))
    zero = w <= cutoff
    return u[:, zero], u[:, ~zero]
