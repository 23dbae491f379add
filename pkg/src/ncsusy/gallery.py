"""Shipped examples of N=1 and N=(1,1) data.

N=1 entries come with a real structure and a module presentation, so each
one is a complete :class:`~ncsusy.connections.Geometry`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import generate
from .connections import Geometry
from .extension import N11Data, phi
from .linalg import Tolerance, resolve
from .modules import canonical_product_hermitian, module_from_generators
from .spectral import N1Data, kasparov_product, real_structure, tensor_real_structure

__all__ = [
    "GalleryEntry",
    "N1_GALLERY",
    "N11_GALLERY",
    "GALLERY_PAIRS",
    "KASPAROV_PAIRS",
    "geometry",
    "n11_entry",
    "two_point",
    "matrix_m2",
    "trivial",
    "clifford4",
]

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2, dtype=complex)


def _swap(k: int) -> np.ndarray:
    """Permutation matrix of ``vec(X) -> vec(X^T)`` for ``k x k`` matrices (column-major)."""
    s = np.zeros((k * k, k * k))
    for i in range(k):
        for j in range(k):
            s[i * k + j, j * k + i] = 1.0
    return s


def trivial(tol: Tolerance | None = None) -> Geometry:
    """``A = C`` on ``H = C`` with ``D = 0``, ``gamma = 1`` and ``J`` complex conjugation."""
    tol = resolve(tol)
    one = np.ones((1, 1), dtype=complex)
    alg = generate([one], tol)
    data = N1Data(alg, np.zeros((1, 1)), one, "trivial")
    return Geometry(data, real_structure(data, one, tol), module_from_generators(alg, one, tol))


def two_point(mass: complex = 1.0, tol: Tolerance | None = None) -> Geometry:
    """Two-point space ``C (+) C`` on ``H = C^2 (x) C^2``.

    ``D = D0 (x) 1 + 1 (x) conj(D0)`` with ``D0 = [[0, m], [conj(m), 0]]``,
    ``gamma = sz (x) sz`` and ``J = swap o conj``.
    """
    tol = resolve(tol)
    alg = generate([np.kron(np.diag([1.0, 0.0]), I2)], tol)
    d0 = np.array([[0, mass], [np.conj(mass), 0]], dtype=complex)
    dirac = np.kron(d0, I2) + np.kron(I2, d0.conj())
    data = N1Data(alg, dirac, np.kron(SIGMA_Z, SIGMA_Z), "two-point")
    gens = np.array([[1, 0, 0, 1], [0, 1, 1, 0]], dtype=complex).T
    return Geometry(data, real_structure(data, _swap(2), tol), module_from_generators(alg, gens, tol))


def matrix_m2(m: np.ndarray | None = None, name: str = "matrix-m2", tol: Tolerance | None = None) -> Geometry:
    """``M_2(C)`` acting on ``H = M_2 (+) M_2`` by left multiplication.

    ``D`` is off-diagonal with block ``T x = m x + x m``, ``gamma = diag(1, -1)``
    on the two summands and ``J (x1, x2) = (x1^*, x2^*)``.
    """
    tol = resolve(tol)
    m = 1j * np.array([[1, 1], [1, -1]], dtype=complex) if m is None else np.asarray(m, dtype=complex)
    k = 2
    left = lambda a: np.kron(np.eye(k), a)  # noqa: E731
    right = lambda a: np.kron(a.T, np.eye(k))  # noqa: E731
    units = []
    for i in range(k):
        for j in range(k):
            e = np.zeros((k, k), dtype=complex)
            e[i, j] = 1.0
            units.append(np.kron(I2, left(e)))
    alg = generate(units, tol)
    t = left(m) + right(m.conj().T)
    z = np.zeros((4, 4))
    dirac = np.block([[z, t], [t.conj().T, z]])
    data = N1Data(alg, dirac, np.kron(SIGMA_Z, np.eye(4)), name)
    unit = np.eye(k).reshape(-1, order="F")
    gens = np.stack([np.concatenate([unit, np.zeros(4)]), np.concatenate([np.zeros(4), unit])], axis=1)
    return Geometry(data, real_structure(data, np.kron(I2, _swap(k)), tol),
                    module_from_generators(alg, gens.astype(complex), tol))


def matrix_m2_nonnormal(tol: Tolerance | None = None) -> Geometry:
    """Same as :func:`matrix_m2` with the non-normal ``m = [[1, 2], [0, -1]]``."""
    return matrix_m2(np.array([[1, 2], [0, -1]], dtype=complex), "matrix-m2-nonnormal", tol)


def product_geometry(g1: Geometry, g2: Geometry, tol: Tolerance | None = None) -> Geometry:
    """Kasparov product with ``J1 (x) J2`` and the product module."""
    tol = resolve(tol)
    data = kasparov_product(g1.data, g2.data)
    rs = tensor_real_structure(g1.real, g2.real, data, tol)
    return Geometry(data, rs, canonical_product_hermitian(g1.module, g2.module))


def clifford4(tol: Tolerance | None = None) -> N11Data:
    """Smallest nontrivial N=(1,1) data: ``A = C`` on ``C^2 (x) C^2``.

    ``D = 1 (x) sx``, ``Dbar = sx (x) sz``, ``gamma = sz (x) sz`` and ``hodge = 1 (x) sz``.
    """
    tol = resolve(tol)
    alg = generate([np.eye(4, dtype=complex)], tol)
    return N11Data(alg, np.kron(I2, SIGMA_X), np.kron(SIGMA_X, SIGMA_Z), np.kron(SIGMA_Z, SIGMA_Z),
                   np.kron(I2, SIGMA_Z), "clifford-4")


def trivial_n11(tol: Tolerance | None = None) -> N11Data:
    tol = resolve(tol)
    one = np.ones((1, 1), dtype=complex)
    zero = np.zeros((1, 1), dtype=complex)
    return N11Data(generate([one], tol), zero, zero, one, one, "trivial")


@dataclass(frozen=True)
class GalleryEntry:
    """A named example.

    Attributes:
        name: Gallery key.
        description: One-line summary for ``list-gallery``.
        build: Constructor taking a tolerance.
        extendable: Whether the Grassmann connection yields valid N=(1,1) data.
    """

    name: str
    description: str
    build: Callable
    extendable: bool = True


N1_GALLERY: dict[str, GalleryEntry] = {
    e.name: e
    for e in [
        GalleryEntry("trivial", "A = C on H = C with D = 0 (unit of the product)", trivial),
        GalleryEntry("two-point", "two-point space C + C on C^4, KO-dimension 0", lambda tol: two_point(tol=tol)),
        GalleryEntry("matrix-m2", "M_2(C) on M_2 + M_2 with normal inner Dirac block", lambda tol: matrix_m2(tol=tol)),
        GalleryEntry("matrix-m2-nonnormal", "M_2(C) with non-normal Dirac block (Grassmann extension fails)",
                     matrix_m2_nonnormal, extendable=False),
        GalleryEntry("two-point*matrix-m2", "Kasparov product of two-point and matrix-m2",
                     lambda tol: product_geometry(two_point(tol=tol), matrix_m2(tol=tol), tol)),
    ]
}

N11_GALLERY: dict[str, GalleryEntry] = {
    e.name: e
    for e in [
        GalleryEntry("trivial", "A = C on H = C with D = Dbar = 0", trivial_n11),
        GalleryEntry("clifford-4", "A = C on C^4 with Clifford-type D, Dbar", clifford4),
        GalleryEntry("phi-two-point", "extension of two-point with its Grassmann connection",
                     lambda tol: phi(two_point(tol=tol), tol=tol).n11),
        GalleryEntry("phi-matrix-m2", "extension of matrix-m2 with its Grassmann connection",
                     lambda tol: phi(matrix_m2(tol=tol), tol=tol).n11),
    ]
}

#: Pairs compared by the multiplicativity check.
GALLERY_PAIRS: tuple[tuple[str, str], ...] = (
    ("two-point", "two-point"),
    ("two-point", "matrix-m2"),
    ("matrix-m2", "two-point"),
    ("trivial", "two-point"),
    ("two-point", "trivial"),
    ("trivial", "trivial"),
)

#: Factors whose pairwise Kasparov products are checked.
KASPAROV_PAIRS: tuple[tuple[str, str], ...] = tuple(
    (a, b) for a in ("trivial", "two-point", "matrix-m2", "matrix-m2-nonnormal")
    for b in ("trivial", "two-point", "matrix-m2", "matrix-m2-nonnormal")
)


def geometry(name: str, tol: Tolerance | None = None) -> Geometry:
    """Build an N=1 gallery entry.

    Raises:
        KeyError: for an unknown name.
    """
    if name not in N1_GALLERY:
        raise KeyError(f"unknown N=1 gallery entry {name!r}; choose from {', '.join(N1_GALLERY)}")
    return N1_GALLERY[name].build(resolve(tol))


def n11_entry(name: str, tol: Tolerance | None = None) -> N11Data:
    """Build an N=(1,1) gallery entry.

    Raises:
        KeyError: for an unknown name.
    """
    if name not in N11_GALLERY:
        raise KeyError(f"unknown N=(1,1) gallery entry {name!r}; choose from {', '.join(N11_GALLERY)}")
    return N11_GALLERY[name].build(resolve(tol))
