"""Products of N=1 and N=(1,1) data: Kasparov closure, the six product rules, and the equivalence unitaries."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .algebra import tensor
from .extension import N11Data, verify_n11
from .linalg import Tolerance, opnorm, resolve
from .report import Report
from .spectral import N1Data, equivalence_unitaries, equivalence_unitary, kasparov_product, verify_n1

__all__ = [
    "Variant",
    "VARIANTS",
    "variant_operators",
    "n11_product",
    "associated_n1_equivalence",
    "DistanceTable",
    "variant_distinguisher",
    "heat_trace_residual",
    "product_reports",
    "kasparov_report",
]


class Variant(str, enum.Enum):
    """The six product rules for N=(1,1) data.

    With ``s`` the Hodge operator and ``g`` the grading of each factor:

    * ``main``: ``D1 x 1 + s1 x D2`` and ``Db1 x s2 + g1 x Db2``
    * ``v1``: ``D1 x 1 + s1 x D2`` and ``Db1 x g2 + s1 x Db2``
    * ``v2``: ``D1 x s2 + 1 x D2`` and ``Db1 x g2 + s1 x Db2``
    * ``v3``: ``D1 x s2 + 1 x D2`` and ``Db1 x s2 + g1 x Db2``
    * ``v4``: ``D1 x 1 + g1 x D2`` and ``Db1 x 1 + g1 x Db2``
    * ``v5``: ``D1 x g2 + 1 x D2`` and ``Db1 x g2 + 1 x Db2``
    """

    MAIN = "main"
    V1 = "v1"
    V2 = "v2"
    V3 = "v3"
    V4 = "v4"
    V5 = "v5"

    def __str__(self) -> str:
        return self.value


VARIANTS: tuple[Variant, ...] = tuple(Variant)


def variant_operators(x: N11Data, y: N11Data, variant: Variant | str) -> tuple[np.ndarray, np.ndarray]:
    """``(D, Dbar)`` of the product of ``x`` and ``y`` under ``variant``."""
    v = Variant(variant)
    k = np.kron
    i1, i2 = np.eye(x.hilbert_dim), np.eye(y.hilbert_dim)
    d1, b1, g1, s1 = x.dirac, x.dirac_bar, x.gamma, x.hodge
    d2, b2, g2, s2 = y.dirac, y.dirac_bar, y.gamma, y.hodge
    if v is Variant.MAIN:
        return k(d1, i2) + k(s1, d2), k(b1, s2) + k(g1, b2)
    if v is Variant.V1:
        return k(d1, i2) + k(s1, d2), k(b1, g2) + k(s1, b2)
    if v is Variant.V2:
        return k(d1, s2) + k(i1, d2), k(b1, g2) + k(s1, b2)
    if v is Variant.V3:
        return k(d1, s2) + k(i1, d2), k(b1, s2) + k(g1, b2)
    if v is Variant.V4:
        return k(d1, i2) + k(g1, d2), k(b1, i2) + k(g1, b2)
    return k(d1, g2) + k(i1, d2), k(b1, g2) + k(i1, b2)


def n11_product(x: N11Data, y: N11Data, variant: Variant | str = Variant.MAIN) -> N11Data:
    """Product data over ``A1 (x) A2`` with ``gamma1 (x) gamma2`` and ``hodge1 (x) hodge2``."""
    v = Variant(variant)
    dirac, dirac_bar = variant_operators(x, y, v)
    name = f"{x.name or 'x'}*{y.name or 'y'}[{v.value}]"
    return N11Data(tensor(x.algebra, y.algebra), dirac, dirac_bar, np.kron(x.gamma, y.gamma),
                   np.kron(x.hodge, y.hodge), name)


def associated_n1_equivalence(x: N11Data, y: N11Data, tol: Tolerance | None = None) -> Report:
    """Check that ``V U`` carries ``D1 x 1 + s1 x D2`` to the Kasparov operator ``D1 x 1 + g1 x D2``.

    ``U`` is built from ``(s1, g2)`` and ``V`` from ``(g1, g2)``.
    """
    tol = resolve(tol)
    rep = Report("associated-n1", f"{x.name or 'x'}*{y.name or 'y'}", tol.eq_tol)
    u, v = equivalence_unitaries(x.gamma, y.gamma, hodge1=x.hodge, tol=tol)
    n = u.shape[0]
    eye = np.eye(n)
    unit = max(opnorm(u.conj().T @ u - eye), opnorm(u @ u - eye), opnorm(v.conj().T @ v - eye), opnorm(v @ v - eye))
    rep.check("product.equivalence-unitary", "U and V are unitary involutions", unit)
    w = v @ u
    main = np.kron(x.dirac, np.eye(y.hilbert_dim)) + np.kron(x.hodge, y.dirac)
    kasparov = np.kron(x.dirac, np.eye(y.hilbert_dim)) + np.kron(x.gamma, y.dirac)
    rep.check("product.associated-n1-equivalence", "V U (D1 x 1 + s1 x D2) (V U)^* = D1 x 1 + g1 x D2",
              opnorm(w @ main @ w.conj().T - kasparov))
    return rep


@dataclass(frozen=True)
class DistanceTable:
    """Pairwise operator-norm distances between the variants.

    Attributes:
        variants: Row and column order.
        dirac: Distances between the ``D`` operators.
        dirac_bar: Distances between the ``Dbar`` operators.
    """

    variants: tuple[Variant, ...]
    dirac: np.ndarray
    dirac_bar: np.ndarray

    @property
    def combined(self) -> np.ndarray:
        return np.maximum(self.dirac, self.dirac_bar)

    def distance(self, a: Variant | str, b: Variant | str) -> float:
        i, j = self.variants.index(Variant(a)), self.variants.index(Variant(b))
        return float(self.combined[i, j])


def variant_distinguisher(x: N11Data, y: N11Data) -> DistanceTable:
    """Distances between the six product rules evaluated on ``x`` and ``y``."""
    ops = [variant_operators(x, y, v) for v in VARIANTS]
    k = len(ops)
    dd = np.zeros((k, k))
    db = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            dd[i, j] = dd[j, i] = opnorm(ops[i][0] - ops[j][0])
            db[i, j] = db[j, i] = opnorm(ops[i][1] - ops[j][1])
    return DistanceTable(VARIANTS, dd, db)


def _heat_trace(op: np.ndarray, t: float) -> float:
    w = np.linalg.eigvalsh(0.5 * (op + op.conj().T))
    return float(np.exp(-t * w**2).sum())


def heat_trace_residual(x: N11Data, y: N11Data, variant: Variant | str = Variant.MAIN, t: float = 1.0) -> float:
    """Relative defect of ``Tr exp(-t D^2) = Tr exp(-t D1^2) Tr exp(-t D2^2)`` for a product rule."""
    dirac, _ = variant_operators(x, y, variant)
    lhs = _heat_trace(dirac, t)
    rhs = _heat_trace(x.dirac, t) * _heat_trace(y.dirac, t)
    return abs(lhs - rhs) / max(1.0, abs(rhs))


def product_reports(x: N11Data, y: N11Data, variants=VARIANTS, tol: Tolerance | None = None) -> Report:
    """Verify every requested product rule, the heat-trace identity and the associated N=1 equivalence."""
    tol = resolve(tol)
    rep = Report("n11-products", f"{x.name or 'x'}*{y.name or 'y'}", tol.eq_tol)
    for v in variants:
        prod = n11_product(x, y, v)
        sub = verify_n11(prod, tol)
        rep.info("variant", variant=Variant(v).value, verdict="pass" if sub.passed else "fail",
                 checks=len(sub.checks), failed=len(sub.failures))
        rep.extend(sub)
    rep.check("product.heat-trace", "Tr exp(-D^2) factorizes for the main rule (relative defect)",
              heat_trace_residual(x, y))
    rep.extend(associated_n1_equivalence(x, y, tol))
    return rep


def kasparov_report(d1: N1Data, d2: N1Data, tol: Tolerance | None = None) -> Report:
    """Verify the Kasparov product of two N=1 data and the conventions relating its two Dirac operators."""
    tol = resolve(tol)
    prod = kasparov_product(d1, d2)
    rep = verify_n1(prod, tol)
    rep.command = "kasparov"
    i1, i2 = np.eye(d1.hilbert_dim), np.eye(d2.hilbert_dim)
    square = np.kron(d1.dirac @ d1.dirac, i2) + np.kron(i1, d2.dirac @ d2.dirac)
    rep.check("product.kasparov-square", "(D1 x 1 + g1 x D2)^2 = D1^2 x 1 + 1 x D2^2",
              opnorm(prod.dirac @ prod.dirac - square))
    u = equivalence_unitary(d1.gamma, d2.gamma, tol)
    swapped = kasparov_product(d1, d2, "swapped")
    rep.check("product.equivalence-unitary", "U is a unitary involution",
              max(opnorm(u.conj().T @ u - np.eye(u.shape[0])), opnorm(u @ u - np.eye(u.shape[0]))))
    rep.check("product.dirac-convention-equivalence", "U (D1 x 1 + g1 x D2) U^* = D1 x g2 + 1 x D2",
              opnorm(u @ prod.dirac @ u.conj().T - swapped.dirac))
    return rep
