"""Noncommutative one-forms, the Dirac differential and J-induced right actions."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .linalg import Subspace, Tolerance, opnorm, resolve, span_closure, unvec, vec
from .report import Report
from .spectral import N1Data, RealStructure

__all__ = [
    "OneForms",
    "one_forms",
    "dirac_d",
    "BimoduleActions",
    "FirstOrderViolation",
    "bimodule_actions",
    "ProductOneForms",
    "product_one_forms",
]


@dataclass(frozen=True, eq=False)
class OneForms:
    """The bimodule of one-forms ``span{a [D, b]}`` with an orthonormal operator basis.

    Coordinates of a one-form are its Hilbert–Schmidt coefficients along
    :attr:`basis`. Left and right multiplication by algebra basis elements act
    on coordinates through :attr:`left_ops` and :attr:`right_ops`.

    Attributes:
        data: The N=1 data the forms belong to.
        basis: Array of shape ``(m, N, N)``.
    """

    data: N1Data
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def tol(self) -> Tolerance:
        return self.data.tol

    def coords(self, op: np.ndarray) -> np.ndarray:
        """Coordinates of an operator (exact when it is a one-form)."""
        return np.einsum("kij,ij->k", self.basis.conj(), op)

    def realize(self, coords: np.ndarray) -> np.ndarray:
        return np.tensordot(coords, self.basis, axes=1)

    def distance(self, op: np.ndarray) -> float:
        """Operator-norm distance from ``op`` to the space of one-forms."""
        return opnorm(op - self.realize(self.coords(op)))

    def subspace(self) -> Subspace:
        n = self.data.hilbert_dim
        cols = np.stack([vec(w) for w in self.basis], axis=1) if self.dim else np.zeros((n * n, 0))
        return Subspace(cols.astype(complex), self.tol)

    def d(self, a: np.ndarray) -> np.ndarray:
        """Coordinates of ``[D, a]``."""
        return self.coords(self.data.d(a))

    @cached_property
    def left_ops(self) -> np.ndarray:
        """``(dim A, m, m)``: coordinates of ``a W_k`` as columns."""
        if not self.dim:
            return self._empty_ops()
        return np.einsum("lij,aik,mkj->alm", self.basis.conj(), self.data.algebra.basis, self.basis,
                         optimize=True)

    @cached_property
    def right_ops(self) -> np.ndarray:
        """``(dim A, m, m)``: coordinates of ``W_k a`` as columns."""
        if not self.dim:
            return self._empty_ops()
        return np.einsum("lij,mik,akj->alm", self.basis.conj(), self.basis, self.data.algebra.basis,
                         optimize=True)

    @cached_property
    def star(self) -> np.ndarray:
        """``(m, m)``: column ``k`` holds the coordinates of ``W_k^*``."""
        return np.einsum("lij,kji->lk", self.basis.conj(), self.basis.conj())

    def _empty_ops(self) -> np.ndarray:
        return np.zeros((self.data.algebra.dim, 0, 0), dtype=complex)

    def bimodule_residual(self) -> float:
        """Largest distance of ``a W_k`` and ``W_k a`` from the span."""
        worst = 0.0
        for a in self.data.algebra.basis:
            for w in self.basis:
                worst = max(worst, self.distance(a @ w), self.distance(w @ a))
        return worst

    def star_residual(self) -> float:
        """Largest ``||[D, a]^* + [D, a^*]||`` over the algebra basis."""
        return max(
            (opnorm(self.data.d(a).conj().T + self.data.d(a.conj().T)) for a in self.data.algebra.basis),
            default=0.0,
        )

    def report(self, tol: Tolerance | None = None) -> Report:
        """Checks that the span is a bimodule closed under the adjoint."""
        tol = resolve(tol) if tol is not None else self.tol
        rep = Report("one-forms", self.data.name, tol.eq_tol)
        rep.info("one_forms", dim=self.dim)
        rep.check("forms.bimodule", "a [D, b] and [D, b] a stay in the span of one-forms", self.bimodule_residual())
        rep.check("forms.star-convention", "[D, a]^* = -[D, a^*] on the algebra basis", self.star_residual())
        return rep


def one_forms(data: N1Data, tol: Tolerance | None = None) -> OneForms:
    """Span of ``a_i [D, a_j]`` over the algebra basis."""
    tol = resolve(tol)
    n = data.hilbert_dim
    basis = data.algebra.basis
    ops = [vec(a @ data.d(b)) for a in basis for b in basis]
    sub = span_closure(ops, tol, ambient=n * n)
    mats = np.stack([unvec(sub.basis[:, k], n) for k in range(sub.dim)]) if sub.dim else (
        np.zeros((0, n, n), dtype=complex)
    )
    return OneForms(data, mats)


def dirac_d(forms: OneForms, a: np.ndarray) -> np.ndarray:
    """``d(a) = [D, a]`` expressed in the one-form basis."""
    return forms.d(a)


class FirstOrderViolation(ValueError):
    """The right action does not commute with the left action or with one-forms."""


@dataclass(frozen=True, eq=False)
class BimoduleActions:
    """Right actions ``xi . b = J b^* J^* xi`` and ``xi . w = J w^* J^* xi`` on ``H``.

    Attributes:
        forms: The one-forms whose right action is tabulated.
        real: The real structure inducing the actions.
        right_algebra: ``(dim A, N, N)`` right action of each algebra basis element.
        right_forms: ``(m, N, N)`` right action of each one-form basis element.
    """

    forms: OneForms
    real: RealStructure
    right_algebra: np.ndarray
    right_forms: np.ndarray

    @property
    def data(self) -> N1Data:
        return self.forms.data

    def right(self, b: np.ndarray) -> np.ndarray:
        return self.real.right(b)

    def commutation_residual(self) -> float:
        """Largest commutator between left actions (algebra and forms) and right actions."""
        worst = 0.0
        left = list(self.data.algebra.basis) + list(self.forms.basis)
        for r in self.right_algebra:
            for x in left:
                worst = max(worst, opnorm(x @ r - r @ x))
        return worst


def bimodule_actions(forms: OneForms, rs: RealStructure, tol: Tolerance | None = None) -> BimoduleActions:
    """Tabulate the J-induced right actions.

    Raises:
        FirstOrderViolation: if right actions fail to commute with the algebra or
            with the one-forms beyond ``eq_tol``.
    """
    tol = resolve(tol)
    right_alg = np.stack([rs.right(a) for a in forms.data.algebra.basis])
    n = forms.data.hilbert_dim
    right_forms = (np.stack([rs.right(w) for w in forms.basis]) if forms.dim
                   else np.zeros((0, n, n), dtype=complex))
    acts = BimoduleActions(forms, rs, right_alg, right_forms)
    r = acts.commutation_residual()
    if r > tol.eq_tol:
        raise FirstOrderViolation(f"right action fails to commute with left action or one-forms ({r:.3e})")
    return acts


@dataclass(frozen=True, eq=False)
class ProductOneForms:
    """One-forms of a product and their decomposition into the two summands.

    Attributes:
        forms: One-forms of the product data.
        embed_left: ``(m, m1)`` coordinates of ``w1 x 1`` for each basis form ``w1``.
        embed_right: ``(m, m2)`` coordinates of ``gamma1 x w2`` for each basis form ``w2``.
        first: Span of ``w1 x a2``.
        second: Span of ``a1 gamma1 x w2``.
    """

    forms: OneForms
    f1: OneForms
    f2: OneForms
    embed_left: np.ndarray
    embed_right: np.ndarray
    first: Subspace
    second: Subspace

    def report(self, tol: Tolerance | None = None) -> Report:
        tol = resolve(tol)
        rep = Report("product-forms", self.forms.data.name, tol.eq_tol)
        total = self.first + self.second
        rep.info(dim_forms=self.forms.dim, dim_first=self.first.dim, dim_second=self.second.dim)
        rep.check("trace.forms-sum", "one-forms of the product equal the sum of the two summands",
                  total.projector_distance(self.forms.subspace()))
        rep.check("trace.forms-direct", "the two summands intersect trivially (overlap dimension)",
                  float(self.first.intersection_dim(self.second)))
        rep.check("trace.differential", "[D, a1 x a2] = [D1, a1] x a2 + gamma1 a1 x [D2, a2]",
                  self.differential_residual())
        return rep

    def differential_residual(self) -> float:
        d1, d2, d = self.f1.data, self.f2.data, self.forms.data
        worst = 0.0
        for a1 in d1.algebra.basis:
            for a2 in d2.algebra.basis:
                lhs = d.d(np.kron(a1, a2))
                rhs = np.kron(d1.d(a1), a2) + np.kron(d1.gamma @ a1, d2.d(a2))
                worst = max(worst, opnorm(lhs - rhs))
        return worst


def product_one_forms(f1: OneForms, f2: OneForms, product: N1Data,
                      tol: Tolerance | None = None) -> ProductOneForms:
    """Decompose the one-forms of ``product`` (a Kasparov product) into the two summands."""
    tol = resolve(tol)
    d1, d2 = f1.data, f2.data
    forms = one_forms(product, tol)
    i2 = np.eye(d2.hilbert_dim)
    left_ops = [np.kron(w, i2) for w in f1.basis]
    right_ops = [np.kron(d1.gamma, w) for w in f2.basis]
    m = forms.dim
    embed_left = (np.stack([forms.coords(x) for x in left_ops], axis=1) if left_ops
                  else np.zeros((m, 0), dtype=complex))
    embed_right = (np.stack([forms.coords(x) for x in right_ops], axis=1) if right_ops
                   else np.zeros((m, 0), dtype=complex))
    nn = product.hilbert_dim ** 2
    first = span_closure([vec(np.kron(w, a2)) for w in f1.basis for a2 in d2.algebra.basis], tol, nn)
    second = span_closure(
        [vec(np.kron(a1 @ d1.gamma, w)) for a1 in d1.algebra.basis for w in f2.basis], tol, nn
    )
    for x in left_ops + right_ops:
        if forms.distance(x) > tol.eq_tol:
            raise ValueError("factor one-form does not embed into the product one-forms")
    return ProductOneForms(forms, f1, f2, embed_left, embed_right, first, second)
