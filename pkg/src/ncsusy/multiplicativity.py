"""Compare the extension of a product with the products of the extensions.

The extension of ``d1 (x) d2`` lives on ``(E1 (x) E2) (x)_A (E1 (x) E2)``; the
products of the two extensions live on ``(E1 (x)_A1 E1) (x) (E2 (x)_A2 E2)``.
The canonical isomorphism between them is the middle flip
``(x1 (x) x2) (x) (y1 (x) y2) -> (x1 (x) y1) (x) (x2 (x) y2)`` read in the
orthonormal models of both sides. Operators are transported from the first
space to the second and compared there.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .connections import Connection, Geometry, grassmann, product_connection, verify_connection
from .extension import PhiResult, phi
from .forms import ProductOneForms, product_one_forms
from .linalg import Tolerance, opnorm, resolve
from .modules import canonical_product_hermitian
from .products import VARIANTS, Variant, variant_distinguisher, variant_operators
from .report import Report
from .spectral import kasparov_product, tensor_real_structure

__all__ = [
    "WITNESS_THRESHOLD",
    "ProductSetup",
    "product_setup",
    "CanonicalIso",
    "canonical_iso",
    "VariantRow",
    "MultiplicativityResult",
    "check_multiplicativity",
    "product_pipeline_trace",
]

#: A variant counts as witnessed unequal when an operator differs by more than this.
WITNESS_THRESHOLD = 1e-6


def _as_connection(c: Connection | Geometry) -> Connection:
    return grassmann(c) if isinstance(c, Geometry) else c


@dataclass(frozen=True, eq=False)
class ProductSetup:
    """Both extensions, the product geometry with its product connection, and the extension of the product."""

    phi1: PhiResult
    phi2: PhiResult
    forms: ProductOneForms
    connection: Connection
    phi: PhiResult
    tol: Tolerance

    @property
    def geometry(self) -> Geometry:
        return self.connection.geometry

    @property
    def name(self) -> str:
        return f"{self.phi1.geometry.name}*{self.phi2.geometry.name}"

    @cached_property
    def iso(self) -> "CanonicalIso":
        return canonical_iso(self)


def product_setup(c1: Connection | Geometry, c2: Connection | Geometry, tol: Tolerance | None = None,
                  trace: bool | None = None) -> ProductSetup:
    """Extend both factors and their product.

    The product side uses the Kasparov product, the real structure ``J1 (x) J2``,
    the module ``E1 (x) E2`` with ``p1 (x) p2`` and the product connection.

    Raises:
        PreconditionFailed: when one of the three extensions has a failing hypothesis.
    """
    tol = resolve(tol)
    c1, c2 = _as_connection(c1), _as_connection(c2)
    g1, g2 = c1.geometry, c2.geometry
    phi1 = phi(c1, trace=trace, tol=tol)
    phi2 = phi(c2, trace=trace, tol=tol)
    data = kasparov_product(g1.data, g2.data)
    rs = tensor_real_structure(g1.real, g2.real, data, tol)
    module = canonical_product_hermitian(g1.module, g2.module)
    pf = product_one_forms(g1.forms, g2.forms, data, tol)
    gp = Geometry(data, rs, module, pf.forms)
    cp = product_connection(c1, c2, gp, pf.embed_left, pf.embed_right)
    return ProductSetup(phi1, phi2, pf, cp, phi(cp, trace=trace, tol=tol), tol)


def _swap_middle(x: np.ndarray, n1: int, n2: int, axis: int) -> np.ndarray:
    """Reorder an axis indexed by ``(i1, i2, j1, j2)`` into ``(i1, j1, i2, j2)``."""
    x = np.moveaxis(x, axis, 0)
    rest = x.shape[1:]
    y = x.reshape(n1, n2, n1, n2, *rest).transpose(0, 2, 1, 3, *range(4, 4 + len(rest)))
    return np.moveaxis(y.reshape(n1 * n1 * n2 * n2, *rest), 0, axis)


@dataclass(frozen=True, eq=False)
class CanonicalIso:
    """Unitary from the extended space of the product to the tensor product of the extended spaces.

    Attributes:
        matrix: ``(d1 d2, d)`` matrix in orthonormal coordinates.
        well_defined: How far the plain middle flip is from factoring through the quotient.
        unitary: ``max(||U^* U - 1||, ||U U^* - 1||)``, or the dimension gap when the sizes differ.
        algebra: Largest defect in intertwining the algebra actions.
        grading: Defect in carrying ``gamma (x) gamma`` to the product of the two gradings.
    """

    matrix: np.ndarray
    well_defined: float
    unitary: float
    algebra: float
    grading: float

    def transport(self, op: np.ndarray) -> np.ndarray:
        return self.matrix @ op @ self.matrix.conj().T

    def report(self, tol: Tolerance | None = None, name: str = "") -> Report:
        tol = resolve(tol)
        rep = Report("canonical-iso", name, tol.eq_tol)
        rep.info(source_dim=self.matrix.shape[1], target_dim=self.matrix.shape[0])
        rep.check("mult.iso-well-defined", "middle flip descends to the extended spaces", self.well_defined)
        rep.check("mult.iso-unitary", "identification is unitary", self.unitary)
        rep.check("mult.iso-intertwines-algebra", "identification intertwines the algebra actions", self.algebra)
        rep.check("mult.iso-intertwines-grading", "identification carries the grading to the product grading",
                  self.grading)
        return rep


def _left_compress(hil_coords: np.ndarray, section: np.ndarray, a: np.ndarray) -> np.ndarray:
    """``coords (a (x) 1) section`` without forming the Kronecker product."""
    n = a.shape[0]
    d = section.shape[1]
    moved = np.einsum("ab,bcd->acd", a, section.reshape(n, n, d)).reshape(n * n, d)
    return hil_coords @ moved


def canonical_iso(setup: ProductSetup) -> CanonicalIso:
    """Assemble the canonical isomorphism and measure its defects."""
    h1, h2 = setup.phi1.geometry.hilbert, setup.phi2.geometry.hilbert
    hp = setup.phi.geometry.hilbert
    n1, n2 = setup.phi1.geometry.hilbert_dim, setup.phi2.geometry.hilbert_dim
    coords = np.kron(h1.coords, h2.coords)  # columns indexed (i1, j1, i2, j2)
    flipped = _swap_middle(hp.section, n1, n2, axis=0)
    u = coords @ flipped
    # coords after the flip, as a map on plain product vectors indexed (i1, i2, j1, j2)
    d = coords.shape[0]
    pulled = coords.reshape(d, n1, n1, n2, n2).transpose(0, 1, 3, 2, 4).reshape(d, -1)
    well = opnorm(pulled - u @ hp.coords)
    if u.shape[0] == u.shape[1]:
        eye = np.eye(u.shape[0])
        unit = max(opnorm(u.conj().T @ u - eye), opnorm(u @ u.conj().T - eye))
    else:
        unit = float(abs(u.shape[0] - u.shape[1]))
    worst = 0.0
    b1 = setup.phi1.geometry.data.algebra.basis
    b2 = setup.phi2.geometry.data.algebra.basis
    left1 = [_left_compress(h1.coords, h1.section, a) for a in b1]
    left2 = [_left_compress(h2.coords, h2.section, a) for a in b2]
    for i, a1 in enumerate(b1):
        for j, a2 in enumerate(b2):
            lhs = u @ _left_compress(hp.coords, hp.section, np.kron(a1, a2)) @ u.conj().T
            worst = max(worst, opnorm(lhs - np.kron(left1[i], left2[j])))
    x1, x2 = setup.phi1.n11, setup.phi2.n11
    grading = opnorm(u @ setup.phi.n11.gamma @ u.conj().T - np.kron(x1.gamma, x2.gamma))
    return CanonicalIso(u, well, unit, worst, grading)


def _spectral_distance(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        return float("inf")
    wa = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
    wb = np.linalg.eigvalsh(0.5 * (b + b.conj().T))
    return float(np.abs(wa - wb).max()) if wa.size else 0.0


@dataclass(frozen=True)
class VariantRow:
    """Comparison of the transported extension of the product with one product rule.

    Attributes:
        variant: The product rule.
        dirac: ``||U D U^* - D_v||``.
        dirac_bar: ``||U Dbar U^* - Dbar_v||``.
        spectrum_dirac: Largest gap between the sorted spectra of the two ``D``.
        spectrum_dirac_bar: Same for ``Dbar``.
        eq_tol: Equality threshold used for the verdict.
    """

    variant: Variant
    dirac: float
    dirac_bar: float
    spectrum_dirac: float
    spectrum_dirac_bar: float
    eq_tol: float

    @property
    def residual(self) -> float:
        return max(self.dirac, self.dirac_bar)

    @property
    def verdict(self) -> str:
        if self.residual <= self.eq_tol:
            return "equal"
        if self.residual > WITNESS_THRESHOLD:
            return "unequal"
        return "inconclusive"

    @property
    def witnessed(self) -> bool:
        return self.verdict == "unequal"


@dataclass(frozen=True, eq=False)
class MultiplicativityResult:
    """Verdict table over the requested product rules.

    Attributes:
        setup: The extensions that were compared.
        rows: One row per requested variant, in the canonical order.
        degenerate: All six product rules coincide on this pair, so no rule can be singled out.
        report: Machine-readable report.
    """

    setup: ProductSetup
    rows: tuple[VariantRow, ...]
    degenerate: bool
    report: Report

    def row(self, variant: Variant | str) -> VariantRow:
        v = Variant(variant)
        for r in self.rows:
            if r.variant is v:
                return r
        raise KeyError(v.value)

    @property
    def ok(self) -> bool:
        """Main is equal, every requested other rule is witnessed unequal, and all three extensions pass."""
        if not all(res.passed for res in (self.setup.phi1, self.setup.phi2, self.setup.phi)):
            return False
        for r in self.rows:
            if r.variant is Variant.MAIN and r.verdict != "equal":
                return False
            if r.variant is not Variant.MAIN and not r.witnessed:
                return False
        return self.report.passed


def check_multiplicativity(setup: ProductSetup, variants=VARIANTS, tol: Tolerance | None = None) -> MultiplicativityResult:
    """Transport the extension of the product and compare it with each requested product rule."""
    tol = resolve(tol)
    wanted = [Variant(v) for v in variants]
    ordered = tuple(v for v in VARIANTS if v in wanted)
    rep = Report("check-mult", setup.name, tol.eq_tol)
    for label, res in (("first", setup.phi1), ("second", setup.phi2), ("product", setup.phi)):
        rep.info("stage", factor=label, input=res.n11.name, verdict="pass" if res.passed else "fail",
                 checks=len(res.report.checks), failed=len(res.report.failures), dim=res.n11.hilbert_dim)
        rep.entries.extend(res.report.failures)
    iso = setup.iso
    rep.extend(iso.report(tol, setup.name))
    x1, x2, xp = setup.phi1.n11, setup.phi2.n11, setup.phi.n11
    dirac, dirac_bar = iso.transport(xp.dirac), iso.transport(xp.dirac_bar)
    gap = max(_spectral_distance(xp.dirac, dirac), _spectral_distance(xp.dirac_bar, dirac_bar))
    rep.check("mult.spectrum", "transport preserves the spectra of D and Dbar", gap)
    rep.check("mult.hodge-transport", "identification carries 1 (x) gamma to the product of the Hodge operators",
              opnorm(iso.transport(xp.hodge) - np.kron(x1.hodge, x2.hodge)))
    rows = []
    for v in ordered:
        dv, bv = variant_operators(x1, x2, v)
        row = VariantRow(v, opnorm(dirac - dv), opnorm(dirac_bar - bv), _spectral_distance(dirac, dv),
                         _spectral_distance(dirac_bar, bv), tol.eq_tol)
        rows.append(row)
        if v is Variant.MAIN:
            rep.check("mult.variant-dirac", "transported D equals D1 x 1 + s1 x D2", row.dirac)
            rep.check("mult.variant-dirac-bar", "transported Dbar equals Db1 x s2 + g1 x Db2", row.dirac_bar)
        rep.info("variant", variant=v.value, verdict=row.verdict, dirac=row.dirac, dirac_bar=row.dirac_bar,
                 spectrum_dirac=row.spectrum_dirac, spectrum_dirac_bar=row.spectrum_dirac_bar)
    table = variant_distinguisher(x1, x2)
    degenerate = bool(table.combined.max() <= tol.eq_tol) if table.combined.size else True
    witnessed = [r.variant.value for r in rows if r.witnessed]
    main = next((r.verdict for r in rows if r.variant is Variant.MAIN), "not-requested")
    rep.info("multiplicativity", main=main, witnessed=",".join(witnessed) or "none",
             degenerate="true" if degenerate else "false")
    return MultiplicativityResult(setup, tuple(rows), degenerate, rep)


# ---------------------------------------------------------------------------
# step-by-step trace


def _quotient_residual(target: np.ndarray, op: np.ndarray, source: np.ndarray) -> float:
    return opnorm(target.conj().T @ op @ source)


def _well_defined(target: np.ndarray, op: np.ndarray, source: np.ndarray) -> float:
    y = target.conj().T @ op
    return opnorm(y - (y @ source) @ source.conj().T)


def _bijection_defect(target: np.ndarray, pieces: list[tuple[np.ndarray, np.ndarray]], tol: Tolerance) -> float:
    """Dimension defect of ``sum_k op_k`` on ``(+)_k source_k`` onto the target quotient."""
    blocks = [target.conj().T @ op @ src for op, src in pieces]
    mat = np.hstack(blocks)
    if mat.size == 0:
        return float(abs(mat.shape[0] - mat.shape[1]))
    s = np.linalg.svd(mat, compute_uv=False)
    rank = int((s > tol.rank_tol * max(1.0, s[0])).sum())
    return float(abs(mat.shape[0] - rank) + abs(mat.shape[1] - rank))


def product_pipeline_trace(setup: ProductSetup, tol: Tolerance | None = None) -> Report:
    """Compare every intermediate object of the product extension with its factorized form.

    Requires the triple tensor products and contractions to be materialized in
    all three extensions.
    """
    tol = resolve(tol)
    p1, p2, pp = setup.phi1, setup.phi2, setup.phi
    if p1.tensored is None or p2.tensored is None or pp.tensored is None:
        raise ValueError("trace needs materialized contractions; rebuild the setup with trace=True")
    g1, g2, gp = p1.geometry, p2.geometry, pp.geometry
    pf = setup.forms
    n1, n2 = g1.hilbert_dim, g2.hilbert_dim
    m1, m2, m = g1.forms.dim, g2.forms.dim, gp.forms.dim
    n = n1 * n2
    e1, e2 = np.eye(n1), np.eye(n2)
    lam1, lam2 = pf.embed_left, pf.embed_right
    rep = Report("trace", setup.name, tol.eq_tol)

    rep.info("forms", dim_product=m, dim_first=m1, dim_second=m2,
             expected=m1 * g2.data.algebra.dim + g1.data.algebra.dim * m2)
    rep.extend(pf.report(tol))

    h1, h2, hp = g1.module.inner_table, g2.module.inner_table, gp.module.inner_table
    fact = np.einsum("ijab,klcd->ikjlacbd", h1, h2).reshape(hp.shape)
    rep.check("trace.hermitian-factorizes", "<x1 x2, y1 y2> = <x1, y1> (x) <x2, y2> on basis vectors",
              float(np.abs(hp - fact).max()) if hp.size else 0.0)

    rep.extend(verify_connection(setup.connection, tol))
    q_oe = gp.omega_e.basis
    if p1.connection.label == "grassmann" and p2.connection.label == "grassmann":
        rep.check("trace.connection-grassmann", "product of Grassmann connections is the Grassmann connection",
                  _quotient_residual(q_oe, setup.connection.matrix - grassmann(gp).matrix, np.eye(n)))

    # Omega (x) E pieces and E (x) Omega pieces
    iota1 = np.einsum("Kk,ab,cd->Kackbd", lam1, e1, e2).reshape(m * n, m1 * n1 * n2)
    iota2 = np.einsum("Kk,ab,cd->Kacbkd", lam2, e1, e2).reshape(m * n, n1 * m2 * n2)
    kappa1 = np.einsum("Kk,ab,cd->acKbkd", lam1, e1, e2).reshape(n * m, n1 * m1 * n2)
    kappa2 = np.einsum("Kk,ab,cd->acKbdk", lam2, e1, e2).reshape(n * m, n1 * n2 * m2)
    s_oe1 = np.kron(g1.omega_e.basis, e2)
    s_oe2 = np.kron(e1, g2.omega_e.basis)
    s_eo1 = np.kron(g1.e_omega.basis, e2)
    s_eo2 = np.kron(e1, g2.e_omega.basis)
    q_eo = gp.e_omega.basis
    rep.check("trace.iso-forms-module",
              "(Omega1 (x) E1) (x) E2 (+) E1 (x) (Omega2 (x) E2) maps well and bijectively onto Omega (x) E",
              max(_well_defined(q_oe, iota1, s_oe1), _well_defined(q_oe, iota2, s_oe2),
                  _bijection_defect(q_oe, [(iota1, s_oe1), (iota2, s_oe2)], tol)))
    rep.check("trace.iso-module-forms",
              "(E1 (x) Omega1) (x) E2 (+) E1 (x) (E2 (x) Omega2) maps well and bijectively onto E (x) Omega",
              max(_well_defined(q_eo, kappa1, s_eo1), _well_defined(q_eo, kappa2, s_eo2),
                  _bijection_defect(q_eo, [(kappa1, s_eo1), (kappa2, s_eo2)], tol)))

    j1, j2 = g1.real.J.matrix, g2.real.J.matrix
    psi, psi1, psi2 = gp.psi.matrix, g1.psi.matrix, g2.psi.matrix
    flip = max(_quotient_residual(q_eo, psi @ iota1 - kappa1 @ np.kron(psi1, j2), s_oe1.conj()),
               _quotient_residual(q_eo, psi @ iota2 - kappa2 @ np.kron(j1, psi2), s_oe2.conj()))
    rep.check("trace.flip", "flip of the product is flip1 (x) J2 (+) J1 (x) flip2", flip)

    right = kappa1 @ np.kron(p1.right, e2) + kappa2 @ np.kron(e1, p2.right)
    rep.check("trace.right-connection", "right connection of the product is nabla_bar1 (x) 1 + 1 (x) nabla_bar2",
              _quotient_residual(q_eo, pp.right - right, np.eye(n)))

    # triple products
    t1 = np.einsum("ai,bj,Kk,cl,dm->abKcdikljm", e1, e2, lam1, e1, e2).reshape(n * m * n, -1)
    t2 = np.einsum("ai,bj,Kk,cl,dm->abKcdiljkm", e1, e2, lam2, e1, e2).reshape(n * m * n, -1)
    q3 = gp.e_omega_e.basis
    q11, q22 = g1.hilbert.space.basis, g2.hilbert.space.basis
    s_t1 = np.kron(g1.e_omega_e.basis, q22)
    s_t2 = np.kron(q11, g2.e_omega_e.basis)
    rep.check("trace.iso-triple",
              "(E1 (x) Omega1 (x) E1) (x) (E2 (x) E2) (+) (E1 (x) E1) (x) (E2 (x) Omega2 (x) E2) "
              "maps well and bijectively onto E (x) Omega (x) E",
              max(_well_defined(q3, t1, s_t1), _well_defined(q3, t2, s_t2),
                  _bijection_defect(q3, [(t1, s_t1), (t2, s_t2)], tol)))

    flip_rows = _swap_middle(np.eye(n * n), n1, n2, axis=0)  # plain (i1, i2, j1, j2) -> (i1, j1, i2, j2)
    tens = (t1 @ np.kron(p1.tensored.matrix, np.eye(n2 * n2)) + t2 @ np.kron(np.eye(n1 * n1), p2.tensored.matrix))
    rep.check("trace.tensored-connection", "tensored connection of the product is nabla~1 (x) 1 + 1 (x) nabla~2",
              _quotient_residual(q3, pp.tensored.matrix - tens @ flip_rows, gp.hilbert.space.basis))

    coords = np.kron(p1.geometry.hilbert.coords, p2.geometry.hilbert.coords)
    c, cbar = pp.contraction
    c1, cbar1 = p1.contraction
    c2, cbar2 = p2.contraction
    star1 = np.kron(e1, g1.data.gamma)
    star2 = np.kron(e2, g2.data.gamma)
    gg1 = np.kron(g1.data.gamma, g1.data.gamma)
    i22, i11 = np.eye(n2 * n2), np.eye(n1 * n1)
    contraction = max(
        opnorm(coords @ (flip_rows @ c @ t1 - np.kron(c1, i22)) @ s_t1),
        opnorm(coords @ (flip_rows @ c @ t2 - np.kron(star1, c2)) @ s_t2),
    )
    rep.check("trace.contraction", "contraction of the product is c1 (x) 1 (+) s1 (x) c2", contraction)
    contraction_bar = max(
        opnorm(coords @ (flip_rows @ cbar @ t1 - np.kron(cbar1, star2)) @ s_t1),
        opnorm(coords @ (flip_rows @ cbar @ t2 - np.kron(gg1, cbar2)) @ s_t2),
    )
    rep.check("trace.contraction-bar", "second contraction of the product is cbar1 (x) s2 (+) (g1 (x) g1) (x) cbar2",
              contraction_bar)

    iso = setup.iso
    x1, x2, xp = p1.n11, p2.n11, pp.n11
    dv, bv = variant_operators(x1, x2, Variant.MAIN)
    rep.check("trace.dirac", "transported D equals D1 x 1 + s1 x D2", opnorm(iso.transport(xp.dirac) - dv))
    rep.check("trace.dirac-bar", "transported Dbar equals Db1 x s2 + g1 x Db2",
              opnorm(iso.transport(xp.dirac_bar) - bv))
    return rep
