"""Compatible connections, the antilinear flip, and the induced right and tensored connections.

All maps are stored as matrices between plain tensor products whose index
orders are:

* ``Omega (x) E``: ``(k, i)`` with ``k`` a one-form basis index,
* ``E (x) Omega``: ``(i, k)``,
* ``E (x) Omega (x) E``: ``(i, k, j)``.

Well-definedness on the balanced quotients is verified, never assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .forms import BimoduleActions, OneForms, bimodule_actions, one_forms
from .linalg import Tolerance, opnorm, resolve
from .modules import (
    BalancedTensorSpace,
    HermitianModule,
    TensorHilbertSpace,
    balanced_tensor,
    forms_factor,
    hilbert_tensor,
    module_factor,
)
from .report import Report
from .spectral import N1Data, RealStructure

__all__ = [
    "Geometry",
    "Connection",
    "grassmann",
    "perturbation_matrix",
    "perturbed",
    "random_connection_form",
    "generator_parities",
    "verify_connection",
    "FlipMap",
    "flip_psi",
    "right_connection",
    "TensoredConnection",
    "tensored_connection",
    "product_connection",
]


@dataclass(frozen=True, eq=False)
class Geometry:
    """N=1 data with a real structure and a Hermitian module, plus derived spaces.

    Derived objects (one-forms, right actions, balanced tensor products) are
    computed lazily and cached.

    Attributes:
        data: The N=1 spectral data.
        real: The real structure.
        module: The Hermitian module ``E`` realized in ``H``.
        preset_forms: Optional precomputed one-forms (used for products so that
            the decomposition and the connection share one basis).
    """

    data: N1Data
    real: RealStructure
    module: HermitianModule
    preset_forms: OneForms | None = None

    @property
    def name(self) -> str:
        return self.data.name

    @property
    def tol(self) -> Tolerance:
        return self.data.tol

    @property
    def hilbert_dim(self) -> int:
        return self.data.hilbert_dim

    @cached_property
    def forms(self) -> OneForms:
        return self.preset_forms if self.preset_forms is not None else one_forms(self.data, self.tol)

    @cached_property
    def actions(self) -> BimoduleActions:
        return bimodule_actions(self.forms, self.real, self.tol)

    @cached_property
    def omega_e(self) -> BalancedTensorSpace:
        return balanced_tensor([forms_factor(self.forms), module_factor(self.actions)], self.tol)

    @cached_property
    def e_omega(self) -> BalancedTensorSpace:
        return balanced_tensor([module_factor(self.actions), forms_factor(self.forms)], self.tol)

    @cached_property
    def e_omega_e(self) -> BalancedTensorSpace:
        e = module_factor(self.actions)
        return balanced_tensor([e, forms_factor(self.forms), e], self.tol)

    @cached_property
    def hilbert(self) -> TensorHilbertSpace:
        return hilbert_tensor(self.module, self.actions, self.tol)

    @cached_property
    def psi(self) -> "FlipMap":
        return flip_psi(self)

    @property
    def triple_plain_dim(self) -> int:
        return self.hilbert_dim ** 2 * self.forms.dim


@dataclass(frozen=True, eq=False)
class Connection:
    """A connection ``E -> Omega (x)_A E`` stored through plain representatives.

    Attributes:
        geometry: The geometry the connection lives on.
        matrix: ``(m N, N)`` matrix sending ``e_i`` to a representative of ``nabla e_i``.
        form: ``(n, n, N, N)`` connection form of the perturbation added to the
            Grassmann connection, or ``None`` for the Grassmann connection itself.
        label: Short description for reports.
    """

    geometry: Geometry
    matrix: np.ndarray
    form: np.ndarray | None = None
    label: str = "grassmann"

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ x

    @property
    def blocks(self) -> np.ndarray:
        """``(m, N, N)`` with ``blocks[k][i', i]`` the ``(k, i')`` entry of ``nabla e_i``."""
        g = self.geometry
        return self.matrix.reshape(g.forms.dim, g.hilbert_dim, g.hilbert_dim)


def grassmann(geometry: Geometry) -> Connection:
    """Grassmann connection ``xi -> sum_j d(xi_j) (x) e_j p``."""
    mod, forms, data = geometry.module, geometry.forms, geometry.data
    x = mod.basis_coordinates  # (N, n, N, N)
    comm = np.einsum("ab,ijbc->ijac", data.dirac, x) - np.einsum("ijab,bc->ijac", x, data.dirac)
    dco = np.einsum("kab,ijab->ijk", forms.basis.conj(), comm)
    matrix = np.einsum("ijk,aj->kai", dco, mod.images).reshape(forms.dim * mod.hilbert_dim, mod.hilbert_dim)
    return Connection(geometry, matrix, None, "grassmann")


def perturbation_matrix(geometry: Geometry, form: np.ndarray) -> np.ndarray:
    """Matrix of ``alpha(xi) = sum_{j,k} xi_j w_jk (x) e_k p`` for a connection form ``w``."""
    mod, forms = geometry.module, geometry.forms
    x = mod.basis_coordinates
    prod = np.einsum("ijab,jkbc->ikac", x, form)
    lco = np.einsum("lac,ikac->ikl", forms.basis.conj(), prod)
    return np.einsum("ikl,ak->lai", lco, mod.images).reshape(forms.dim * mod.hilbert_dim, mod.hilbert_dim)


def perturbed(connection: Connection, form: np.ndarray, label: str = "perturbed") -> Connection:
    """``connection + alpha`` for the connection form ``form``.

    Raises:
        ValueError: if some entry of ``form`` is not a one-form.
    """
    g = connection.geometry
    worst = max((g.forms.distance(w) for w in form.reshape(-1, *form.shape[2:])), default=0.0)
    if worst > g.tol.eq_tol:
        raise ValueError(f"connection form entries must be one-forms (distance {worst:.3e})")
    total = form if connection.form is None else connection.form + form
    return Connection(g, connection.matrix + perturbation_matrix(g, form), total, label)


def generator_parities(geometry: Geometry) -> np.ndarray | None:
    """Grading signs of the generators, or ``None`` when some generator is not homogeneous."""
    g, gens = geometry.data.gamma, geometry.module.generators
    out = []
    for j in range(gens.shape[1]):
        v = gens[:, j]
        if np.linalg.norm(g @ v - v) <= geometry.tol.eq_tol:
            out.append(1)
        elif np.linalg.norm(g @ v + v) <= geometry.tol.eq_tol:
            out.append(-1)
        else:
            return None
    return np.array(out)


def random_connection_form(geometry: Geometry, rng: np.random.Generator, scale: float = 1.0,
                           hermitian: bool = True, even: bool = True) -> np.ndarray:
    """Random connection form with entries in the one-forms.

    Args:
        geometry: Target geometry.
        rng: Random generator.
        scale: Standard deviation of the coordinates.
        hermitian: Impose ``w_jk = w_kj^*``, which makes the perturbation compatible.
        even: Zero the entries linking generators of opposite parity, which makes
            the perturbation commute with the grading (homogeneous generators only).
    """
    forms, n = geometry.forms, geometry.module.rank
    m = forms.dim
    c = scale * (rng.standard_normal((n, n, m)) + 1j * rng.standard_normal((n, n, m)))
    w = np.einsum("jkl,lab->jkab", c, forms.basis)
    if hermitian:
        w = 0.5 * (w + w.transpose(1, 0, 3, 2).conj())
    if even:
        par = generator_parities(geometry)
        if par is not None:
            w = w * (par[:, None] == par[None, :])[:, :, None, None]
    return w


def verify_connection(connection: Connection, tol: Tolerance | None = None) -> Report:
    """Leibniz rule, compatibility with the Hermitian structure, and grading commutation."""
    tol = resolve(tol)
    g = connection.geometry
    forms, mod, data = g.forms, g.module, g.data
    N, m = g.hilbert_dim, forms.dim
    nab = connection.matrix
    target = g.omega_e
    q = target.basis.conj().T
    rep = Report("verify-connection", f"{g.name}:{connection.label}", tol.eq_tol)
    eye = np.eye(N)
    leib = 0.0
    for idx, a in enumerate(data.algebra.basis):
        da = forms.d(a)
        lhs = nab @ a - np.kron(forms.left_ops[idx], eye) @ nab - np.kron(da[:, None], eye)
        leib = max(leib, opnorm(q @ lhs))
    rep.check("connection.leibniz", "nabla(a x) = a nabla(x) + da (x) x on basis elements", leib)
    rep.check("connection.compatible", "<nabla x, y> - <x, nabla y> = d<x, y>_A on basis pairs",
              compatibility_residual(connection))
    grad = nab @ data.gamma - np.kron(np.eye(m), data.gamma) @ nab
    rep.check("connection.grading", "nabla gamma = (1 (x) gamma) nabla", opnorm(q @ grad))
    return rep


def compatibility_residual(connection: Connection) -> float:
    """Largest ``||<nabla e_p, e_q> - <e_p, nabla e_q> - [D, <e_p, e_q>_A]||``."""
    g = connection.geometry
    forms, data = g.forms, g.data
    N = g.hilbert_dim
    h = g.module.inner_table  # h[i, q] = <e_i, e_q>_A
    blocks = connection.blocks  # (k, i, p)
    w = forms.basis
    # first[p, q] = sum_{k,i} blocks[k, i, p] w_k h[i, q]
    a = np.einsum("kip,kab->piab", blocks, w, optimize=True)
    first = np.einsum("piab,iqbc->pqac", a, h, optimize=True)
    # second[p, q] = sum_{k,i} conj(blocks[k, i, q]) h[p, i] w_k^*
    b = np.einsum("kiq,kba->qiab", blocks.conj(), w.conj(), optimize=True)
    second = np.einsum("piab,qibc->pqac", h, b, optimize=True)
    third = np.einsum("ab,pqbc->pqac", data.dirac, h) - np.einsum("pqab,bc->pqac", h, data.dirac)
    diff = (first - second - third).reshape(N * N, N, N)
    if diff.size == 0:
        return 0.0
    return float(np.linalg.norm(diff, ord=2, axis=(1, 2)).max())


@dataclass(frozen=True, eq=False)
class FlipMap:
    """Antilinear flip ``w (x) xi -> J xi (x) w^*`` from ``Omega (x) E`` to ``E (x) Omega``.

    Attributes:
        matrix: ``(N m, m N)``; the map is ``v -> matrix @ conj(v)``.
        well_defined: Residual of relations not mapped into relations.
        twisted_linear: Residual of ``Psi(a s) = Psi(s) a^*`` over the algebra basis.
    """

    matrix: np.ndarray
    well_defined: float
    twisted_linear: float


def flip_psi(geometry: Geometry) -> FlipMap:
    """Build the flip and measure its well-definedness and twisted linearity."""
    forms, J = geometry.forms, geometry.real.J.matrix
    N, m = geometry.hilbert_dim, forms.dim
    mat = np.einsum("ai,lk->alki", J, forms.star).reshape(N * m, m * N)
    src, tgt = geometry.omega_e, geometry.e_omega
    wd = src.well_defined_residual(mat, tgt, antilinear=True)
    eye = np.eye(N)
    worst = 0.0
    qt = tgt.basis.conj().T
    qs = src.basis.conj()
    alg = geometry.data.algebra
    for idx, a in enumerate(alg.basis):
        star_coeffs = alg.coefficients(a.conj().T)
        r_star = np.tensordot(star_coeffs, forms.right_ops, axes=1)
        lhs = mat @ np.kron(forms.left_ops[idx], eye).conj()
        rhs = np.kron(eye, r_star) @ mat
        worst = max(worst, opnorm(qt @ (lhs - rhs) @ qs))
    return FlipMap(mat, wd, worst)


def right_connection(connection: Connection) -> np.ndarray:
    """Matrix ``(N m, N)`` of ``xi -> -Psi(nabla(J^{-1} xi))``."""
    g = connection.geometry
    psi = g.psi
    jinv = np.linalg.inv(g.real.J.matrix)
    return -psi.matrix @ connection.matrix.conj() @ jinv


def right_leibniz_residual(connection: Connection, right: np.ndarray | None = None) -> float:
    """Largest residual of ``nabla_bar(x . a) = nabla_bar(x) a + x (x) da`` on basis elements."""
    g = connection.geometry
    forms = g.forms
    right = right_connection(connection) if right is None else right
    eye = np.eye(g.hilbert_dim)
    q = g.e_omega.basis.conj().T
    worst = 0.0
    for idx, a in enumerate(g.data.algebra.basis):
        da = forms.d(a)
        lhs = right @ g.actions.right_algebra[idx] - np.kron(eye, forms.right_ops[idx]) @ right - np.kron(eye, da[:, None])
        worst = max(worst, opnorm(q @ lhs))
    return worst


@dataclass(frozen=True, eq=False)
class TensoredConnection:
    """``nabla_bar (x) 1 + 1 (x) nabla`` on plain ``E (x) E``.

    Attributes:
        matrix: ``(N m N, N N)``.
        well_defined: Residual of relations of ``E (x)_A E`` not mapped into relations.
    """

    matrix: np.ndarray
    well_defined: float


def tensored_connection(connection: Connection, right: np.ndarray | None = None) -> TensoredConnection:
    """Assemble the tensored connection and check it descends to the balanced quotients."""
    g = connection.geometry
    right = right_connection(connection) if right is None else right
    eye = np.eye(g.hilbert_dim)
    mat = np.kron(right, eye) + np.kron(eye, connection.matrix)
    wd = g.hilbert.space.well_defined_residual(mat, g.e_omega_e)
    return TensoredConnection(mat, wd)


def product_connection(c1: Connection, c2: Connection, geometry: Geometry,
                       embed_left: np.ndarray, embed_right: np.ndarray) -> Connection:
    """``e1 (x) e2 -> nabla1(e1) (x) e2 + e1 (x) nabla2(e2)`` on the product module.

    The one-form ``w1`` of the first factor is identified with ``w1 (x) 1`` and
    the one-form ``w2`` of the second with ``gamma1 (x) w2``; ``embed_left`` and
    ``embed_right`` hold their coordinates in the product one-forms.
    """
    g1, g2 = c1.geometry, c2.geometry
    n1, n2 = g1.hilbert_dim, g2.hilbert_dim
    b1, b2 = c1.blocks, c2.blocks  # (k1, i1, j1), (k2, i2, j2)
    first = np.einsum("kK,Kij,ab->kiajb", embed_left, b1, np.eye(n2), optimize=True)
    second = np.einsum("kK,ij,Kab->kiajb", embed_right, np.eye(n1), b2, optimize=True)
    m = geometry.forms.dim
    matrix = (first + second).reshape(m * n1 * n2, n1 * n2)
    return Connection(geometry, matrix, None, f"product({c1.label},{c2.label})")
