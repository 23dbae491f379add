"""N=(1,1) spectral data and the extension of N=1 data through a connection.

N=(1,1) data is stored in the form ``(A, H, D, Dbar, gamma, hodge)``; the
nilpotent operator is recovered as ``d = (D - i Dbar) / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import StarAlgebra, from_operators
from .connections import (
    Connection,
    Geometry,
    TensoredConnection,
    grassmann,
    right_connection,
    right_leibniz_residual,
    tensored_connection,
    verify_connection,
)
from .linalg import Tolerance, anticommutator, commutator, opnorm, resolve
from .report import Report
from .spectral import N1Data, verify_n1, verify_real_structure

__all__ = [
    "N11Data",
    "verify_n11",
    "to_n1",
    "contractions",
    "fused_diracs",
    "PhiResult",
    "PreconditionFailed",
    "phi",
    "HODGE_CHOICES",
    "TRACE_LIMIT",
]

#: Hodge operators accepted by :func:`phi`: ``1 (x) gamma`` and the incorrect ``gamma (x) 1``.
HODGE_CHOICES = ("1-tensor-gamma", "gamma-tensor-1")
#: Largest plain dimension of ``E (x) Omega (x) E`` for which contractions are materialized.
TRACE_LIMIT = 4096


@dataclass(frozen=True, eq=False)
class N11Data:
    """Finite N=(1,1) data ``(A, H, D, Dbar, gamma, hodge)``.

    Attributes:
        algebra: The algebra acting on ``H``.
        dirac: Self-adjoint ``D = d + d^*``.
        dirac_bar: Self-adjoint ``Dbar = i (d - d^*)``.
        gamma: Grading operator.
        hodge: Hodge operator.
        name: Optional label used in reports.
    """

    algebra: StarAlgebra
    dirac: np.ndarray
    dirac_bar: np.ndarray
    gamma: np.ndarray
    hodge: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        n = self.algebra.hilbert_dim
        for label in ("dirac", "dirac_bar", "gamma", "hodge"):
            op = np.asarray(getattr(self, label), dtype=complex)
            if op.shape != (n, n):
                raise ValueError(f"{label} has shape {op.shape}, expected {(n, n)}")
            object.__setattr__(self, label, op)

    @classmethod
    def from_d(cls, algebra: StarAlgebra, d: np.ndarray, gamma: np.ndarray, hodge: np.ndarray,
               name: str = "") -> "N11Data":
        """Build the data from the nilpotent operator ``d``."""
        d = np.asarray(d, dtype=complex)
        ds = d.conj().T
        return cls(algebra, d + ds, 1j * (d - ds), gamma, hodge, name)

    @property
    def hilbert_dim(self) -> int:
        return self.algebra.hilbert_dim

    @property
    def tol(self) -> Tolerance:
        return self.algebra.tol

    @property
    def d(self) -> np.ndarray:
        return 0.5 * (self.dirac - 1j * self.dirac_bar)

    @property
    def d_star(self) -> np.ndarray:
        return 0.5 * (self.dirac + 1j * self.dirac_bar)

    @property
    def laplacian(self) -> np.ndarray:
        d, ds = self.d, self.d_star
        return d @ ds + ds @ d


def _agreement(lhs: float, rhs: float, tol: Tolerance) -> float:
    """Residual of an equivalence: zero when both sides agree, else the failing side's residual."""
    lp, rp = lhs <= tol.eq_tol, rhs <= tol.eq_tol
    if lp == rp:
        return 0.0
    return rhs if lp else lhs


def verify_n11(data: N11Data, tol: Tolerance | None = None) -> Report:
    """Check the axioms in both the ``d`` form and the ``(D, Dbar)`` form, and their equivalence."""
    tol = resolve(tol)
    rep = Report("verify-n11", data.name or "n11-data", tol.eq_tol)
    alg, g, s = data.algebra, data.gamma, data.hodge
    dd, db = data.dirac, data.dirac_bar
    d, ds = data.d, data.d_star
    eye = np.eye(data.hilbert_dim)
    basis = alg.basis
    rep.info(hilbert_dim=data.hilbert_dim, algebra_dim=alg.dim)
    rep.check("n11.faithful", "representation is faithful (realization map injective)",
              float(alg.dim - alg.faithfulness_rank()))
    nil = opnorm(d @ d)
    rep.check("n11.d-nilpotent", "d^2 = 0", nil)
    rep.trivial("n11.d-bounded-commutators", "[d, a] bounded for every a")
    rep.trivial("n11.laplacian-trace-class", "exp(-t Laplacian) trace class for t > 0")
    rep.check("n11.grading-involution", "gamma is a self-adjoint involution",
              max(opnorm(g @ g - eye), opnorm(g - g.conj().T)))
    rep.check("n11.grading-commutes-algebra", "[gamma, a] = 0 on the algebra basis",
              max((opnorm(commutator(g, a)) for a in basis), default=0.0))
    g_d = opnorm(anticommutator(g, d))
    rep.check("n11.grading-anticommutes-d", "{gamma, d} = 0", g_d)
    rep.check("n11.hodge-unitary", "hodge is unitary", opnorm(s.conj().T @ s - eye))
    rep.check("n11.hodge-commutes-algebra", "[hodge, a] = 0 on the algebra basis",
              max((opnorm(commutator(s, a)) for a in basis), default=0.0))
    s_d = opnorm(s @ d + ds @ s)
    rep.check("n11.hodge-intertwines-d", "hodge d = -d^* hodge", s_d)
    rep.check("n11.hodge-self-adjoint", "hodge is self-adjoint", opnorm(s - s.conj().T))
    rep.check("n11.hodge-involution", "hodge squares to the identity", opnorm(s @ s - eye))
    rep.check("n11.hodge-commutes-grading", "[hodge, gamma] = 0", opnorm(commutator(s, g)))
    rep.check("n11.dirac-self-adjoint", "D is self-adjoint", opnorm(dd - dd.conj().T))
    rep.check("n11.dirac-bar-self-adjoint", "Dbar is self-adjoint", opnorm(db - db.conj().T))
    sq = opnorm(dd @ dd - db @ db)
    ac = opnorm(anticommutator(dd, db))
    rep.check("n11.dirac-squares-equal", "D^2 = Dbar^2", sq)
    rep.check("n11.diracs-anticommute", "{D, Dbar} = 0", ac)
    g_dirac = max(opnorm(anticommutator(g, dd)), opnorm(anticommutator(g, db)))
    rep.check("n11.grading-anticommutes-diracs", "{gamma, D} = {gamma, Dbar} = 0", g_dirac)
    s_dirac = max(opnorm(anticommutator(s, dd)), opnorm(commutator(s, db)))
    rep.check("n11.hodge-dirac-relations", "{hodge, D} = [hodge, Dbar] = 0", s_dirac)
    rep.check("n11.grading-equivalence", "{gamma, d} = 0 holds exactly when {gamma, D} = {gamma, Dbar} = 0",
              _agreement(g_d, g_dirac, tol))
    rep.check("n11.hodge-equivalence", "hodge d = -d^* hodge holds exactly when {hodge, D} = [hodge, Dbar] = 0",
              _agreement(s_d, s_dirac, tol))
    rep.check("n11.nilpotency-equivalence", "d^2 = 0 holds exactly when D^2 = Dbar^2 and {D, Dbar} = 0",
              _agreement(nil, max(sq, ac), tol))
    rep.check("n11.laplacian-is-dirac-square", "d d^* + d^* d = D^2", opnorm(data.laplacian - dd @ dd))
    return rep


def to_n1(data: N11Data) -> N1Data:
    """Associated N=1 data ``(A, H, D, gamma)``."""
    return N1Data(data.algebra, data.dirac, data.gamma, data.name)


def contractions(geometry: Geometry) -> tuple[np.ndarray, np.ndarray]:
    """Plain matrices of ``x (x) w (x) y -> x (x) w y`` and ``x (x) w (x) y -> x.w (x) gamma y``.

    Both have shape ``(N^2, N m N)`` with input index order ``(i, k, j)``.
    """
    N = geometry.hilbert_dim
    m = geometry.forms.dim
    eye = np.eye(N)
    c = np.einsum("ab,kcd->acbkd", eye, geometry.forms.basis).reshape(N * N, N * m * N)
    cbar = np.einsum("kab,cd->acbkd", geometry.actions.right_forms, geometry.data.gamma)
    return c, cbar.reshape(N * N, N * m * N)


def fused_diracs(connection: Connection, right: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Plain ``D = c o nabla~`` and ``Dbar = cbar o nabla~`` without materializing ``c`` or ``nabla~``.

    With ``Z_l[i', i]`` the ``(i', l)`` entry of ``nabla_bar e_i`` and ``N_k`` the
    ``k`` block of ``nabla``, ``D = sum_l Z_l (x) W_l + 1 (x) sum_k W_k N_k`` and
    ``Dbar = (sum_l rho(W_l) Z_l) (x) gamma + sum_k rho(W_k) (x) gamma N_k``.
    """
    g = connection.geometry
    N, m = g.hilbert_dim, g.forms.dim
    w, rho, gamma = g.forms.basis, g.actions.right_forms, g.data.gamma
    z = right.reshape(N, m, N).transpose(1, 0, 2)  # z[l, i', i]
    nk = connection.blocks
    eye = np.eye(N)
    d_nabla = np.einsum("kab,kbc->ac", w, nk) if m else np.zeros((N, N), dtype=complex)
    dirac = np.kron(eye, d_nabla)
    dirac_bar = np.kron(np.einsum("lab,lbc->ac", rho, z), gamma) if m else np.zeros((N * N, N * N), complex)
    for k in range(m):
        dirac = dirac + np.kron(z[k], w[k])
        dirac_bar = dirac_bar + np.kron(rho[k], gamma @ nk[k])
    return dirac, dirac_bar


class PreconditionFailed(ValueError):
    """The inputs of the extension do not satisfy its hypotheses.

    Attributes:
        failed: Tags of the failing checks.
        report: The report in which they failed.
    """

    def __init__(self, failed: list[str], report: Report):
        super().__init__("precondition failed: " + ", ".join(failed))
        self.failed = failed
        self.report = report


@dataclass(frozen=True, eq=False)
class PhiResult:
    """Output of the extension.

    Attributes:
        connection: The connection used.
        n11: The candidate N=(1,1) data in orthonormal coordinates of ``E (x)_A E``.
        report: Preconditions, stage residuals and the N=(1,1) verification.
        plain: Plain representatives on ``H (x) H`` of ``dirac``, ``dirac_bar``, ``gamma`` and ``hodge``.
        right: Matrix of the right connection.
        tensored: The tensored connection, when the trace was materialized.
        contraction: Plain contraction matrices ``(c, cbar)``, when the trace was materialized.
        hodge: Which Hodge operator was used.
    """

    connection: Connection
    n11: N11Data
    report: Report
    plain: dict[str, np.ndarray]
    right: np.ndarray
    tensored: TensoredConnection | None = None
    contraction: tuple[np.ndarray, np.ndarray] | None = None
    hodge: str = HODGE_CHOICES[0]
    extra: dict = field(default_factory=dict)

    @property
    def geometry(self) -> Geometry:
        return self.connection.geometry

    @property
    def passed(self) -> bool:
        return self.report.passed


_PRECONDITION_PREFIXES = ("n1.", "real.", "module.", "connection.leibniz", "connection.grading",
                          "connection.flip", "tensor.")


def phi(connection: Connection | Geometry, hodge: str = HODGE_CHOICES[0], trace: bool | None = None,
        tol: Tolerance | None = None, check: bool = True) -> PhiResult:
    """Extend N=1 data to a candidate N=(1,1) data through ``connection``.

    Args:
        connection: A connection, or a geometry (its Grassmann connection is used).
        hodge: ``"1-tensor-gamma"`` (correct) or ``"gamma-tensor-1"`` (for comparison only).
        trace: Materialize the contractions and the triple tensor product; by
            default only when its plain dimension is at most :data:`TRACE_LIMIT`.
            Passing ``True`` above that limit raises ``ValueError``.
        tol: Tolerance.
        check: Raise :class:`PreconditionFailed` when a hypothesis fails.

    Returns:
        The candidate and a report. Failing N=(1,1) axioms are data, not errors.

    Raises:
        ValueError: for an unknown ``hodge`` or an explicit trace above the limit.
    """
    tol = resolve(tol)
    if hodge not in HODGE_CHOICES:
        raise ValueError(f"hodge must be one of {HODGE_CHOICES}, got {hodge!r}")
    if isinstance(connection, Geometry):
        connection = grassmann(connection)
    g = connection.geometry
    data = g.data
    if trace and g.hilbert_dim**2 * g.forms.dim > TRACE_LIMIT:
        raise ValueError(f"triple tensor product of {g.name} has plain dimension "
                         f"{g.hilbert_dim**2 * g.forms.dim} > {TRACE_LIMIT}; trace is limited to desk scale")
    rep = Report("extend", f"{g.name}:{connection.label}:{hodge}", tol.eq_tol)
    rep.extend(verify_n1(data, tol))
    rep.extend(verify_real_structure(data, g.real, tol))
    rep.extend(g.forms.report(tol))
    rep.extend(g.module.report(g.real.J, data.gamma, tol=tol))
    rep.extend(g.hilbert.report(tol))
    rep.extend(verify_connection(connection, tol))
    psi = g.psi
    rep.check("connection.flip-well-defined", "flip maps balancing relations to relations", psi.well_defined)
    rep.check("connection.flip-twisted-linear", "flip(a s) = flip(s) a^* on the algebra basis", psi.twisted_linear)
    if check:
        failed = [c.tag for c in rep.failures if c.tag.startswith(_PRECONDITION_PREFIXES)
                  and c.tag != "connection.compatible"]
        if failed:
            raise PreconditionFailed(failed, rep)

    N, m = g.hilbert_dim, g.forms.dim
    right = right_connection(connection)
    rep.check("connection.right-leibniz", "nabla_bar(x a) = nabla_bar(x) a + x (x) da", right_leibniz_residual(connection, right))
    hil = g.hilbert
    eye = np.eye(N)
    dirac, dirac_bar = fused_diracs(connection, right)
    gamma = np.kron(data.gamma, data.gamma)
    star = np.kron(eye, data.gamma) if hodge == HODGE_CHOICES[0] else np.kron(data.gamma, eye)
    plain = {"dirac": dirac, "dirac_bar": dirac_bar, "gamma": gamma, "hodge": star}
    if trace is None:
        trace = N * m * N <= TRACE_LIMIT
    tensored = contraction = None
    if trace:
        tensored = tensored_connection(connection, right)
        rep.check("connection.tensored-well-defined", "nabla~ maps balancing relations to relations",
                  tensored.well_defined)
        contraction = contractions(g)
        triple = g.e_omega_e.basis
        for tag, what, mat in (("phi.contraction-well-defined", "c", contraction[0]),
                               ("phi.contraction-bar-well-defined", "cbar", contraction[1])):
            y = hil.coords @ mat
            rep.check(tag, f"{what} maps relations of E (x) Omega (x) E to zero in the extended space",
                      opnorm(y - (y @ triple) @ triple.conj().T))
    else:
        rep.info("skipped", stage="triple-tensor", plain_dim=N * m * N, limit=TRACE_LIMIT)
    rep.check("phi.dirac-well-defined", "D descends to the extended space", hil.descent_residual(dirac))
    rep.check("phi.dirac-bar-well-defined", "Dbar descends to the extended space", hil.descent_residual(dirac_bar))
    rep.check("phi.grading-well-defined", "gamma (x) gamma descends to the extended space",
              hil.descent_residual(gamma))
    rep.check("phi.hodge-well-defined", "hodge descends to the extended space", hil.descent_residual(star))
    alg_ops = [np.kron(a, eye) for a in data.algebra.basis]
    rep.check("phi.algebra-well-defined", "algebra action descends to the extended space",
              max((hil.descent_residual(a) for a in alg_ops), default=0.0))
    compressed = [hil.compress(a) for a in alg_ops]
    algebra = from_operators(compressed, tol)
    rank_deficit = data.algebra.dim - algebra.dim
    rep.check("n11.faithful", "algebra acts faithfully on the extended space (rank deficit)", float(rank_deficit))
    name = f"phi({g.name})" if hodge == HODGE_CHOICES[0] else f"phi({g.name},{hodge})"
    n11 = N11Data(algebra, hil.compress(dirac), hil.compress(dirac_bar), hil.compress(gamma),
                  hil.compress(star), name)
    rep.info(extended_dim=hil.dim, forms_dim=m, null_dim=hil.null_dim)
    rep.extend(verify_n11(n11, tol))
    return PhiResult(connection, n11, rep, plain, right, tensored, contraction, hodge)
