"""N=1 spectral data, real structures, KO-dimension signs and the Kasparov product."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import StarAlgebra, tensor
from .linalg import AntilinearOp, Tolerance, anticommutator, commutator, opnorm, resolve
from .report import Report

__all__ = [
    "N1Data",
    "RealStructure",
    "KOClassification",
    "EVEN_TABLE",
    "ODD_TABLE",
    "verify_n1",
    "real_structure",
    "verify_real_structure",
    "classify_ko",
    "ko_dimensions",
    "kasparov_product",
    "equivalence_unitary",
    "equivalence_unitaries",
    "tensor_real_structure",
]

#: Signs ``(epsilon, epsilon', epsilon'')`` for even KO-dimensions.
EVEN_TABLE: dict[int, tuple[int, int, int]] = {0: (1, 1, 1), 2: (-1, 1, -1), 4: (-1, 1, 1), 6: (1, 1, -1)}
#: Signs ``(epsilon, epsilon')`` for odd KO-dimensions.
ODD_TABLE: dict[int, tuple[int, int]] = {1: (1, -1), 3: (-1, 1), 5: (-1, -1), 7: (1, 1)}


@dataclass(frozen=True, eq=False)
class N1Data:
    """Finite N=1 spectral data ``(A, H, D, gamma)``.

    Attributes:
        algebra: The represented algebra acting on ``H = C^N``.
        dirac: The Dirac operator ``D``.
        gamma: The grading operator.
        name: Optional label used in reports.
    """

    algebra: StarAlgebra
    dirac: np.ndarray
    gamma: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        n = self.algebra.hilbert_dim
        for label, op in (("dirac", self.dirac), ("gamma", self.gamma)):
            if np.shape(op) != (n, n):
                raise ValueError(f"{label} has shape {np.shape(op)}, expected {(n, n)}")
        object.__setattr__(self, "dirac", np.asarray(self.dirac, dtype=complex))
        object.__setattr__(self, "gamma", np.asarray(self.gamma, dtype=complex))

    @property
    def hilbert_dim(self) -> int:
        return self.algebra.hilbert_dim

    @property
    def tol(self) -> Tolerance:
        return self.algebra.tol

    def d(self, a: np.ndarray) -> np.ndarray:
        """The Dirac differential ``[D, a]``."""
        return commutator(self.dirac, a)


def verify_n1(data: N1Data, tol: Tolerance | None = None) -> Report:
    """Check every axiom of N=1 spectral data and return a report."""
    tol = resolve(tol)
    rep = Report("verify-n1", data.name or "n1-data", tol.eq_tol)
    alg, d, g = data.algebra, data.dirac, data.gamma
    n = data.hilbert_dim
    eye = np.eye(n)
    rep.info(hilbert_dim=n, algebra_dim=alg.dim)
    rep.check("n1.algebra-unital", "identity lies in the algebra", alg.residual(eye))
    adj, prod = alg.closure_residuals()
    rep.check("n1.algebra-star-closed", "algebra closed under adjoint and product", max(adj, prod))
    rep.check("n1.faithful", "representation is faithful (realization map injective)",
              float(alg.dim - alg.faithfulness_rank()))
    rep.check("n1.dirac-self-adjoint", "D equals its adjoint", opnorm(d - d.conj().T))
    rep.trivial("n1.bounded-commutators", "[D, a] bounded for every a")
    rep.trivial("n1.theta-summable", "exp(-t D^2) trace class for t > 0")
    rep.check("n1.grading-involution", "gamma is a self-adjoint involution",
              max(opnorm(g @ g - eye), opnorm(g - g.conj().T)))
    rep.check("n1.grading-commutes-algebra", "[gamma, a] = 0 on the algebra basis",
              max((opnorm(commutator(g, a)) for a in alg.basis), default=0.0))
    rep.check("n1.grading-anticommutes-dirac", "{gamma, D} = 0", opnorm(anticommutator(g, d)))
    return rep


@dataclass(frozen=True)
class KOClassification:
    """Result of matching measured signs against the KO sign table.

    A sign of ``0`` means the measurement could not decide it (for example the
    sign relating ``J`` and ``D`` when ``D = 0``); such a sign matches both rows.
    """

    signs: tuple[int, int, int]
    dims: frozenset[int]
    with_gamma: bool

    @property
    def consistent(self) -> bool:
        return bool(self.dims)


def ko_dimensions(signs: tuple[int, int, int], with_gamma: bool) -> frozenset[int]:
    """KO-dimensions whose table row matches ``signs`` (``0`` matches anything)."""

    def ok(measured: int, expected: int) -> bool:
        return measured == 0 or measured == expected

    if with_gamma:
        return frozenset(
            n for n, row in EVEN_TABLE.items() if all(ok(m, e) for m, e in zip(signs, row))
        )
    return frozenset(
        n for n, row in ODD_TABLE.items() if all(ok(m, e) for m, e in zip(signs[:2], row))
    )


def _measure(lhs: np.ndarray, rhs: np.ndarray, tol: Tolerance) -> tuple[int, float]:
    """Decide ``lhs = s * rhs`` for ``s = +1, -1``; return ``(s, residual)``, ``s = 0`` if both fit."""
    rp, rm = opnorm(lhs - rhs), opnorm(lhs + rhs)
    if rp <= tol.eq_tol and rm <= tol.eq_tol:
        return 0, min(rp, rm)
    return (1, rp) if rp <= rm else (-1, rm)


@dataclass(frozen=True, eq=False)
class RealStructure:
    """Antiunitary ``J`` together with its measured signs.

    Attributes:
        J: The antilinear operator.
        signs: Measured ``(epsilon, epsilon', epsilon'')``; ``0`` marks an undecided sign.
        sign_residuals: Residuals of the three sign relations.
        ko_dims: KO-dimensions consistent with the signs (graded table).
    """

    J: AntilinearOp
    signs: tuple[int, int, int]
    sign_residuals: tuple[float, float, float]
    ko_dims: frozenset[int] = field(default_factory=frozenset)

    @property
    def epsilon(self) -> int:
        return self.signs[0]

    @property
    def epsilon_prime(self) -> int:
        return self.signs[1]

    @property
    def epsilon_double_prime(self) -> int:
        return self.signs[2]

    def right(self, b: np.ndarray) -> np.ndarray:
        """Right action ``J b^* J^{-1}`` of an operator ``b``."""
        return self.J.conjugate(np.asarray(b).conj().T)


def real_structure(data: N1Data, J: AntilinearOp | np.ndarray, tol: Tolerance | None = None) -> RealStructure:
    """Measure the signs of ``J`` against ``data`` and wrap the result."""
    tol = resolve(tol)
    if not isinstance(J, AntilinearOp):
        J = AntilinearOp(J)
    n = data.hilbert_dim
    if J.shape != (n, n):
        raise ValueError(f"J has shape {J.shape}, expected {(n, n)}")
    m = J.matrix
    eps, r0 = _measure(J @ J, np.eye(n), tol)
    eps1, r1 = _measure(m @ data.dirac.conj(), data.dirac @ m, tol)
    eps2, r2 = _measure(m @ data.gamma.conj(), data.gamma @ m, tol)
    signs = (eps, eps1, eps2)
    return RealStructure(J, signs, (r0, r1, r2), ko_dimensions(signs, True))


def classify_ko(rs: RealStructure, with_gamma: bool = True) -> KOClassification:
    """KO-dimensions matching the measured signs.

    Even dimensions use all three signs, odd dimensions only the first two.
    An empty result means the real structure is inconsistent with the table.
    """
    return KOClassification(rs.signs, ko_dimensions(rs.signs, with_gamma), with_gamma)


def verify_real_structure(data: N1Data, rs: RealStructure, tol: Tolerance | None = None) -> Report:
    """Check antiunitarity, the sign relations and the order-zero and first-order conditions."""
    tol = resolve(tol)
    rep = Report("verify-real", data.name or "n1-data", tol.eq_tol)
    rep.check("real.antiunitary", "J is antiunitary", rs.J.antiunitarity_residual())
    names = ("real.sign-epsilon", "real.sign-epsilon-prime", "real.sign-epsilon-double-prime")
    what = ("J^2 = epsilon", "J D = epsilon' D J", "J gamma = epsilon'' gamma J")
    for tag, label, s, r in zip(names, what, rs.signs, rs.sign_residuals):
        shown = {1: "+1", -1: "-1", 0: "undetermined"}[s]
        rep.check(tag, f"{label} with sign {shown}", r)
    ko = classify_ko(rs, True)
    rep.info("ko", signs=",".join(str(s) for s in rs.signs),
             dims=",".join(str(k) for k in sorted(ko.dims)) or "none")
    rep.check("real.ko-table", "measured signs match a row of the KO sign table",
              0.0 if ko.consistent else 1.0)
    order0 = order1 = 0.0
    basis = data.algebra.basis
    rights = [rs.right(a.conj().T) for a in basis]  # J a J^{-1}
    for ja in rights:
        for b in basis:
            order0 = max(order0, opnorm(commutator(ja, b)))
            order1 = max(order1, opnorm(commutator(ja, data.d(b))))
    rep.check("real.order-zero", "[J a J^*, b] = 0 on the algebra basis", order0)
    rep.check("real.first-order", "[J a J^*, [D, b]] = 0 on the algebra basis", order1)
    return rep


def kasparov_product(d1: N1Data, d2: N1Data, convention: str = "standard") -> N1Data:
    """Kasparov product of N=1 data.

    Args:
        d1: First factor.
        d2: Second factor.
        convention: ``"standard"`` gives ``D1 x 1 + gamma1 x D2``; ``"swapped"``
            gives ``D1 x gamma2 + 1 x D2``.
    """
    i1, i2 = np.eye(d1.hilbert_dim), np.eye(d2.hilbert_dim)
    if convention == "standard":
        dirac = np.kron(d1.dirac, i2) + np.kron(d1.gamma, d2.dirac)
    elif convention == "swapped":
        dirac = np.kron(d1.dirac, d2.gamma) + np.kron(i1, d2.dirac)
    else:
        raise ValueError(f"unknown convention {convention!r}")
    name = f"{d1.name or 'n1'}*{d2.name or 'n1'}"
    return N1Data(tensor(d1.algebra, d2.algebra), dirac, np.kron(d1.gamma, d2.gamma), name)


def _check_involution(g: np.ndarray, tol: Tolerance, label: str) -> None:
    n = g.shape[0]
    if opnorm(g @ g - np.eye(n)) > tol.eq_tol or opnorm(g - g.conj().T) > tol.eq_tol:
        raise ValueError(f"{label} is not a self-adjoint involution")


def equivalence_unitary(g1: np.ndarray, g2: np.ndarray, tol: Tolerance | None = None) -> np.ndarray:
    """``(1 x 1 + g1 x 1 + 1 x g2 - g1 x g2) / 2`` for self-adjoint involutions ``g1, g2``.

    The result is itself a self-adjoint involution, hence unitary. It conjugates
    ``D1 x 1 + g1 x D2`` into ``D1 x g2 + 1 x D2`` whenever ``g_j`` anticommutes
    with ``D_j``.
    """
    tol = resolve(tol)
    _check_involution(g1, tol, "g1")
    _check_involution(g2, tol, "g2")
    i1, i2 = np.eye(g1.shape[0]), np.eye(g2.shape[0])
    return 0.5 * (np.kron(i1, i2) + np.kron(g1, i2) + np.kron(i1, g2) - np.kron(g1, g2))


def equivalence_unitaries(
    g1: np.ndarray, g2: np.ndarray, hodge1: np.ndarray | None = None, tol: Tolerance | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(U, V)`` with ``V`` built from ``(g1, g2)`` and ``U`` from ``(hodge1, g2)``.

    When ``hodge1`` is omitted both unitaries are built from ``(g1, g2)``.
    """
    v = equivalence_unitary(g1, g2, tol)
    u = v if hodge1 is None else equivalence_unitary(hodge1, g2, tol)
    return u, v


def tensor_real_structure(
    rs1: RealStructure, rs2: RealStructure, product: N1Data, tol: Tolerance | None = None
) -> RealStructure:
    """Real structure ``J1 x J2`` on a product, with signs measured afresh."""
    return real_structure(product, rs1.J.kron(rs2.J), tol)
