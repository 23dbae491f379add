"""Hermitian projective modules and balanced tensor products over a matrix algebra.

A module ``E = A^n p`` is embedded in ``H`` through generators ``v_1..v_n``:
``(xi_j) -> sum_j xi_j v_j``. Balanced tensor products are modelled as plain
Kronecker products modulo the span of the balancing relations
``x.a (x) y - x (x) a.y``; a quotient basis is the orthonormal basis of the
orthogonal complement of that span.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .algebra import StarAlgebra, tensor
from .forms import BimoduleActions, OneForms
from .linalg import AntilinearOp, Quotient, Tolerance, kernel_of_hermitian, opnorm, resolve
from .report import Report

__all__ = [
    "HermitianModule",
    "free_module",
    "module_from_generators",
    "default_module",
    "canonical_product_hermitian",
    "Factor",
    "module_factor",
    "forms_factor",
    "BalancedTensorSpace",
    "balanced_tensor",
    "TensorHilbertSpace",
    "hilbert_tensor",
]


@dataclass(frozen=True, eq=False)
class HermitianModule:
    """``E = A^n p`` realized inside ``H`` with the structure ``<xi, eta>_A = sum_j xi_j eta_j^*``.

    Attributes:
        algebra: The algebra acting on ``H``.
        generators: ``(N, n)`` array whose columns are the images of the standard basis of ``A^n``.
        projection: ``(n, n, N, N)`` array of entries ``p_jk`` in the algebra.
    """

    algebra: StarAlgebra
    generators: np.ndarray
    projection: np.ndarray

    @property
    def rank(self) -> int:
        return self.generators.shape[1]

    @property
    def hilbert_dim(self) -> int:
        return self.generators.shape[0]

    @property
    def tol(self) -> Tolerance:
        return self.algebra.tol

    @cached_property
    def images(self) -> np.ndarray:
        """``(N, n)``: column ``j`` is the image of ``e_j p``."""
        return np.einsum("jkab,bk->aj", self.projection, self.generators)

    @cached_property
    def _spanning(self) -> np.ndarray:
        # column (j, i) is B_i u_j
        return np.einsum("iab,bj->aji", self.algebra.basis, self.images).reshape(self.hilbert_dim, -1)

    @cached_property
    def _pinv(self) -> np.ndarray:
        return np.linalg.pinv(self._spanning, rcond=self.tol.rank_tol)

    def _coefficients_to_coords(self, c: np.ndarray) -> np.ndarray:
        """Map coefficients ``c[j, i]`` of ``zeta`` to the components of ``zeta p``."""
        zeta = np.einsum("...ji,iab->...jab", c, self.algebra.basis)
        return np.einsum("...jab,jkbc->...kac", zeta, self.projection)

    def coordinates(self, x: np.ndarray) -> np.ndarray:
        """Components ``(xi_1, ..., xi_n)`` in ``A^n p`` of a vector ``x`` of ``E``."""
        c = (self._pinv @ x).reshape(self.rank, self.algebra.dim)
        return self._coefficients_to_coords(c)

    @cached_property
    def basis_coordinates(self) -> np.ndarray:
        """``(N, n, N, N)``: components of each standard basis vector of ``H``."""
        c = self._pinv.T.reshape(self.hilbert_dim, self.rank, self.algebra.dim)
        return self._coefficients_to_coords(c)

    def embed(self, coords: np.ndarray) -> np.ndarray:
        """Vector ``sum_j xi_j v_j`` for components ``xi_j``."""
        return np.einsum("jab,bj->a", coords, self.generators)

    def inner(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Algebra-valued inner product ``<x, y>_A``, linear in ``x``."""
        cx, cy = self.coordinates(x), self.coordinates(y)
        return np.einsum("jab,jcb->ac", cx, cy.conj())

    @cached_property
    def inner_table(self) -> np.ndarray:
        """``(N, N, N, N)``: ``<e_i, e_j>_A`` for standard basis vectors."""
        x = self.basis_coordinates
        return np.einsum("ikab,jkcb->ijac", x, x.conj(), optimize=True)

    def inner_table_under(self, J: AntilinearOp) -> np.ndarray:
        """``(N, N, N, N)``: ``<J e_i, J e_j>_A``, antilinear in ``i`` and linear in ``j``."""
        x = np.einsum("ai,akbc->ikbc", J.matrix, self.basis_coordinates)
        return np.einsum("ikab,jkcb->ijac", x, x.conj(), optimize=True)

    def projection_matrix(self) -> np.ndarray:
        """Block matrix ``(nN, nN)`` whose ``(j, k)`` block is ``p_jk``."""
        n, N = self.rank, self.hilbert_dim
        return self.projection.transpose(0, 2, 1, 3).reshape(n * N, n * N)

    @cached_property
    def module_dim(self) -> int:
        """Complex dimension of ``A^n p``."""
        d = self.algebra.dim
        eye = np.eye(self.rank * d).reshape(self.rank * d, self.rank, d)
        coords = self._coefficients_to_coords(eye)  # (n d, n, N, N)
        flat = coords.reshape(self.rank * d, -1)
        s = np.linalg.svd(flat, compute_uv=False)
        return int((s > self.tol.rank_tol * max(1.0, s[0])).sum()) if s.size else 0

    @cached_property
    def image_dim(self) -> int:
        s = np.linalg.svd(self._spanning, compute_uv=False)
        return int((s > self.tol.rank_tol * max(1.0, s[0])).sum()) if s.size else 0

    @property
    def is_dense(self) -> bool:
        return self.image_dim == self.hilbert_dim

    def report(self, J: AntilinearOp | None = None, gamma: np.ndarray | None = None,
               rng: np.random.Generator | None = None, tol: Tolerance | None = None) -> Report:
        """Check the projection, the embedding and the Hermitian structure."""
        tol = resolve(tol)
        rep = Report("module", "hermitian-module", tol.eq_tol)
        p = self.projection_matrix()
        entries = max((self.algebra.residual(self.projection[j, k])
                       for j in range(self.rank) for k in range(self.rank)), default=0.0)
        rep.info(rank=self.rank, module_dim=self.module_dim, image_dim=self.image_dim)
        rep.check("module.projection", "p = p^2 = p^* with entries in the algebra",
                  max(opnorm(p @ p - p), opnorm(p - p.conj().T), entries))
        rep.check("module.injective", "embedding of A^n p into H is injective (rank deficit)",
                  float(self.module_dim - self.image_dim))
        rep.check("module.dense", "module fills H (dimension deficit)",
                  float(self.hilbert_dim - self.image_dim))
        if J is not None:
            rep.check("module.stable-real", "J maps the module into itself", self._stability(J.matrix))
        if gamma is not None:
            rep.check("module.stable-grading", "gamma maps the module into itself", self._stability(gamma))
        rng = rng or np.random.default_rng(0)
        worst_pos = worst_lin = 0.0
        for _ in range(4):
            x = rng.standard_normal(self.hilbert_dim) + 1j * rng.standard_normal(self.hilbert_dim)
            y = rng.standard_normal(self.hilbert_dim) + 1j * rng.standard_normal(self.hilbert_dim)
            a = self.algebra.random_element(rng)
            h = self.inner(x, x)
            worst_pos = max(worst_pos, opnorm(h - h.conj().T), -float(np.linalg.eigvalsh(0.5 * (h + h.conj().T)).min()))
            worst_lin = max(worst_lin, opnorm(self.inner(a @ x, y) - a @ self.inner(x, y)))
        rep.check("module.positive", "<x, x>_A is positive on random samples", max(worst_pos, 0.0))
        rep.check("module.left-linear", "<a x, y>_A = a <x, y>_A on random samples", worst_lin)
        return rep

    def _stability(self, op: np.ndarray) -> float:
        u, s, _ = np.linalg.svd(self._spanning, full_matrices=False)
        r = self.image_dim
        image = u[:, :r]
        moved = op @ image
        return opnorm(moved - image @ (image.conj().T @ moved))


def _identity_projection(algebra: StarAlgebra, n: int) -> np.ndarray:
    N = algebra.hilbert_dim
    p = np.zeros((n, n, N, N), dtype=complex)
    for j in range(n):
        p[j, j] = np.eye(N)
    return p


def free_module(algebra: StarAlgebra, generators: np.ndarray) -> HermitianModule:
    """Module ``A^n`` (trivial projection) embedded through ``generators``."""
    g = np.asarray(generators, dtype=complex)
    if g.ndim == 1:
        g = g[:, None]
    return HermitianModule(algebra, g, _identity_projection(algebra, g.shape[1]))


def module_from_generators(algebra: StarAlgebra, generators: np.ndarray,
                           tol: Tolerance | None = None) -> HermitianModule:
    """Present the submodule generated by ``generators`` as ``A^n p``.

    The kernel of ``(zeta_j) -> sum_j zeta_j v_j`` is a left submodule of
    ``A^n``. Orthogonal projection onto it (for the trace inner product on
    coefficients) is left A-linear, hence right multiplication by some
    ``q`` in ``M_n(A)``; the presentation uses ``p = 1 - q``.
    """
    tol = resolve(tol)
    free = free_module(algebra, generators)
    n, d, N = free.rank, algebra.dim, algebra.hilbert_dim
    mat = free._spanning  # columns indexed by (j, i)
    _, s, vh = np.linalg.svd(mat, full_matrices=True)
    r = int((s > tol.rank_tol * max(1.0, s[0] if s.size else 1.0)).sum())
    kernel = vh[r:].conj().T  # (n d, k)
    if kernel.shape[1] == 0:
        return free
    proj = kernel @ kernel.conj().T
    ident = algebra.coefficients(np.eye(N))
    q = np.zeros((n, n, N, N), dtype=complex)
    for j in range(n):
        e = np.zeros((n, d), dtype=complex)
        e[j] = ident
        image = (proj @ e.reshape(-1)).reshape(n, d)
        for k in range(n):
            q[j, k] = algebra.realize(image[k])
    p = _identity_projection(algebra, n) - q
    return HermitianModule(algebra, free.generators, p)


def default_module(algebra: StarAlgebra, gamma: np.ndarray, tol: Tolerance | None = None) -> HermitianModule:
    """Automatic presentation of ``H`` itself, with generators homogeneous for ``gamma``.

    Candidates are taken per eigenspace of ``gamma``: first the sum of the
    eigenspace basis, then the individual basis vectors, keeping a candidate
    when it enlarges the generated subspace.
    """
    tol = resolve(tol)
    N = algebra.hilbert_dim
    w, u = np.linalg.eigh(0.5 * (gamma + gamma.conj().T))
    gens: list[np.ndarray] = []
    span = np.zeros((N, 0), dtype=complex)
    for sign in (1.0, -1.0):
        block = u[:, np.isclose(w, sign)]
        block = _canonical_block(block)
        candidates = ([block.sum(axis=1)] if block.shape[1] else []) + [block[:, k] for k in range(block.shape[1])]
        for v in candidates:
            orbit = np.stack([a @ v for a in algebra.basis], axis=1)
            trial = np.hstack([span, orbit])
            sv = np.linalg.svd(trial, compute_uv=False)
            rank = int((sv > tol.rank_tol * max(1.0, sv[0])).sum())
            if rank > span.shape[1]:
                uu, _, _ = np.linalg.svd(trial, full_matrices=False)
                span = uu[:, :rank]
                gens.append(v)
            if span.shape[1] == N:
                break
    return module_from_generators(algebra, np.stack(gens, axis=1), tol)


def _canonical_block(block: np.ndarray) -> np.ndarray:
    """Reduced column-echelon form of an eigenspace basis, for reproducible generators."""
    if block.shape[1] == 0:
        return block
    proj = block @ block.conj().T
    cols = []
    for i in range(block.shape[0]):
        v = proj[:, i]
        for c in cols:
            v = v - c * (c.conj() @ v)
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            cols.append(v / nv)
        if len(cols) == block.shape[1]:
            break
    return np.stack(cols, axis=1)


def canonical_product_hermitian(h1: HermitianModule, h2: HermitianModule) -> HermitianModule:
    """Product module over ``A1 (x) A2`` with generators ``v_j (x) w_k`` and ``p = p1 (x) p2``."""
    alg = tensor(h1.algebra, h2.algebra)
    gens = np.einsum("aj,bk->abjk", h1.generators, h2.generators).reshape(
        h1.hilbert_dim * h2.hilbert_dim, h1.rank * h2.rank)
    n1, n2 = h1.rank, h2.rank
    N = h1.hilbert_dim * h2.hilbert_dim
    p = np.einsum("jkab,lmcd->jlkmacbd", h1.projection, h2.projection).reshape(n1 * n2, n1 * n2, N, N)
    return HermitianModule(alg, gens, p)


# ---------------------------------------------------------------------------
# balanced tensor products


@dataclass(frozen=True, eq=False)
class Factor:
    """A bimodule factor: left and right actions of each algebra basis element.

    Attributes:
        label: Short name used in descriptions (``E`` or ``Omega``).
        left: ``(dim A, k, k)`` left action matrices.
        right: ``(dim A, k, k)`` right action matrices.
    """

    label: str
    left: np.ndarray
    right: np.ndarray

    @property
    def dim(self) -> int:
        return self.left.shape[1]


def module_factor(actions: BimoduleActions) -> Factor:
    """``H`` with the algebra acting on the left and through ``J`` on the right."""
    return Factor("E", actions.data.algebra.basis, actions.right_algebra)


def forms_factor(forms: OneForms) -> Factor:
    """One-forms in coordinates, with left and right multiplication."""
    return Factor("Omega", forms.left_ops, forms.right_ops)


def _apply_pair(a: np.ndarray, b: np.ndarray, cols: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """``kron(a, b) @ cols`` without forming the Kronecker product."""
    k = cols.shape[1]
    v = cols.reshape(dx, dy, k)
    return np.einsum("ij,jlk,ml->imk", a, v, b, optimize=True).reshape(-1, k)


def _pair_complement(x: Factor, y: Factor, tol: Tolerance) -> tuple[np.ndarray, float]:
    dx, dy = x.dim, y.dim
    ix, iy = np.eye(dx), np.eye(dy)
    s = np.zeros((dx * dy, dx * dy), dtype=complex)
    for r, l in zip(x.right, y.left):
        s += np.kron(r @ r.conj().T, iy) - np.kron(r, l.conj().T) - np.kron(r.conj().T, l) + np.kron(ix, l @ l.conj().T)
    if s.shape[0] == 0:
        return np.zeros((0, 0), dtype=complex), 0.0
    kernel, _ = kernel_of_hermitian(s, tol)
    cert = 0.0
    for r, l in zip(x.right, y.left):
        t_adj = _apply_pair(r.conj().T, iy, kernel, dx, dy) - _apply_pair(ix, l.conj().T, kernel, dx, dy)
        cert = max(cert, opnorm(t_adj))
    return kernel, cert


@dataclass(frozen=True, eq=False)
class BalancedTensorSpace:
    """Model of ``X_1 (x)_A X_2 (x)_A ... (x)_A X_k``.

    Attributes:
        factors: The bimodule factors in order.
        quotient: Orthonormal complement of the relation span in the plain tensor product.
        certificate: Largest component of a balancing relation map visible in the
            complement; zero up to rounding when the complement is exact.
    """

    factors: tuple[Factor, ...]
    quotient: Quotient
    certificate: float

    @property
    def labels(self) -> str:
        return " (x) ".join(f.label for f in self.factors)

    @property
    def plain_dim(self) -> int:
        return self.quotient.ambient

    @property
    def dim(self) -> int:
        return self.quotient.dim

    @property
    def basis(self) -> np.ndarray:
        return self.quotient.basis

    @property
    def relation_dim(self) -> int:
        return self.plain_dim - self.dim

    def reduce(self, op: np.ndarray, target: "BalancedTensorSpace | None" = None) -> np.ndarray:
        """Matrix of a plain map between quotient models (no well-definedness check)."""
        target = target or self
        return target.basis.conj().T @ op @ self.basis

    def well_defined_residual(self, op: np.ndarray, target: "BalancedTensorSpace | None" = None,
                              antilinear: bool = False) -> float:
        """Norm of the image of the relation space, seen in the target quotient.

        For an antilinear map ``v -> op @ conj(v)`` pass ``antilinear=True``.
        """
        target = target or self
        y = target.basis.conj().T @ op
        q = self.basis.conj() if antilinear else self.basis
        return opnorm(y - (y @ q) @ q.conj().T)


def balanced_tensor(factors: Sequence[Factor], tol: Tolerance | None = None) -> BalancedTensorSpace:
    """Quotient of the plain tensor product by all balancing relations.

    Two factors: the complement is the kernel of ``sum_a T_a T_a^*`` with
    ``T_a = R_a (x) 1 - 1 (x) L_a``. More factors: the complement is built
    incrementally as ``(C_{1..k} (x) X_{k+1}) cap (X_1..X_{k-1} (x) C_{k,k+1})``.
    """
    tol = resolve(tol)
    factors = tuple(factors)
    if len(factors) < 2:
        raise ValueError("need at least two factors")
    if any(f.dim == 0 for f in factors):
        return BalancedTensorSpace(factors, Quotient(np.zeros((0, 0), dtype=complex), tol), 0.0)
    q, cert = _pair_complement(factors[0], factors[1], tol)
    for k in range(2, len(factors)):
        left_dim = q.shape[0]
        prev_dim = factors[k - 1].dim
        new = factors[k]
        c_pair, cert_pair = _pair_complement(factors[k - 1], new, tol)
        cert = max(cert, cert_pair)
        outer = left_dim // prev_dim
        # candidate space q (x) 1, constrained to lie in 1 (x) c_pair
        cand = np.einsum("ak,bc->abkc", q, np.eye(new.dim)).reshape(left_dim * new.dim, -1)
        pr = np.eye(prev_dim * new.dim) - c_pair @ c_pair.conj().T
        v = cand.reshape(outer, prev_dim * new.dim, -1)
        m = np.einsum("ij,ajk->aik", pr, v).reshape(left_dim * new.dim, -1)
        gram = m.conj().T @ m
        null, _ = kernel_of_hermitian(gram, tol)
        q = cand @ null
        cert = max(cert, opnorm(m @ null))
    return BalancedTensorSpace(factors, Quotient(q, tol), cert)


@dataclass(frozen=True, eq=False)
class TensorHilbertSpace:
    """``E (x)_A E`` with the induced inner product, and an orthonormal model of it.

    The inner product of plain tensors is ``<x (x) y, x' (x) y'> = <y, h(x, x') y'>``
    with ``h(x, x') = <J x, J x'>_A``. Orthonormal coordinates are
    ``coords = G^{1/2} Q^*`` with section ``F = Q G^{-1/2}`` where ``G`` is the
    Gram matrix restricted to the quotient basis ``Q``.

    Attributes:
        space: The balanced tensor product.
        gram: Gram matrix on the plain tensor product.
        section: ``(plain, dim)`` orthonormal representatives.
        coords: ``(dim, plain)`` coordinate map vanishing on relations.
        null_dim: Dimension of Gram-null vectors outside the relation space.
        gram_min_eig: Smallest eigenvalue of the reduced Gram matrix.
    """

    space: BalancedTensorSpace
    gram: np.ndarray
    section: np.ndarray
    coords: np.ndarray
    null_dim: int
    gram_min_eig: float

    @property
    def dim(self) -> int:
        return self.section.shape[1]

    def compress(self, op: np.ndarray) -> np.ndarray:
        """Matrix, in orthonormal coordinates, of a plain operator that descends."""
        return self.coords @ op @ self.section

    def descent_residual(self, op: np.ndarray) -> float:
        """How far ``op`` is from preserving relations and null vectors."""
        y = self.coords @ op
        return opnorm(y - (y @ self.section) @ self.coords)

    def report(self, tol: Tolerance | None = None) -> Report:
        tol = resolve(tol)
        rep = Report("tensor", self.space.labels, tol.eq_tol)
        g, q = self.gram, self.space.basis
        rep.info(plain_dim=self.space.plain_dim, relation_dim=self.space.relation_dim, dim=self.dim)
        rep.check("tensor.relations", "balancing relations lie in the relation space", self.space.certificate)
        rep.check("tensor.gram-hermitian", "Gram matrix is Hermitian", opnorm(g - g.conj().T))
        rep.check("tensor.gram-psd", "reduced Gram matrix has no negative eigenvalue",
                  max(0.0, -self.gram_min_eig))
        gq = g @ q
        rep.check("tensor.gram-descends", "relation vectors are Gram-null",
                  opnorm(g - gq @ q.conj().T))
        rep.check("tensor.gram-kernel", "Gram kernel is contained in the relation space (extra null dimension)",
                  float(self.null_dim))
        return rep


def hilbert_tensor(module: HermitianModule, actions: BimoduleActions,
                   tol: Tolerance | None = None) -> TensorHilbertSpace:
    """Build ``E (x)_A E`` and its Hilbert-space model."""
    tol = resolve(tol)
    fac = module_factor(actions)
    space = balanced_tensor([fac, fac], tol)
    N = module.hilbert_dim
    h = module.inner_table_under(actions.real.J)  # h[i, j] = <J e_i, J e_j>_A
    gram = h.transpose(0, 2, 1, 3).reshape(N * N, N * N)
    q = space.basis
    gq = q.conj().T @ gram @ q
    gq = 0.5 * (gq + gq.conj().T)
    w, u = np.linalg.eigh(gq) if gq.size else (np.zeros(0), np.zeros((0, 0)))
    cutoff = tol.rank_tol * max(1.0, float(np.abs(w).max()) if w.size else 1.0)
    keep = w > cutoff
    null_dim = int((~keep).sum())
    if null_dim == 0:
        root = (u * np.sqrt(w)) @ u.conj().T
        inv_root = (u / np.sqrt(w)) @ u.conj().T
        section, coords = q @ inv_root, root @ q.conj().T
    else:
        up, wp = u[:, keep], w[keep]
        section = q @ (up / np.sqrt(wp))
        coords = (up * np.sqrt(wp)).conj().T @ q.conj().T
    min_eig = float(w.min()) if w.size else 0.0
    return TensorHilbertSpace(space, gram, section, coords, null_dim, min_eig)
