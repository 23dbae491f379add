"""Independent reference computations used to cross-check the package.

Nothing here imports the quotient, form or action machinery under test; every
quantity is rebuilt from raw matrices with plain numpy.
"""

from __future__ import annotations

import numpy as np

#: Sign table ``(epsilon, epsilon', epsilon'')`` for even KO-dimension, as tabulated in the literature.
KO_EVEN = {0: (1, 1, 1), 2: (-1, 1, -1), 4: (-1, 1, 1), 6: (1, 1, -1)}
#: ``(epsilon, epsilon')`` for odd KO-dimension.
KO_ODD = {1: (1, -1), 3: (-1, 1), 5: (-1, -1), 7: (1, 1)}


def rank(vectors: np.ndarray, rtol: float = 1e-9) -> int:
    """Numerical rank from singular values with a relative cutoff.

    Wide matrices go through the eigenvalues of the smaller Gram matrix, which
    gives the same singular values at a fraction of the cost. Squaring puts the
    noise floor near ``sqrt(machine epsilon)``, so that path uses a cutoff of
    at least ``1e-6``; the relation spectra have gaps of order one.
    """
    if vectors.size == 0:
        return 0
    if vectors.shape[1] > 2 * vectors.shape[0]:
        w = np.linalg.eigvalsh(vectors @ vectors.conj().T)[::-1]
        s = np.sqrt(np.clip(w, 0.0, None))
        rtol = max(rtol, 1e-6)
    else:
        s = np.linalg.svd(vectors, compute_uv=False)
    return int((s > rtol * max(1.0, s[0])).sum())


def right_action(J: np.ndarray, a: np.ndarray) -> np.ndarray:
    """``J a^* J^{-1}`` for ``J v = M conj(v)``, which equals ``M a^T M^{-1}``."""
    return J @ a.T @ np.linalg.inv(J)


def orthonormal_span(ops: list[np.ndarray], rtol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis ``(k, N, N)`` of the span of ``ops`` (Hilbert–Schmidt)."""
    if not ops:
        return np.zeros((0, 0, 0), dtype=complex)
    n = ops[0].shape[0]
    mat = np.stack([o.reshape(-1) for o in ops], axis=1)
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    r = int((s > rtol * max(1.0, s[0])).sum()) if s.size else 0
    return u[:, :r].T.reshape(r, n, n)


def one_forms_basis(algebra_basis: np.ndarray, dirac: np.ndarray) -> np.ndarray:
    """Span of ``a [D, b]`` over all pairs of basis elements."""
    ops = [a @ (dirac @ b - b @ dirac) for a in algebra_basis for b in algebra_basis]
    return orthonormal_span(ops)


class BruteFactor:
    """A bimodule given by a basis of vectors/operators and two ways of multiplying them.

    ``elements`` is a list of basis objects; ``left(a, x)`` and ``right(x, a)``
    return the products, and ``coords`` expresses any product in the basis.
    """

    def __init__(self, elements, left, right, coords):
        self.elements = elements
        self.left = left
        self.right = right
        self.coords = coords

    @property
    def dim(self) -> int:
        return len(self.elements)


def hilbert_factor(J: np.ndarray) -> BruteFactor:
    n = J.shape[0]
    eye = np.eye(n, dtype=complex)
    return BruteFactor(
        [eye[:, i] for i in range(n)],
        lambda a, x: a @ x,
        lambda x, a: right_action(J, a) @ x,
        lambda v: v,
    )


def forms_factor(basis: np.ndarray) -> BruteFactor:
    return BruteFactor(
        list(basis),
        lambda a, w: a @ w,
        lambda w, a: w @ a,
        lambda op: np.einsum("kij,ij->k", basis.conj(), op),
    )


def _action_matrix(factor: BruteFactor, act) -> np.ndarray:
    """Matrix whose column ``i`` holds the coordinates of ``act(element_i)``."""
    return np.stack([factor.coords(act(x)) for x in factor.elements], axis=1)


def _kron_list(mats: list[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def balanced_dimension(factors: list[BruteFactor], algebra_basis: np.ndarray) -> int:
    """``dim X_1 (x)_A ... (x)_A X_k`` by enumerating every balancing relation.

    For each slot boundary ``s``, each algebra basis element ``a`` and each
    tuple of basis elements, the relation
    ``... x_s a (x) x_{s+1} ... - ... x_s (x) a x_{s+1} ...`` is written out in
    full coordinates; the columns of ``kron(..., R_s(a), 1, ...) - kron(..., 1, L_{s+1}(a), ...)``
    are exactly these relations, one per basis tuple. The quotient dimension is
    the plain dimension minus the rank of all relations.
    """
    dims = [f.dim for f in factors]
    plain = int(np.prod(dims)) if dims else 0
    if plain == 0:
        return 0
    rels = []
    for s in range(len(factors) - 1):
        f, g = factors[s], factors[s + 1]
        for a in algebra_basis:
            left = [np.eye(d) for d in dims]
            right = [np.eye(d) for d in dims]
            left[s] = _action_matrix(f, lambda x: f.right(x, a))
            right[s + 1] = _action_matrix(g, lambda x: g.left(a, x))
            rels.append(_kron_list(left) - _kron_list(right))
    return plain - rank(np.hstack(rels))


def lemma_instance(rng: np.random.Generator, k: int, side: str) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Random data satisfying one side of the equivalence between the two presentations.

    The frame is ``K (x) C^2 (x) C^2`` with ``gamma = 1 (x) sz (x) sz`` and
    ``hodge = 1 (x) 1 (x) sz``. For ``side="d"`` the nilpotent ``d = X (x) d0`` is
    built directly; for ``side="dirac"`` the pair ``D = X (x) 1 (x) sx``,
    ``Dbar = X S (x) sx (x) sz`` is built with ``S`` a self-adjoint involution
    commuting with ``X``. ``X`` is a random Hermitian matrix on ``K = C^k``.

    Returns:
        ``(d, dirac, dirac_bar, gamma, hodge)``, each obtained from the
        constructed side by the standard formulas.
    """
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sz = np.diag([1.0, -1.0]).astype(complex)
    i2 = np.eye(2)
    ik = np.eye(k)
    gamma = np.kron(ik, np.kron(sz, sz))
    hodge = np.kron(ik, np.kron(i2, sz))
    c1 = np.kron(i2, sx)
    c2 = np.kron(sx, sz)
    if side == "d":
        h = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        x = h + h.conj().T
        d0 = 0.5 * (c1 - 1j * c2)
        d = np.kron(x, d0)
        dirac, dirac_bar = d + d.conj().T, 1j * (d - d.conj().T)
    else:
        # common eigenbasis: X = V diag(x) V^*, S = V diag(s) V^*
        q, _ = np.linalg.qr(rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k)))
        x = q @ np.diag(rng.standard_normal(k)) @ q.conj().T
        s = q @ np.diag(rng.choice([-1.0, 1.0], size=k)) @ q.conj().T
        dirac = np.kron(x, c1)
        dirac_bar = np.kron(x @ s, c2)
        d = 0.5 * (dirac - 1j * dirac_bar)
    return d, dirac, dirac_bar, gamma, hodge


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def block_diag(*mats: np.ndarray) -> np.ndarray:
    n = sum(m.shape[0] for m in mats)
    out = np.zeros((n, n), dtype=complex)
    i = 0
    for m in mats:
        k = m.shape[0]
        out[i:i + k, i:i + k] = m
        i += k
    return out


def kasparov(d1: np.ndarray, g1: np.ndarray, d2: np.ndarray, g2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(D1 (x) 1 + g1 (x) D2, g1 (x) g2)`` written out directly."""
    i2 = np.eye(d2.shape[0])
    return np.kron(d1, i2) + np.kron(g1, d2), np.kron(g1, g2)
