"""Plain-text input format for N=1 and N=(1,1) data.

A file is a sequence of header lines and matrix blocks; ``#`` starts a comment::

    kind: n1
    name: two-point
    dim: 4
    tol eq=1e-10 rank=1e-10

    matrix generator
    1 0 0 0
    0 1 0 0
    0 0 0 0
    0 0 0 0
    end

Matrices are row-major with whitespace-separated entries written ``a``,
``bi`` or ``a+bi`` (``i`` alone stands for the imaginary unit).

N=1 files (``kind: n1``) accept the fields ``generator`` (repeatable),
``D``, ``gamma``, ``J antilinear``, and optionally ``module-generators``
(``dim x n``, one generator per column), ``projection`` and
``connection-form`` (both ``n dim x n dim`` block matrices whose ``(j, k)``
block is an algebra element, respectively a one-form). Without
``module-generators`` the module is generated automatically from
eigenvectors of ``gamma``.

N=(1,1) files (``kind: n11``) accept ``generator``, ``dirac``,
``dirac-bar``, ``gamma`` and ``hodge``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .algebra import StarAlgebra, generate
from .connections import Geometry
from .extension import N11Data
from .linalg import AntilinearOp, Tolerance
from .modules import HermitianModule, default_module, module_from_generators
from .spectral import N1Data, real_structure

__all__ = [
    "ParseError",
    "N1Input",
    "N11Input",
    "parse_entry",
    "parse_input",
    "load_input",
    "format_complex",
    "dump_n1",
    "dump_n11",
]

KINDS = ("n1", "n11")
N1_FIELDS = ("generator", "D", "gamma", "J", "module-generators", "projection", "connection-form")
N11_FIELDS = ("generator", "dirac", "dirac-bar", "gamma", "hodge")
_REPEATABLE = {"generator"}
_ENTRY = re.compile(r"^[0-9.eE+\-i]+$")


class ParseError(ValueError):
    """Malformed or inconsistent input file.

    Attributes:
        line: One-based line number, or ``None`` for whole-file problems.
        field: Header key or matrix field involved, if any.
    """

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line = line
        self.field = field
        self.message = message


@dataclass(frozen=True, eq=False)
class N1Input:
    """Parsed N=1 input.

    Attributes:
        geometry: Data, real structure and module.
        connection_form: Optional ``(n, n, N, N)`` perturbation of the Grassmann connection.
        tol: Tolerance from the file or the default.
    """

    geometry: Geometry
    connection_form: np.ndarray | None
    tol: Tolerance


@dataclass(frozen=True, eq=False)
class N11Input:
    """Parsed N=(1,1) input."""

    data: N11Data
    tol: Tolerance


def parse_entry(token: str) -> complex:
    """Parse one ``a+bi`` matrix entry.

    Raises:
        ValueError: for anything that is not a finite complex number in that form.
    """
    if not _ENTRY.match(token):
        raise ValueError(f"bad matrix entry {token!r}")
    try:
        return complex(token.replace("i", "j"))
    except ValueError:
        raise ValueError(f"bad matrix entry {token!r}") from None


def _block_matrix(m: np.ndarray, n: int, N: int) -> np.ndarray:
    """``(n N, n N)`` block matrix to the ``(n, n, N, N)`` layout."""
    return m.reshape(n, N, n, N).transpose(0, 2, 1, 3)


def parse_input(text: str, tol: Tolerance | None = None) -> N1Input | N11Input:
    """Parse an input file.

    Args:
        text: File contents.
        tol: Tolerance overriding the file's ``tol`` line.

    Raises:
        ParseError: with the offending line and field.
    """
    headers: dict[str, tuple[str, int]] = {}
    matrices: dict[str, list[tuple[np.ndarray, int]]] = {}
    tol_line: tuple[dict[str, float], int] | None = None
    lines = text.splitlines()
    pos = 0
    while pos < len(lines):
        lineno = pos + 1
        raw = lines[pos].split("#", 1)[0].strip()
        pos += 1
        if not raw:
            continue
        if raw.startswith("matrix"):
            words = raw.split()
            if len(words) < 2:
                raise ParseError("matrix block needs a field name", lineno)
            name, flags = words[1], words[2:]
            rows: list[list[complex]] = []
            start = lineno
            while True:
                if pos >= len(lines):
                    raise ParseError("matrix block is not closed by 'end'", start, name)
                row_no = pos + 1
                body = lines[pos].split("#", 1)[0].strip()
                pos += 1
                if not body:
                    continue
                if body == "end":
                    break
                try:
                    row = [parse_entry(t) for t in body.split()]
                except ValueError as exc:
                    raise ParseError(str(exc), row_no, name) from None
                if rows and len(row) != len(rows[0]):
                    raise ParseError(f"row has {len(row)} entries, expected {len(rows[0])}", row_no, name)
                rows.append(row)
            if not rows:
                raise ParseError("empty matrix", start, name)
            if name == "J":
                if flags != ["antilinear"]:
                    raise ParseError("J must be declared as 'matrix J antilinear'", start, name)
            elif flags:
                raise ParseError(f"unexpected words {' '.join(flags)!r}", start, name)
            if name in matrices and name not in _REPEATABLE:
                raise ParseError("field given twice", start, name)
            matrices.setdefault(name, []).append((np.array(rows, dtype=complex), start))
        elif raw.startswith("tol"):
            values: dict[str, float] = {}
            for item in raw.split()[1:]:
                key, sep, val = item.partition("=")
                if not sep or key not in ("eq", "rank"):
                    raise ParseError(f"expected eq=<x> or rank=<x>, got {item!r}", lineno, "tol")
                try:
                    values[key] = float(val)
                except ValueError:
                    raise ParseError(f"bad number {val!r}", lineno, "tol") from None
            tol_line = (values, lineno)
        elif ":" in raw:
            key, _, val = raw.partition(":")
            key = key.strip()
            if key not in ("kind", "name", "dim"):
                raise ParseError("unknown header", lineno, key)
            if key in headers:
                raise ParseError("header given twice", lineno, key)
            headers[key] = (val.strip(), lineno)
        else:
            raise ParseError(f"cannot parse {raw!r}", lineno)

    if "kind" not in headers:
        raise ParseError("missing 'kind:' header", None, "kind")
    kind, kline = headers["kind"]
    if kind not in KINDS:
        raise ParseError(f"kind must be one of {', '.join(KINDS)}", kline, "kind")
    if "dim" not in headers:
        raise ParseError("missing 'dim:' header", None, "dim")
    dim_text, dline = headers["dim"]
    try:
        dim = int(dim_text)
    except ValueError:
        raise ParseError(f"bad dimension {dim_text!r}", dline, "dim") from None
    if dim < 1:
        raise ParseError("dimension must be positive", dline, "dim")
    name = headers.get("name", ("", 0))[0]

    if tol is None:
        if tol_line is None:
            tol = Tolerance()
        else:
            values, tline = tol_line
            try:
                tol = Tolerance(values.get("eq", 1e-10), values.get("rank", min(1e-10, values.get("eq", 1e-10))))
            except ValueError as exc:
                raise ParseError(str(exc), tline, "tol") from None

    allowed = N1_FIELDS if kind == "n1" else N11_FIELDS
    for field_name, items in matrices.items():
        if field_name not in allowed:
            raise ParseError(f"not a field of kind {kind}", items[0][1], field_name)
    for field_name, items in matrices.items():
        if field_name in ("module-generators", "projection", "connection-form"):
            continue
        for m, line in items:
            if m.shape != (dim, dim):
                raise ParseError(f"shape {m.shape[0]}x{m.shape[1]} does not match dim {dim}", line, field_name)

    def need(field_name: str) -> tuple[np.ndarray, int]:
        if field_name not in matrices:
            raise ParseError("missing field", None, field_name)
        return matrices[field_name][0]

    gens = [m for m, _ in matrices.get("generator", [])]
    if not gens:
        raise ParseError("at least one generator is required", None, "generator")
    algebra = generate(gens, tol)
    if kind == "n11":
        ops = {f: need(f)[0] for f in ("dirac", "dirac-bar", "gamma", "hodge")}
        data = N11Data(algebra, ops["dirac"], ops["dirac-bar"], ops["gamma"], ops["hodge"], name)
        return N11Input(data, tol)
    return _build_n1(algebra, matrices, need, dim, name, tol)


def _build_n1(algebra: StarAlgebra, matrices, need, dim: int, name: str, tol: Tolerance) -> N1Input:
    data = N1Data(algebra, need("D")[0], need("gamma")[0], name)
    J, jline = need("J")
    try:
        rs = real_structure(data, AntilinearOp(J), tol)
    except ValueError as exc:
        raise ParseError(str(exc), jline, "J") from None
    if "module-generators" in matrices:
        g, gline = matrices["module-generators"][0]
        if g.shape[0] != dim:
            raise ParseError(f"needs {dim} rows, one column per generator", gline, "module-generators")
        n = g.shape[1]
        if "projection" in matrices:
            p, pline = matrices["projection"][0]
            if p.shape != (n * dim, n * dim):
                raise ParseError(f"shape must be {n * dim}x{n * dim}", pline, "projection")
            blocks = _block_matrix(p, n, dim)
            worst = max(algebra.residual(b) for b in blocks.reshape(-1, dim, dim))
            if worst > tol.eq_tol:
                raise ParseError(f"blocks must lie in the algebra (distance {worst:.3e})", pline, "projection")
            module = HermitianModule(algebra, g, blocks)
        else:
            module = module_from_generators(algebra, g, tol)
    else:
        if "projection" in matrices:
            raise ParseError("projection requires module-generators", matrices["projection"][0][1], "projection")
        module = default_module(algebra, data.gamma, tol)
    geometry = Geometry(data, rs, module)
    form = None
    if "connection-form" in matrices:
        f, fline = matrices["connection-form"][0]
        n = module.rank
        if f.shape != (n * dim, n * dim):
            raise ParseError(f"shape must be {n * dim}x{n * dim} for {n} module generators", fline, "connection-form")
        form = _block_matrix(f, n, dim)
        worst = max(geometry.forms.distance(w) for w in form.reshape(-1, dim, dim))
        if worst > tol.eq_tol:
            raise ParseError(f"blocks must be one-forms (distance {worst:.3e})", fline, "connection-form")
    return N1Input(geometry, form, tol)


def load_input(path: str | Path, tol: Tolerance | None = None) -> N1Input | N11Input:
    """Read and parse an input file."""
    return parse_input(Path(path).read_text(), tol)


def _real(x: float) -> str:
    x = float(x) + 0.0  # folds -0.0 into 0.0
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def format_complex(z: complex) -> str:
    """Shortest round-trip ``a+bi`` rendering."""
    re_, im = float(np.real(z)) + 0.0, float(np.imag(z)) + 0.0
    if not (np.isfinite(re_) and np.isfinite(im)):
        raise ValueError("cannot serialize a non-finite entry")
    if im == 0.0:
        return _real(re_)
    sign = "-" if im < 0 else "+"
    imag = _real(abs(im))
    if re_ == 0.0:
        return f"{'-' if im < 0 else ''}{imag}i"
    return f"{_real(re_)}{sign}{imag}i"


def _matrix_block(field_name: str, m: np.ndarray) -> list[str]:
    out = [f"matrix {field_name}"]
    out += [" ".join(format_complex(z) for z in row) for row in np.asarray(m)]
    out.append("end")
    return out


def _header(kind: str, name: str, dim: int, tol: Tolerance | None) -> list[str]:
    out = [f"kind: {kind}"]
    if name:
        out.append(f"name: {name}")
    out.append(f"dim: {dim}")
    if tol is not None:
        out.append(f"tol eq={tol.eq_tol!r} rank={tol.rank_tol!r}")
    return out


def dump_n11(data: N11Data, tol: Tolerance | None = None) -> str:
    """Serialize N=(1,1) data; the algebra is written through its orthonormal basis."""
    lines = _header("n11", data.name, data.hilbert_dim, tol)
    for b in data.algebra.basis:
        lines += _matrix_block("generator", b)
    for field_name, op in (("dirac", data.dirac), ("dirac-bar", data.dirac_bar),
                           ("gamma", data.gamma), ("hodge", data.hodge)):
        lines += _matrix_block(field_name, op)
    return "\n".join(lines) + "\n"


def dump_n1(geometry: Geometry, connection_form: np.ndarray | None = None, tol: Tolerance | None = None) -> str:
    """Serialize a geometry, including its module presentation."""
    data, module = geometry.data, geometry.module
    N, n = data.hilbert_dim, module.rank
    lines = _header("n1", data.name, N, tol)
    for b in data.algebra.basis:
        lines += _matrix_block("generator", b)
    lines += _matrix_block("D", data.dirac)
    lines += _matrix_block("gamma", data.gamma)
    lines += _matrix_block("J antilinear", geometry.real.J.matrix)
    lines += _matrix_block("module-generators", module.generators)
    lines += _matrix_block("projection", module.projection.transpose(0, 2, 1, 3).reshape(n * N, n * N))
    if connection_form is not None:
        lines += _matrix_block("connection-form", connection_form.transpose(0, 2, 1, 3).reshape(n * N, n * N))
    return "\n".join(lines) + "\n"
