"""Command-line front end.

Every command writes a report (text by default, JSON with ``--json``) to
standard output or ``--output``. Exit status: 0 when every check passes,
1 on a failing check, 2 on an input error.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .connections import Connection, Geometry, grassmann, perturbed, random_connection_form, verify_connection
from .extension import HODGE_CHOICES, N11Data, PreconditionFailed, phi, verify_n11
from .gallery import N1_GALLERY, N11_GALLERY, geometry, n11_entry
from .linalg import Tolerance
from .multiplicativity import check_multiplicativity, product_pipeline_trace, product_setup
from .products import VARIANTS, Variant
from .report import Report
from .spectral import verify_n1, verify_real_structure
from .inputfile import N1Input, N11Input, ParseError, dump_n11, load_input

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(click.ClickException):
    """Bad input; exits with status 2."""

    exit_code = EXIT_INPUT


def _tolerance(eq: float | None) -> Tolerance | None:
    if eq is None:
        return None
    try:
        return Tolerance(eq, min(eq, 1e-10))
    except ValueError as exc:
        raise InputError(f"--tol: {exc}") from None


def _load(source: str, tol: Tolerance | None) -> N1Input | N11Input | None:
    """Parse ``source`` when it names an existing file, otherwise return ``None``."""
    path = Path(source)
    if not path.is_file():
        return None
    try:
        return load_input(path, tol)
    except ParseError as exc:
        raise InputError(f"{source}: {exc}") from None
    except ValueError as exc:
        raise InputError(f"{source}: {exc}") from None


def _effective(tol: Tolerance | None, parsed: N1Input | N11Input | None) -> Tolerance:
    if tol is not None:
        return tol
    return parsed.tol if parsed is not None else Tolerance()


def _n1_input(source: str, tol: Tolerance | None) -> tuple[Geometry, np.ndarray | None, Tolerance]:
    parsed = _load(source, tol)
    if parsed is None:
        if source not in N1_GALLERY:
            raise InputError(f"{source!r} is neither a file nor an N=1 gallery entry "
                             f"({', '.join(N1_GALLERY)})")
        t = _effective(tol, None)
        return geometry(source, t), None, t
    if not isinstance(parsed, N1Input):
        raise InputError(f"{source}: expected kind n1")
    return parsed.geometry, parsed.connection_form, parsed.tol


def _n11_input(source: str, tol: Tolerance | None) -> tuple[N11Data, Tolerance]:
    parsed = _load(source, tol)
    if parsed is None:
        if source not in N11_GALLERY:
            raise InputError(f"{source!r} is neither a file nor an N=(1,1) gallery entry "
                             f"({', '.join(N11_GALLERY)})")
        t = _effective(tol, None)
        return n11_entry(source, t), t
    if not isinstance(parsed, N11Input):
        raise InputError(f"{source}: expected kind n11")
    return parsed.data, parsed.tol


def _connection(g: Geometry, form: np.ndarray | None, seed: int, scale: float) -> Connection:
    conn = grassmann(g)
    if form is not None:
        conn = perturbed(conn, form, "file-form")
    if scale:
        rng = np.random.default_rng(seed)
        conn = perturbed(conn, random_connection_form(g, rng, scale), f"random(seed={seed},scale={scale!r})")
    return conn


def _emit(report: Report, output: str | None, as_json: bool) -> None:
    text = report.to_json() if as_json else report.to_text()
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


def _finish(ok: bool) -> None:
    sys.exit(EXIT_PASS if ok else EXIT_FAIL)


_tol_option = click.option("--tol", type=float, default=None,
                           help="Equality threshold for every check (default 1e-10 or the file's tol line).")
_output_option = click.option("--output", type=click.Path(dir_okay=False), default=None,
                              help="Write the report here instead of standard output.")
_json_option = click.option("--json", "as_json", is_flag=True, help="Emit the report as JSON.")


@click.group()
@click.version_option(__version__, prog_name="ncsusy")
def main() -> None:
    """Verify finite N=1 and N=(1,1) spectral data, extend N=1 data and test product rules."""


@main.command("list-gallery")
def list_gallery() -> None:
    """List the shipped examples."""
    for e in N1_GALLERY.values():
        flag = "extendable" if e.extendable else "not-extendable"
        click.echo(f"n1\t{e.name}\t{flag}\t{e.description}")
    for e in N11_GALLERY.values():
        click.echo(f"n11\t{e.name}\t-\t{e.description}")


@main.command("verify-n1")
@click.argument("source")
@_tol_option
@_output_option
@_json_option
def verify_n1_cmd(source: str, tol: float | None, output: str | None, as_json: bool) -> None:
    """Check the N=1 axioms and the real structure of SOURCE (gallery name or file)."""
    g, _, t = _n1_input(source, _tolerance(tol))
    rep = verify_n1(g.data, t)
    rep.command, rep.input = "verify-n1", source
    rep.extend(verify_real_structure(g.data, g.real, t))
    _emit(rep, output, as_json)
    _finish(rep.passed)


@main.command("verify-n11")
@click.argument("source")
@_tol_option
@_output_option
@_json_option
def verify_n11_cmd(source: str, tol: float | None, output: str | None, as_json: bool) -> None:
    """Check the N=(1,1) axioms of SOURCE (gallery name or file)."""
    data, t = _n11_input(source, _tolerance(tol))
    rep = verify_n11(data, t)
    rep.command, rep.input = "verify-n11", source
    _emit(rep, output, as_json)
    _finish(rep.passed)


@main.command("extend")
@click.argument("source")
@click.option("--hodge", type=click.Choice(HODGE_CHOICES), default=HODGE_CHOICES[0], show_default=True,
              help="Hodge operator on the extended space.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for --perturb.")
@click.option("--perturb", type=float, default=0.0, show_default=True,
              help="Scale of a random compatible perturbation of the Grassmann connection.")
@click.option("--candidate", type=click.Path(dir_okay=False), default=None,
              help="Write the resulting N=(1,1) data here in the input format.")
@_tol_option
@_output_option
@_json_option
def extend_cmd(source: str, hodge: str, seed: int, perturb: float, candidate: str | None, tol: float | None,
               output: str | None, as_json: bool) -> None:
    """Extend the N=1 data SOURCE to N=(1,1) data through a connection."""
    g, form, t = _n1_input(source, _tolerance(tol))
    try:
        conn = _connection(g, form, seed, perturb)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    try:
        res = phi(conn, hodge=hodge, tol=t)
    except PreconditionFailed as exc:
        exc.report.input = source
        _emit(exc.report, output, as_json)
        click.echo(f"error: precondition failed: {', '.join(exc.failed)}", err=True)
        sys.exit(EXIT_FAIL)
    res.report.input = source
    _emit(res.report, output, as_json)
    if candidate:
        Path(candidate).write_text(dump_n11(res.n11, t))
    _finish(res.passed)


def _parse_variants(text: str) -> tuple[Variant, ...]:
    if text == "all":
        return VARIANTS
    try:
        wanted = {Variant(v.strip()) for v in text.split(",") if v.strip()}
    except ValueError:
        raise InputError(f"--variants: expected all or a comma list of {', '.join(v.value for v in VARIANTS)}") from None
    if not wanted:
        raise InputError("--variants: empty list")
    return tuple(v for v in VARIANTS if v in wanted)


@main.command("check-mult")
@click.argument("first")
@click.argument("second")
@click.option("--variants", default="all", show_default=True,
              help="all, or a comma list from main,v1,v2,v3,v4,v5.")
@click.option("--trace", is_flag=True, help="Also verify every intermediate identification.")
@_tol_option
@_output_option
@_json_option
def check_mult_cmd(first: str, second: str, variants: str, trace: bool, tol: float | None,
                   output: str | None, as_json: bool) -> None:
    """Compare the extension of FIRST x SECOND with each product rule of the two extensions.

    Exits 0 when main is equal, every other requested rule is witnessed
    unequal, and the pair is not degenerate (all rules coinciding).
    """
    chosen = _parse_variants(variants)
    t0 = _tolerance(tol)
    g1, f1, t1 = _n1_input(first, t0)
    g2, f2, t2 = _n1_input(second, t0)
    t = t0 if t0 is not None else Tolerance(max(t1.eq_tol, t2.eq_tol), max(t1.rank_tol, t2.rank_tol))
    try:
        c1, c2 = _connection(g1, f1, 0, 0.0), _connection(g2, f2, 0, 0.0)
        setup = product_setup(c1, c2, t, trace=True if trace else None)
    except PreconditionFailed as exc:
        click.echo(f"error: not extendable: {', '.join(exc.failed)}", err=True)
        sys.exit(EXIT_FAIL)
    except ValueError as exc:
        raise InputError(f"--trace: {exc}" if trace else str(exc)) from None
    result = check_multiplicativity(setup, chosen, t)
    rep = result.report
    rep.input = f"{first}*{second}"
    if trace:
        try:
            rep.extend(product_pipeline_trace(setup, t))
        except ValueError as exc:
            raise InputError(f"--trace: {exc}") from None
    _emit(rep, output, as_json)
    if result.degenerate:
        click.echo("note: all product rules coincide on this pair (degenerate)", err=True)
    _finish(result.ok and not result.degenerate)


if __name__ == "__main__":  # pragma: no cover
    main()
