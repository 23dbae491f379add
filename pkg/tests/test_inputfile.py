import numpy as np
import pytest
from conftest import cached_geometry, cached_n11
from hypothesis import given
from hypothesis import strategies as st

from ncsusy.connections import random_connection_form
from ncsusy.linalg import Tolerance
from ncsusy.inputfile import (
    N1Input,
    N11Input,
    ParseError,
    dump_n1,
    dump_n11,
    format_complex,
    parse_entry,
    parse_input,
)
from ncsusy.spectral import verify_n1

HEADER = "kind: n1\nname: tiny\ndim: 2\n"
SCALARS = "matrix generator\n1 0\n0 1\nend\n"
GAMMA = "matrix gamma\n1 0\n0 -1\nend\n"
J = "matrix J antilinear\n1 0\n0 1\nend\n"
DIRAC = "matrix D\n0 1\n1 0\nend\n"


def _tiny(**over: str) -> str:
    parts = {"header": HEADER, "gen": SCALARS, "D": DIRAC, "gamma": GAMMA, "J": J}
    parts.update(over)
    return "".join(parts.values())


def _error(text: str) -> ParseError:
    with pytest.raises(ParseError) as info:
        parse_input(text)
    return info.value


@pytest.mark.parametrize("name", ["trivial", "two-point", "matrix-m2", "matrix-m2-nonnormal"])
def test_n1_round_trip(name):
    g = cached_geometry(name)
    parsed = parse_input(dump_n1(g))
    assert isinstance(parsed, N1Input)
    h = parsed.geometry
    assert h.data.name == name
    assert np.array_equal(h.data.dirac, g.data.dirac)
    assert np.array_equal(h.data.gamma, g.data.gamma)
    assert np.array_equal(h.real.J.matrix, g.real.J.matrix)
    assert h.data.algebra.dim == g.data.algebra.dim
    assert np.allclose(h.module.projection_matrix(), g.module.projection_matrix())
    assert dump_n1(h) == dump_n1(g)


def test_connection_form_round_trip(two_point):
    w = random_connection_form(two_point, np.random.default_rng(5), 0.3)
    parsed = parse_input(dump_n1(two_point, w))
    assert np.array_equal(parsed.connection_form, w)


@pytest.mark.parametrize("name", ["clifford-4", "phi-two-point"])
def test_n11_round_trip(name):
    x = cached_n11(name)
    parsed = parse_input(dump_n11(x))
    assert isinstance(parsed, N11Input)
    for attr in ("dirac", "dirac_bar", "gamma", "hodge"):
        assert np.array_equal(getattr(parsed.data, attr), getattr(x, attr))


def test_hand_written_file_parses_and_verifies():
    parsed = parse_input("# a comment\n" + _tiny())
    assert parsed.geometry.hilbert_dim == 2
    assert verify_n1(parsed.geometry.data).passed


def test_tol_line_and_override():
    parsed = parse_input(_tiny(header=HEADER + "tol eq=1e-8 rank=1e-11\n"))
    assert (parsed.tol.eq_tol, parsed.tol.rank_tol) == (1e-8, 1e-11)
    parsed = parse_input(_tiny(header=HEADER + "tol eq=1e-8 rank=1e-11\n"), Tolerance(1e-6, 1e-10))
    assert parsed.tol.eq_tol == 1e-6


@pytest.mark.parametrize("token, value", [
    ("1", 1), ("-2.5", -2.5), ("1+2i", 1 + 2j), ("0.5-0.25i", 0.5 - 0.25j), ("-i", -1j), ("1e-3i", 1e-3j),
])
def test_parse_entry(token, value):
    assert parse_entry(token) == value


@given(st.complex_numbers(allow_nan=False, allow_infinity=False, max_magnitude=1e12))
def test_format_complex_round_trips(z):
    assert parse_entry(format_complex(z)) == z


def test_negative_zero_is_folded():
    assert format_complex(complex(-0.0, -0.0)) == "0"


def test_malformed_row_names_field_and_line():
    err = _error(_tiny(D="matrix D\n0 1\n1\nend\n"))
    assert err.field == "D"
    assert err.line == 10
    assert "line 10, field D" in str(err)


def test_bad_entry_names_field():
    err = _error(_tiny(gamma="matrix gamma\n1 0\n0 minus1\nend\n"))
    assert err.field == "gamma"


def test_missing_antilinear_marker():
    err = _error(_tiny(J="matrix J\n1 0\n0 1\nend\n"))
    assert err.field == "J"


def test_wrong_shape():
    err = _error(_tiny(D="matrix D\n0 1 0\n1 0 0\n0 0 0\nend\n"))
    assert err.field == "D"


def test_unknown_and_duplicate_fields():
    assert _error(_tiny(extra="matrix Q\n1 0\n0 1\nend\n")).field == "Q"
    assert _error(_tiny(extra=GAMMA)).field == "gamma"


def test_missing_kind_and_missing_field():
    with pytest.raises(ParseError):
        parse_input(_tiny(header="name: tiny\ndim: 2\n"))
    assert _error(_tiny(D="")).field == "D"


def test_unterminated_block():
    with pytest.raises(ParseError):
        parse_input(HEADER + SCALARS + "matrix D\n0 1\n1 0\n")


def test_n11_kind_requires_its_fields():
    text = "kind: n11\nname: z\ndim: 2\n" + SCALARS + GAMMA
    with pytest.raises(ParseError):
        parse_input(text)
