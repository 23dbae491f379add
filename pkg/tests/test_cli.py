import json

import numpy as np
import pytest
from click.testing import CliRunner
from conftest import cached_geometry

from ncsusy.cli import EXIT_FAIL, EXIT_INPUT, EXIT_PASS, main
from ncsusy.extension import verify_n11
from ncsusy.inputfile import N11Input, dump_n1, load_input


def run(*args: str):
    return CliRunner().invoke(main, list(args))


def _records(text: str, kind: str) -> list[dict[str, str]]:
    out = []
    for line in text.splitlines():
        head, *fields = line.split("\t")
        if head == kind:
            out.append(dict(f.split("=", 1) for f in fields))
    return out


def test_list_gallery():
    res = run("list-gallery")
    assert res.exit_code == EXIT_PASS
    names = [line.split("\t")[1] for line in res.output.splitlines()]
    assert {"two-point", "matrix-m2", "two-point*matrix-m2", "clifford-4"} <= set(names)


def test_verify_n1_gallery_passes():
    res = run("verify-n1", "two-point")
    assert res.exit_code == EXIT_PASS
    assert res.output.splitlines()[-1].startswith("summary\tverdict=pass")


def test_verify_n1_non_self_adjoint_file_fails(tmp_path):
    g = cached_geometry("two-point")
    text = dump_n1(g).replace("matrix D\n0 1 1 0\n", "matrix D\n0 2 1 0\n")
    path = tmp_path / "bad.txt"
    path.write_text(text)
    res = run("verify-n1", str(path))
    assert res.exit_code == EXIT_FAIL
    failed = {r["tag"] for r in _records(res.output, "check") if r["verdict"] == "fail"}
    assert "n1.dirac-self-adjoint" in failed


def test_malformed_file_is_an_input_error(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("kind: n1\nname: x\ndim: 2\nmatrix D\n0 1\n1\nend\n")
    res = run("verify-n1", str(path))
    assert res.exit_code == EXIT_INPUT
    assert "line 6, field D" in res.output


def test_unknown_gallery_name_is_an_input_error():
    assert run("verify-n1", "no-such-entry").exit_code == EXIT_INPUT
    assert run("verify-n11", "two-point").exit_code == EXIT_INPUT
    assert run("check-mult", "two-point", "two-point", "--variants", "v9").exit_code == EXIT_INPUT
    assert run("verify-n1", "two-point", "--tol", "-1").exit_code == EXIT_INPUT


@pytest.mark.parametrize("name", ["trivial", "clifford-4", "phi-two-point"])
def test_verify_n11_gallery_passes(name):
    assert run("verify-n11", name).exit_code == EXIT_PASS


def test_extend_writes_a_candidate_that_verifies(tmp_path):
    cand = tmp_path / "cand.txt"
    res = run("extend", "two-point", "--candidate", str(cand))
    assert res.exit_code == EXIT_PASS
    tags = {r["tag"] for r in _records(res.output, "check")}
    assert {"connection.flip-well-defined", "connection.leibniz", "n11.dirac-squares-equal",
            "n11.diracs-anticommute"} <= tags
    parsed = load_input(cand)
    assert isinstance(parsed, N11Input)
    assert verify_n11(parsed.data).passed
    assert run("verify-n11", str(cand)).exit_code == EXIT_PASS


def test_extend_with_wrong_hodge_names_the_broken_axioms():
    res = run("extend", "two-point", "--hodge", "gamma-tensor-1")
    assert res.exit_code == EXIT_FAIL
    failed = {r["tag"] for r in _records(res.output, "check") if r["verdict"] == "fail"}
    assert failed == {"n11.hodge-intertwines-d", "n11.hodge-dirac-relations"}


def test_extend_uses_the_file_connection_form(tmp_path):
    from ncsusy.connections import random_connection_form
    g = cached_geometry("two-point")
    w = random_connection_form(g, np.random.default_rng(2), 0.5)
    path = tmp_path / "with-form.txt"
    path.write_text(dump_n1(g, w))
    plain = run("extend", "two-point")
    with_form = run("extend", str(path))
    assert with_form.exit_code in (EXIT_PASS, EXIT_FAIL)
    assert _records(plain.output, "check") != _records(with_form.output, "check")


def test_extend_seed_is_reproducible():
    a = run("extend", "two-point", "--perturb", "0.5", "--seed", "11")
    b = run("extend", "two-point", "--perturb", "0.5", "--seed", "11")
    c = run("extend", "two-point", "--perturb", "0.5", "--seed", "12")
    assert a.output == b.output
    assert a.output != c.output


def test_check_mult_full_table():
    res = run("check-mult", "two-point", "two-point")
    assert res.exit_code == EXIT_PASS
    rows = {r["variant"]: r["verdict"] for r in _records(res.output, "variant")}
    assert rows == {"main": "equal", "v1": "unequal", "v2": "unequal", "v3": "unequal", "v4": "unequal",
                    "v5": "unequal"}


def test_check_mult_main_only():
    res = run("check-mult", "two-point", "two-point", "--variants", "main")
    assert res.exit_code == EXIT_PASS
    assert [r["variant"] for r in _records(res.output, "variant")] == ["main"]


def test_check_mult_trivial_pair_is_degenerate():
    res = run("check-mult", "trivial", "trivial")
    assert res.exit_code == EXIT_FAIL
    assert {r["verdict"] for r in _records(res.stdout, "variant")} == {"equal"}
    assert "degenerate" in res.stderr


def test_check_mult_trace_flag():
    res = run("check-mult", "two-point", "two-point", "--variants", "main", "--trace")
    assert res.exit_code == EXIT_PASS
    assert any(r["tag"].startswith("trace.") for r in _records(res.output, "check"))


def test_json_output_and_file(tmp_path):
    out = tmp_path / "r.json"
    res = run("verify-n1", "matrix-m2", "--json", "--output", str(out))
    assert res.exit_code == EXIT_PASS
    assert res.stdout == ""
    doc = json.loads(out.read_text())
    assert doc["command"] == "verify-n1"
    assert doc["verdict"] == "pass"
    assert all(r["verdict"] == "pass" for r in doc["records"] if r["kind"] == "check")


@pytest.mark.parametrize("args", [
    ("verify-n1", "matrix-m2"),
    ("verify-n11", "clifford-4"),
    ("extend", "two-point", "--perturb", "0.3", "--seed", "4"),
    ("check-mult", "two-point", "two-point"),
    ("list-gallery",),
])
def test_reports_are_byte_identical_across_runs(args):
    assert run(*args).output == run(*args).output


def test_check_mult_trace_beyond_desk_scale_is_an_input_error():
    res = run("check-mult", "two-point", "matrix-m2", "--variants", "main", "--trace")
    assert res.exit_code == EXIT_INPUT
    assert "plain dimension" in res.output
