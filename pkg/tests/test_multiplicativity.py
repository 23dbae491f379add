import numpy as np
import pytest
from conftest import cached_geometry, cached_setup

from ncsusy.connections import grassmann, perturbed, random_connection_form
from ncsusy.gallery import GALLERY_PAIRS
from ncsusy.multiplicativity import (
    WITNESS_THRESHOLD,
    VariantRow,
    check_multiplicativity,
    product_pipeline_trace,
    product_setup,
)
from ncsusy.products import VARIANTS, Variant, variant_operators

TRACE_TAGS = {
    "trace.forms-sum", "trace.forms-direct", "trace.differential", "trace.hermitian-factorizes",
    "trace.connection-grassmann", "trace.iso-forms-module", "trace.iso-module-forms", "trace.flip",
    "trace.right-connection", "trace.iso-triple", "trace.tensored-connection", "trace.contraction",
    "trace.contraction-bar", "trace.dirac", "trace.dirac-bar",
}


@pytest.mark.parametrize("pair", GALLERY_PAIRS, ids=lambda p: f"{p[0]}*{p[1]}")
def test_main_rule_is_equal_on_every_pair(pair):
    res = check_multiplicativity(cached_setup(*pair))
    assert res.report.passed, [(c.tag, c.residual) for c in res.report.failures]
    row = res.row(Variant.MAIN)
    assert row.verdict == "equal"
    assert row.residual <= 1e-10


@pytest.mark.parametrize("pair", [p for p in GALLERY_PAIRS if "trivial" not in p], ids=lambda p: f"{p[0]}*{p[1]}")
def test_other_rules_are_witnessed_unequal(pair):
    res = check_multiplicativity(cached_setup(*pair))
    assert not res.degenerate
    for v in VARIANTS[1:]:
        assert res.row(v).witnessed, v
        assert res.row(v).residual > WITNESS_THRESHOLD
    assert res.ok


@pytest.mark.parametrize("pair", [p for p in GALLERY_PAIRS if "trivial" in p], ids=lambda p: f"{p[0]}*{p[1]}")
def test_pairs_with_the_trivial_factor_are_degenerate(pair):
    res = check_multiplicativity(cached_setup(*pair))
    assert res.degenerate
    assert all(r.verdict == "equal" for r in res.rows)
    assert not res.ok


def test_variants_are_isospectral_to_main():
    res = check_multiplicativity(cached_setup("two-point", "matrix-m2"))
    for r in res.rows:
        assert r.spectrum_dirac <= 1e-10 and r.spectrum_dirac_bar <= 1e-10


def test_transport_is_unitary_and_intertwines():
    setup = cached_setup("two-point", "two-point")
    iso = setup.iso
    u = iso.matrix
    assert np.allclose(u.conj().T @ u, np.eye(u.shape[1]))
    assert iso.report().passed
    x1, x2 = setup.phi1.n11, setup.phi2.n11
    assert np.linalg.norm(iso.transport(setup.phi.n11.gamma) - np.kron(x1.gamma, x2.gamma), 2) <= 1e-10
    dv, bv = variant_operators(x1, x2, Variant.MAIN)
    assert np.linalg.norm(iso.transport(setup.phi.n11.dirac) - dv, 2) <= 1e-10
    assert np.linalg.norm(iso.transport(setup.phi.n11.dirac_bar) - bv, 2) <= 1e-10


def test_pipeline_trace_on_two_point_square():
    rep = product_pipeline_trace(cached_setup("two-point", "two-point"))
    tags = {c.tag for c in rep.checks}
    assert TRACE_TAGS <= tags
    assert rep.passed, [(c.tag, c.residual) for c in rep.failures]
    assert max(c.residual for c in rep.checks if c.tag.startswith("trace.")) <= 1e-10



def test_requested_variants_only():
    res = check_multiplicativity(cached_setup("two-point", "two-point"), [Variant.MAIN])
    assert [r.variant for r in res.rows] == [Variant.MAIN]
    assert res.ok


def test_row_verdicts():
    assert VariantRow(Variant.V1, 1e-12, 0.0, 0.0, 0.0, 1e-10).verdict == "equal"
    assert VariantRow(Variant.V1, 1e-8, 0.0, 0.0, 0.0, 1e-10).verdict == "inconclusive"
    assert VariantRow(Variant.V1, 0.0, 1e-3, 0.0, 0.0, 1e-10).verdict == "unequal"


def test_perturbed_connections_multiply():
    g1, g2 = cached_geometry("two-point"), cached_geometry("two-point")
    rng = np.random.default_rng(7)
    c1 = perturbed(grassmann(g1), random_connection_form(g1, rng, 0.4))
    c2 = perturbed(grassmann(g2), random_connection_form(g2, rng, 0.4))
    res = check_multiplicativity(product_setup(c1, c2))
    assert res.row(Variant.MAIN).verdict == "equal"


def test_non_extendable_factor_is_not_ok():
    res = check_multiplicativity(cached_setup("matrix-m2-nonnormal", "two-point"))
    assert not res.ok
    assert "n11.d-nilpotent" in {c.tag for c in res.report.failures}
