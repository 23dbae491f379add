import itertools

import numpy as np
import oracles
import pytest
from conftest import cached_n11
from hypothesis import given
from hypothesis import strategies as st

from ncsusy.algebra import generate
from ncsusy.extension import N11Data, verify_n11
from ncsusy.gallery import N11_GALLERY
from ncsusy.products import (
    VARIANTS,
    Variant,
    associated_n1_equivalence,
    heat_trace_residual,
    n11_product,
    product_reports,
    variant_distinguisher,
    variant_operators,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
PAIRS = list(itertools.product(N11_GALLERY, repeat=2))


def _random_n11(seed: int, k: int) -> N11Data:
    d, _, _, gamma, hodge = oracles.lemma_instance(np.random.default_rng(seed), k, "d")
    return N11Data.from_d(generate([np.eye(d.shape[0])]), d, gamma, hodge)


@pytest.mark.parametrize("pair", PAIRS, ids=lambda p: f"{p[0]}*{p[1]}")
def test_every_variant_preserves_validity_on_gallery_pairs(pair):
    x, y = cached_n11(pair[0]), cached_n11(pair[1])
    for v in VARIANTS:
        rep = verify_n11(n11_product(x, y, v))
        assert rep.passed, (v, [(c.tag, c.residual) for c in rep.failures])
        assert max(c.residual for c in rep.checks) <= 1e-10


@given(seeds, seeds, st.integers(1, 2), st.integers(1, 2))
def test_every_variant_preserves_validity_on_random_data(s1, s2, k1, k2):
    x, y = _random_n11(s1, k1), _random_n11(s2, k2)
    for v in VARIANTS:
        assert verify_n11(n11_product(x, y, v)).passed


def test_variant_formulas_written_out():
    x, y = cached_n11("clifford-4"), cached_n11("phi-two-point")
    k = np.kron
    i1, i2 = np.eye(x.hilbert_dim), np.eye(y.hilbert_dim)
    expected = {
        "main": (k(x.dirac, i2) + k(x.hodge, y.dirac), k(x.dirac_bar, y.hodge) + k(x.gamma, y.dirac_bar)),
        "v4": (k(x.dirac, i2) + k(x.gamma, y.dirac), k(x.dirac_bar, i2) + k(x.gamma, y.dirac_bar)),
        "v5": (k(x.dirac, y.gamma) + k(i1, y.dirac), k(x.dirac_bar, y.gamma) + k(i1, y.dirac_bar)),
    }
    for v, (dd, db) in expected.items():
        got = variant_operators(x, y, v)
        assert np.allclose(got[0], dd) and np.allclose(got[1], db)


def test_product_carries_tensor_grading_and_hodge():
    x, y = cached_n11("clifford-4"), cached_n11("clifford-4")
    p = n11_product(x, y)
    assert np.allclose(p.gamma, np.kron(x.gamma, y.gamma))
    assert np.allclose(p.hodge, np.kron(x.hodge, y.hodge))
    assert p.name == "clifford-4*clifford-4[main]"
    assert p.algebra.dim == x.algebra.dim * y.algebra.dim


@pytest.mark.parametrize("pair", PAIRS, ids=lambda p: f"{p[0]}*{p[1]}")
def test_associated_n1_equivalence(pair):
    rep = associated_n1_equivalence(cached_n11(pair[0]), cached_n11(pair[1]))
    assert rep.passed
    assert rep.residual("product.associated-n1-equivalence") <= 1e-10


@given(seeds, seeds, st.floats(0.1, 3.0))
def test_heat_trace_factorizes(s1, s2, t):
    x, y = _random_n11(s1, 1), _random_n11(s2, 2)
    for v in VARIANTS:
        assert heat_trace_residual(x, y, v, t) <= 1e-10


def test_distance_table_is_symmetric_with_zero_diagonal():
    table = variant_distinguisher(cached_n11("clifford-4"), cached_n11("phi-two-point"))
    c = table.combined
    assert np.allclose(c, c.T)
    assert np.allclose(np.diag(c), 0.0)
    assert table.distance("main", "v4") == pytest.approx(4.0)


def test_all_rules_coincide_against_the_trivial_factor():
    table = variant_distinguisher(cached_n11("trivial"), cached_n11("clifford-4"))
    assert table.combined.max() <= 1e-12


def test_each_other_rule_differs_from_main_on_clifford_square():
    table = variant_distinguisher(cached_n11("clifford-4"), cached_n11("clifford-4"))
    for v in VARIANTS[1:]:
        assert table.distance(Variant.MAIN, v) > 1e-6


def test_product_reports_lists_each_variant():
    rep = product_reports(cached_n11("clifford-4"), cached_n11("trivial"))
    assert rep.passed
    lines = [line for line in rep.to_text().splitlines() if line.startswith("variant\t")]
    assert [line.split("\t")[1] for line in lines] == [f"variant={v.value}" for v in VARIANTS]


def test_variant_parsing():
    assert Variant("v3") is Variant.V3
    assert str(Variant.MAIN) == "main"
    with pytest.raises(ValueError):
        Variant("v6")
