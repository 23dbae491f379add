import functools

import pytest
from hypothesis import HealthCheck, settings

from ncsusy.gallery import geometry, n11_entry
from ncsusy.multiplicativity import product_setup

settings.register_profile(
    "ncsusy",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("ncsusy")

EQ_TOL = 1e-10


@functools.lru_cache(maxsize=None)
def cached_geometry(name: str):
    return geometry(name)


@functools.lru_cache(maxsize=None)
def cached_n11(name: str):
    return n11_entry(name)


@functools.lru_cache(maxsize=None)
def cached_setup(first: str, second: str):
    return product_setup(cached_geometry(first), cached_geometry(second))


@pytest.fixture
def two_point():
    return cached_geometry("two-point")


@pytest.fixture
def matrix_m2():
    return cached_geometry("matrix-m2")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import ACCEPTANCE_LINES
    except ImportError:
        return
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
