import warnings

import numpy as np
import pytest

from mffactor import geometry, source
from mffactor.errors import PositivityWarning
from mffactor.spectral import FrequencyGrid

K_MAX = 16 * np.pi / 6


@pytest.fixture(scope="session")
def kite():
    return geometry.Kite()


@pytest.fixture(scope="session")
def cube():
    return geometry.Cube((0.0, 0.0, 0.0), (0.5, 0.5, 0.5))


@pytest.fixture(scope="session")
def ball3():
    return geometry.Ball((0.0, 0.0, 0.0), 0.5)


@pytest.fixture(scope="session")
def band_grid():
    return FrequencyGrid(0.0, K_MAX, 16)


@pytest.fixture(scope="session")
def kite_source(kite):
    return source.make_source(kite, "constant", 3.0, temporal=(1.0, 1.0))


@pytest.fixture(scope="session")
def kite_quad(kite):
    return geometry.build_quadrature(kite, 48, "gauss")


def quiet_source(*args, **kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PositivityWarning)
        return source.make_source(*args, **kwargs)


ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""
    def record(number, passed, detail):
        ACCEPTANCE[number] = (bool(passed), detail)
        print(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
        return bool(passed)
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    passed = sum(ok for ok, _ in ACCEPTANCE.values())
    terminalreporter.write_line(f"{passed}/{len(ACCEPTANCE)} criteria passed")
