import functools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mffactor import geometry as g
from mffactor import source
from mffactor.errors import InvalidConfig, PositivityError, PositivityWarning
from mffactor.source import SQRT_2PI


@functools.lru_cache(maxsize=None)
def _nodes(n):
    return np.polynomial.legendre.leggauss(n)


def _gl(fn, a, b, n=2000):
    x, w = _nodes(n)
    t = 0.5 * (b - a) * (x + 1) + a
    return 0.5 * (b - a) * np.sum(w * fn(t))


def test_eval_source_inside_and_outside(kite_source):
    assert source.eval_source(kite_source, (0.0, 0.0), 0.0) == pytest.approx(3.0)
    assert source.eval_source(kite_source, (2.5, 0.0), 0.05) == 0.0
    assert source.eval_source(kite_source, (0.0, 0.0), 0.2) == 0.0


def test_sign_changing_source_warns(kite):
    with pytest.warns(PositivityWarning):
        s = source.make_source(kite, "radial", 3.0, -4.0, temporal=(1, 1))
    assert not s.is_positive
    assert s.spatial(np.zeros((1, 2)))[0] < 0


def test_strict_source_raises(kite):
    with pytest.raises(PositivityError):
        source.make_source(kite, "radial", 3.0, -4.0, temporal=(1, 1), strict=True)


def test_unit_profile_closed_form(kite):
    s = source.make_source(kite, "constant", 2.0, t_min=0.0, t_max=0.7)
    for k in (0.3, 2.0, 11.0):
        want = 2.0 * (np.exp(1j * k * 0.7) - 1) / (1j * k * SQRT_2PI)
        assert source.frequency_source(s, (0.0, 0.0), k) == pytest.approx(want, rel=1e-13)
    assert source.frequency_source(s, (0.0, 0.0), 0.0) == pytest.approx(2.0 * 0.7 / SQRT_2PI)


def test_affine_profile_matches_gauss_oracle(kite_source):
    k = np.pi
    want = 3.0 * _gl(lambda t: (t + 1) * np.exp(1j * k * t), 0.0, 0.1) / SQRT_2PI
    got = source.frequency_source(kite_source, (0.1, 0.2), k)
    assert abs(got - want) <= 1e-12 * abs(want)


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=5), st.floats(0, 3), st.floats(0.05, 4),
       st.floats(-40, 40))
@settings(max_examples=60, deadline=None)
def test_closed_form_agrees_with_quadrature(coeffs, t0, T, k):
    got = source.polynomial_time_transform(coeffs, t0, t0 + T, k)
    want = _gl(lambda t: np.polynomial.polynomial.polyval(t, coeffs) * np.exp(1j * k * t), t0, t0 + T)
    scale = _gl(lambda t: np.abs(np.polynomial.polynomial.polyval(t, coeffs)), t0, t0 + T) + 1e-300
    assert abs(got - want) <= 1e-10 * scale


@given(st.floats(-30, 30))
@settings(max_examples=40, deadline=None)
def test_conjugate_symmetry(k):
    s = source.make_source(g.Ball((0.0, 0.0), 1.0), "affine", 1.0, 2.0, (1.0, 0.5), (1, -0.3, 0.2), 0.2, 1.5)
    x = (0.1, 0.3)
    assert source.frequency_source(s, x, -k) == pytest.approx(np.conj(source.frequency_source(s, x, k)), abs=1e-15)


def test_trivial_bound(kite_source):
    ks = np.linspace(-50, 50, 101)
    vals = np.abs(source.frequency_source(kite_source, (0.0, 0.0), ks))
    assert vals.max() <= kite_source.duration * kite_source.sup_abs() / SQRT_2PI * (1 + 1e-12)


def test_tabulated_profile_gauss(kite):
    prof = source.TabulatedProfile((0.0, 0.05, 0.1), (1.0, 1.05, 1.1), nodes=64)
    s = source.SpaceTimeSource(source.SpatialFactor("constant", 3.0), prof, 0.0, 0.1, kite)
    ref = source.frequency_source(source.make_source(kite, "constant", 3.0, temporal=(1, 1)), (0.0, 0.0), 2.0)
    assert source.frequency_source(s, (0.0, 0.0), 2.0) == pytest.approx(ref, rel=1e-12)


def test_tabulated_needs_two_nodes():
    with pytest.raises(InvalidConfig):
        source.TabulatedProfile((0.0, 1.0), (1.0, 1.0), nodes=1)


def test_window_checks(kite):
    with pytest.raises(InvalidConfig):
        source.make_source(kite, t_min=0.2, t_max=0.1)
    with pytest.raises(InvalidConfig):
        source.make_source(kite, t_min=-1.0, t_max=0.1)


def test_unknown_spatial_kind():
    with pytest.raises(InvalidConfig):
        source.SpatialFactor("gaussian")


def test_example_sources_flags(kite):
    with warnings.catch_warnings():
        warnings.simplefilter("error", PositivityWarning)
        source.make_source(kite, "constant", 3.0, temporal=(1, 1))
    with pytest.warns(PositivityWarning):
        source.make_source(kite, "affine", 3.0, 0.0, (1.0, 0.0), (1, 1))
