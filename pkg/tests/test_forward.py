import numpy as np
import pytest

from mffactor import forward
from mffactor import geometry as g
from mffactor import source
from mffactor.errors import InvalidGeometry
from mffactor.source import SQRT_2PI
from mffactor.spectral import FrequencyGrid


def _f_unit(k, T):
    """(2 pi)^(-1/2) int_0^T exp(ikt) dt for unit amplitude."""
    k = np.asarray(k, dtype=float)
    safe = np.where(k == 0, 1.0, k)
    return np.where(k == 0, T, (np.exp(1j * k * T) - 1) / (1j * safe)) / SQRT_2PI


def _ball_transform(k, r):
    """int_{|y|<r} exp(-i k x.y) dy, even in k."""
    k = np.abs(np.asarray(k, dtype=float))
    safe = np.where(k == 0, 1.0, k)
    big = 4 * np.pi * (np.sin(safe * r) - safe * r * np.cos(safe * r)) / safe ** 3
    return np.where(k == 0, 4 * np.pi * r ** 3 / 3, big)


@pytest.fixture(scope="module")
def ball_setup(ball3):
    return source.make_source(ball3, "constant", 1.0, t_min=0.0, t_max=0.1)


@pytest.mark.filterwarnings("ignore::mffactor.errors.PositivityWarning")
def test_zero_source_gives_zero(ball3, band_grid):
    zero = source.make_source(ball3, "constant", 1.0, temporal=(0.0,))
    q = g.build_quadrature(ball3, 8, "gauss")
    assert np.all(forward.far_field(zero, q, (0.0, 0.0, 1.0), band_grid.sample_wavenumbers()) == 0)


def test_far_field_ball_closed_form(ball_setup, ball3, band_grid):
    q = g.build_quadrature(ball3, 64, "gauss")
    ks = band_grid.sample_wavenumbers()
    got = forward.far_field(ball_setup, q, (0.6, 0.0, 0.8), ks)
    want = _ball_transform(ks, 0.5) * _f_unit(ks, 0.1)
    assert np.max(np.abs(got - want) / np.abs(want)) <= 1e-6


def test_far_field_refinement_is_order_consistent(ball_setup, ball3, band_grid):
    ks = band_grid.sample_wavenumbers()
    want = _ball_transform(ks, 0.5) * _f_unit(ks, 0.1)
    errs = []
    for n in (4, 8, 16):
        q = g.build_quadrature(ball3, n, "gauss")
        got = forward.far_field(ball_setup, q, (0.0, 0.0, 1.0), ks)
        errs.append(np.max(np.abs(got - want) / np.abs(want)))
    # each doubling at least halves the error
    assert errs[1] <= 0.5 * errs[0] and errs[2] <= 0.5 * errs[1]


def test_far_field_midpoint_refinement(ball_setup, ball3, band_grid):
    ks = band_grid.sample_wavenumbers()
    a = forward.far_field(ball_setup, g.build_quadrature(ball3, 48), (0.0, 0.0, 1.0), ks)
    b = forward.far_field(ball_setup, g.build_quadrature(ball3, 96), (0.0, 0.0, 1.0), ks)
    want = _ball_transform(ks, 0.5) * _f_unit(ks, 0.1)
    assert np.max(np.abs(b - want) / np.abs(want)) < 5e-3
    assert np.max(np.abs(a - b) / np.abs(b)) < 1e-2


def test_far_field_low_frequency_limit(ball_setup, ball3):
    q = g.build_quadrature(ball3, 16, "gauss")
    w0 = forward.far_field(ball_setup, q, (1.0, 0.0, 0.0), 0.0)
    assert w0 == pytest.approx(q.total_weight * 0.1 / SQRT_2PI, rel=1e-14)
    assert w0.imag == 0


def test_near_field_ball_closed_form(ball_setup, ball3):
    q = g.build_quadrature(ball3, 32, "gauss")
    x = np.array([1.5, 0.3, 0.2])
    R = np.linalg.norm(x)
    ks = np.array([-7.0, -1.3, 0.4, 2.0, 8.0])
    got = forward.near_field(ball_setup, q, x, ks)
    want = _f_unit(ks, 0.1) * _ball_transform(ks, 0.5) / (4 * np.pi) * np.exp(1j * ks * R) / R
    np.testing.assert_allclose(got, want, rtol=1e-5)


def test_near_field_rejects_interior(ball_setup, ball3):
    q = g.build_quadrature(ball3, 8, "gauss")
    with pytest.raises(InvalidGeometry):
        forward.near_field(ball_setup, q, (0.1, 0.0, 0.0), 1.0)
    with pytest.raises(InvalidGeometry):
        forward.near_field(ball_setup, q, (0.5, 0.0, 0.0), 1.0)


def test_near_field_conjugate_symmetry(cube):
    src = source.make_source(cube, "radial", 1.0, 1.0, temporal=(1, 1))
    q = g.build_quadrature(cube, 10)
    ks = np.linspace(0.1, 8, 9)
    a = forward.near_field(src, q, (1.5, 0.0, 0.0), ks)
    b = forward.near_field(src, q, (1.5, 0.0, 0.0), -ks)
    np.testing.assert_array_equal(b, np.conj(a))


def test_sample_band_standard_setup(kite_source, kite_quad, band_grid):
    assert band_grid.dk == pytest.approx(np.pi / 6)
    assert band_grid.tau[0] == pytest.approx(np.pi / 12)
    rec = forward.sample_band(kite_source, kite_quad, g.direction_from_angle(0.25), band_grid)
    assert len(rec) == 31
    order = np.argsort(rec.wavenumbers)
    k, v = rec.wavenumbers[order], rec.values[order]
    np.testing.assert_array_equal(k, -k[::-1])
    np.testing.assert_array_equal(v, np.conj(v[::-1]))


def test_shifted_scheme_samples(kite_source, kite_quad):
    grid = FrequencyGrid(0.0, 16 * np.pi / 6, 16, "shifted")
    ks = grid.sample_wavenumbers()
    pos = np.sort(ks[ks > 0])
    np.testing.assert_allclose(pos, (np.arange(1, 17) - 0.5) * np.pi / 6)
    assert len(ks) == 31


def test_time_domain_causality(cube):
    src = source.make_source(cube, "constant", 3.0, temporal=(1, 1))
    q = g.build_quadrature(cube, 12)
    x = np.array([1.5, 0.0, 0.0])
    t_arr, t_ter = forward.signal_window(src, x)
    assert (t_arr, t_ter) == pytest.approx((1.0, 0.1 + np.sqrt(4.5)))
    h = 1.0 / 12 * np.sqrt(3)  # one cell diagonal
    early = np.linspace(0, t_arr - h, 20)
    late = np.linspace(t_ter + h, t_ter + 1, 20)
    assert np.all(forward.time_domain_signal(src, q, x, early) == 0)
    assert np.all(forward.time_domain_signal(src, q, x, late) == 0)
    assert np.any(forward.time_domain_signal(src, q, x, np.linspace(t_arr, t_ter, 50)) > 0)


def test_fourier_bridge(cube):
    src = source.make_source(cube, "constant", 3.0, temporal=(1, 1))
    q = g.build_quadrature(cube, 20)
    x = np.array([1.5, 0.0, 0.0])
    t_arr, t_ter = forward.signal_window(src, x)
    times = np.arange(t_arr - 0.01, t_ter + 0.01, 1e-4)
    sig = forward.time_domain_signal(src, q, x, times)
    ks = np.array([np.pi / 12, np.pi, 2 * np.pi])
    bridge = forward.time_to_frequency(times, sig, ks)
    direct = forward.near_field(src, q, x, ks)
    assert np.max(np.abs(bridge - direct) / np.abs(direct)) <= 1e-3
