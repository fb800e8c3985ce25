import numpy as np
import pytest

from mffactor import forward
from mffactor import geometry as g
from mffactor import indicator as ind
from mffactor import validation as v
from mffactor.errors import DegenerateSignal, InvalidArgument, InvalidConfig
from mffactor.spectral import FrequencyGrid, sharp_operator

from conftest import quiet_source


@pytest.fixture(scope="module")
def catalog():
    return {c.name: c for c in v.default_catalog()}


@pytest.mark.parametrize("name", ["kite_constant", "kite_affine", "kite_radial", "cube_far",
                                  "cube_near", "ball_constant", "kite_offset_band"])
def test_factorization_residual(catalog, name):
    check = v.factorization_check(catalog[name])
    assert check.passed and check.value <= 1e-12


def test_mismatch_is_detected(catalog):
    check = v.factorization_check(catalog["kite_constant"], mismatch=True)
    assert not check.passed and check.value > 1e-6


def test_sharp_identity_for_positive_sources(catalog):
    for name in ("kite_constant", "cube_near", "ball_constant"):
        assert v.sharp_identity_check(catalog[name]).value <= 1e-10


def test_sharp_identity_fails_off_zero_centre(catalog):
    """Off k_c = 0 the middle factor is complex and the identity does not hold."""
    assert v.sharp_identity_check(catalog["kite_offset_band"]).value > 1e-3


def test_sharp_psd(catalog):
    for name in ("kite_constant", "kite_radial", "cube_far"):
        assert v.psd_check(catalog[name]).passed


def test_time_nodes_rule(band_grid, kite_source):
    assert v.default_time_nodes(kite_source, band_grid) == 17
    long = quiet_source(g.Kite(), "constant", 1.0, t_min=0.0, t_max=20.0)
    R = v.default_time_nodes(long, band_grid)
    assert R == int(np.ceil(np.max(np.abs(band_grid.sample_wavenumbers())) * 10) + 16)


def test_factorization_rejects_bad_inputs(kite_source, band_grid, ball3):
    q3 = g.build_quadrature(ball3, 4)
    with pytest.raises(InvalidConfig):
        v.build_discrete_factorization(kite_source, q3, (1.0, 0.0), band_grid)
    q = g.build_quadrature(kite_source.support, 8)
    with pytest.raises(InvalidConfig):
        v.build_discrete_factorization(kite_source, q, (1.0, 0.0), band_grid, time_nodes=1)
    with pytest.raises(InvalidArgument):
        v.build_discrete_factorization(kite_source, q, (1.0, 0.0), band_grid, kind="mid")


def test_range_residual_inside_vs_outside(kite_source, kite_quad, band_grid):
    d = g.direction_from_angle(0.25)
    fac = v.build_discrete_factorization(kite_source, kite_quad, d, band_grid)
    ext = g.directional_extent(kite_source.support, d)
    y_in = 0.5 * (ext.low + ext.high) * ext.direction
    y_out = (ext.high + 1.2) * ext.direction
    r_in = v.range_membership_residual(fac.L, ind.far_test_vector(y_in, d, band_grid, 0.0, 0.1))
    r_out = v.range_membership_residual(fac.L, ind.far_test_vector(y_out, d, band_grid, 0.0, 0.1))
    assert r_in < 1e-4
    assert r_out > 10 * r_in
    with pytest.raises(DegenerateSignal):
        v.range_membership_residual(fac.L, np.zeros(16))


def test_support_interval_ball():
    checks = v.support_check()
    assert all(c.passed for c in checks), [c.note for c in checks]


def test_support_interval_refines_with_threshold(ball3):
    src = quiet_source(ball3, "constant", 1.0)
    quad = g.build_quadrature(ball3, 24, "gauss")
    grid = FrequencyGrid(0.0, 16 * np.pi / 6, 16)
    rec = forward.sample_wavenumbers(src, quad, (0.0, 0.0, 1.0), grid.wide_band())
    lo, hi = v.predicted_interval(ball3, (0.0, 0.0, 1.0), 0.0, 0.1)
    assert (lo, hi) == pytest.approx((-0.6, 0.5), abs=1e-9)
    errs = []
    for thr in (0.05, 0.02, 0.01):
        est = v.support_interval_estimate(rec, threshold=thr)
        errs.append(max(abs(est.interval[0] - lo), abs(est.interval[1] - hi)))
    assert errs[0] >= errs[1] >= errs[2]


def test_support_two_balls_give_two_clusters():
    two = g.Union((g.Ball((0.0, 0.0, -1.5), 0.4), g.Ball((0.0, 0.0, 1.5), 0.4)))
    src = quiet_source(two, "constant", 1.0)
    quad = g.build_quadrature(two, 16, "gauss")
    grid = FrequencyGrid(0.0, 16 * np.pi / 6, 16)
    rec = forward.sample_wavenumbers(src, quad, (0.0, 0.0, 1.0), grid.wide_band())
    est = v.support_interval_estimate(rec, threshold=0.1)
    assert len(est.clusters) == 2


def test_inverse_transform_requires_uniform_band():
    with pytest.raises(InvalidArgument):
        v.inverse_transform([-1.0, 0.0, 2.0], [1, 1, 1], [0.0])
    with pytest.raises(InvalidArgument):
        v.inverse_transform([0.0, 1.0, 2.0], [1, 1, 1], [0.0])


def test_taper_shape():
    w = v.raised_cosine_taper(np.array([0.0, 0.9, 0.95, 1.0]), 1.0, 0.1)
    np.testing.assert_allclose(w, [1.0, 1.0, 0.5, 0.0], atol=1e-15)


def test_run_catalog_all_pass():
    rep = v.run_catalog()
    assert rep.passed, rep.text()
    assert len(rep.checks) == 17
    assert rep.csv().startswith("check,value,bound,passed\n")
    with pytest.raises(InvalidConfig):
        v.run_catalog([])


def test_shifted_scheme_factorization(kite_source, kite_quad):
    grid = FrequencyGrid(0.0, 16 * np.pi / 6, 16, "shifted")
    case = v.CatalogCase("shifted", kite_source, tuple(g.direction_from_angle(0.25)), scheme="shifted")
    assert v.factorization_check(case).value <= 1e-12
    fac = v.build_discrete_factorization(kite_source, kite_quad, g.direction_from_angle(0.25), grid)
    assert not np.allclose(fac.F_rebuilt, fac.F_rebuilt.conj().T)
    assert np.all(np.isfinite(sharp_operator(fac.F_rebuilt)))
