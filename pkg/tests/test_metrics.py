import numpy as np
import pytest

from mffactor import geometry as g
from mffactor import metrics
from mffactor.errors import DegenerateSignal
from mffactor.indicator import IndicatorField, Lattice


def test_contrast_medians():
    vals = np.array([10.0, 12.0, 8.0, 1.0, 2.0, np.nan])
    inside = np.array([1, 1, 1, 0, 0, 1], bool)
    outside = ~inside
    c = metrics.contrast(vals, inside, outside)
    assert (c.inside_median, c.outside_median) == (10.0, 1.5)
    assert c.ratio == pytest.approx(10 / 1.5)
    assert c.inside_count == 3
    d = c.as_dict("strip")
    assert set(d) == {"strip_inside_median", "strip_outside_median", "strip_contrast"}


def test_contrast_degenerate():
    with pytest.raises(DegenerateSignal):
        metrics.contrast([1.0, 2.0], [False, False], [True, True])
    c = metrics.contrast([1.0, 0.0], [True, False], [False, True])
    assert c.ratio == np.inf


def test_strip_contrast_ignores_margin_band():
    lat = Lattice((-2, -2), (2, 2), 41)
    pts = lat.points()
    ext = g.DirectionalExtent(-0.5, 0.5, np.array([1.0, 0.0]))
    # 1 inside the strip, 100 in the margin band, 0.01 beyond
    vals = np.where(np.abs(pts[:, 0]) < 0.5, 1.0, np.where(np.abs(pts[:, 0]) <= 0.75, 100.0, 0.01))
    c = metrics.strip_contrast(IndicatorField(lat, vals), ext, margin=0.25)
    assert c.ratio == pytest.approx(100.0)


def test_hull_distance_square():
    exts = [g.DirectionalExtent(-1.0, 1.0, np.array([1.0, 0.0])),
            g.DirectionalExtent(-1.0, 1.0, np.array([0.0, 1.0]))]
    d = metrics.hull_distance(exts, np.array([[0.0, 0.0], [2.0, 0.0], [2.0, 2.0]]))
    np.testing.assert_allclose(d, [0.0, 1.0, np.sqrt(2)], atol=1e-9)


def test_peak_centroid_single_peak():
    lat = Lattice((-1, -1), (1, 1), 21)
    pts = lat.points()
    vals = np.exp(-20 * np.sum((pts - [0.4, -0.2]) ** 2, axis=1))
    np.testing.assert_allclose(metrics.peak_centroid(IndicatorField(lat, vals)), [0.4, -0.2], atol=1e-12)
    with pytest.raises(DegenerateSignal):
        metrics.peak_centroid(IndicatorField(lat, np.zeros(len(pts))))


def test_annulus_contrast():
    lat = Lattice((-3, -3, -3), (3, 3, 3), 13)
    pts = lat.points()
    r = np.linalg.norm(pts - [1.5, 0, 0], axis=1)
    vals = np.where((r > 1) & (r < 2), 5.0, 0.5)
    c = metrics.annulus_contrast(IndicatorField(lat, vals), (1.5, 0, 0), (1.0, 2.0))
    assert c.ratio == pytest.approx(10.0)
