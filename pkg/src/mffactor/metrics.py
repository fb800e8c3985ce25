"""
Contrast metrics that turn indicator fields into pass/fail numbers.

A contrast is the median of W over lattice points inside a ground-truth
set divided by the median over points farther than ``margin`` from it.
Points in the band between the two are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import DegenerateSignal


@dataclass(frozen=True)
class Contrast:
    inside_median: float
    outside_median: float
    inside_count: int
    outside_count: int

    @property
    def ratio(self) -> float:
        if self.outside_median == 0:
            return np.inf
        return self.inside_median / self.outside_median

    def as_dict(self, prefix: str) -> dict:
        return {
            f"{prefix}_inside_median": self.inside_median,
            f"{prefix}_outside_median": self.outside_median,
            f"{prefix}_contrast": self.ratio,
        }


def contrast(values, inside, outside) -> Contrast:
    values = np.asarray(values, dtype=float)
    ok = np.isfinite(values)
    inside = np.asarray(inside) & ok
    outside = np.asarray(outside) & ok
    if not inside.any() or not outside.any():
        raise DegenerateSignal("contrast needs lattice points both inside and outside")
    return Contrast(float(np.median(values[inside])), float(np.median(values[outside])),
                    int(inside.sum()), int(outside.sum()))


def strip_contrast(field, extent, margin: float = 0.25) -> Contrast:
    pts = field.lattice.points()
    inside = geometry.strip_membership(extent, pts)
    p = pts @ extent.direction
    outside = (p < extent.low - margin) | (p > extent.high + margin)
    return contrast(field.values, inside, outside)


def hull_distance(extents, points) -> np.ndarray:
    """Distance to the Theta-hull: exact polygon distance in 2D, strip-wise bound otherwise."""
    pts = np.atleast_2d(points)
    if pts.shape[1] == 2:
        return geometry.distance_to_convex_polygon(geometry.theta_hull_polygon(extents), pts)
    gaps = [np.maximum(0.0, np.maximum(e.low - pts @ e.direction, pts @ e.direction - e.high))
            for e in extents]
    return np.max(gaps, axis=0)


def hull_contrast(field, extents, margin: float = 0.25) -> Contrast:
    pts = field.lattice.points()
    inside = geometry.theta_hull_membership(extents, pts)
    outside = hull_distance(extents, pts) > margin
    return contrast(field.values, inside, outside)


def annulus_contrast(field, sensor, radii, margin: float = 0.25) -> Contrast:
    pts = field.lattice.points()
    r = np.linalg.norm(pts - np.asarray(sensor, dtype=float), axis=1)
    inner, outer = radii
    inside = (inner < r) & (r < outer)
    outside = (r < inner - margin) | (r > outer + margin)
    return contrast(field.values, inside, outside)


def peak_centroid(field, level: float = 0.8) -> np.ndarray:
    """Centroid of lattice points whose W is at least ``level`` times the maximum."""
    vals = field.values
    ok = np.isfinite(vals)
    if not ok.any():
        raise DegenerateSignal("indicator has no finite values")
    top = vals[ok].max()
    if top <= 0:
        raise DegenerateSignal("indicator is identically zero")
    sel = ok & (vals >= level * top)
    return field.lattice.points()[sel].mean(axis=0)
