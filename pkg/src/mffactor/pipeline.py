"""
Stages behind the command line: simulate, reconstruct, validate, extents.

Each stage takes a :class:`RunConfig`, writes its files into an output
directory and returns what it wrote plus any metrics.  Iteration order is
fixed, so the same config and seed give byte-identical CSVs.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__, forward, geometry, io, metrics
from .errors import InvalidConfig
from .indicator import operator_spectrum, scan_annuli, scan_hull
from .spectral import assemble_far_operator, assemble_near_operator, add_noise
from .validation import CatalogCase, default_catalog, run_catalog


@dataclass
class StageResult:
    files: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    text: str = ""
    report: object = None


def _quadrature(cfg):
    return geometry.build_quadrature(cfg.domain, cfg.resolution, cfg.quadrature)


def simulate(cfg, out_dir) -> StageResult:
    """Write one record CSV per observation."""
    os.makedirs(out_dir, exist_ok=True)
    res = StageResult()
    t0 = time.perf_counter()
    quad = _quadrature(cfg)
    for j, obs in enumerate(cfg.observations):
        rec = forward.sample_band(cfg.source, quad, obs, cfg.grid, cfg.kind)
        path = os.path.join(out_dir, io.record_filename(cfg.tag, cfg.kind, j))
        io.write_record_csv(path, rec)
        res.files.append(path)
    res.timings["simulate"] = time.perf_counter() - t0
    return res


class MissingData(FileNotFoundError):
    pass


def _load(cfg, data_dir):
    recs = []
    for j, obs in enumerate(cfg.observations):
        path = os.path.join(data_dir, io.record_filename(cfg.tag, cfg.kind, j))
        if not os.path.exists(path):
            raise MissingData(f"missing data file {path}")
        recs.append(io.read_record_csv(path, obs, cfg.kind))
    return recs


def ground_truth_metrics(cfg, field_):
    """Contrast of the field against the set the theory predicts."""
    out = {}
    if cfg.kind == "far":
        exts = [geometry.directional_extent(cfg.domain, d) for d in cfg.observations]
        if len(exts) == 1:
            out.update(metrics.strip_contrast(field_, exts[0], cfg.margin).as_dict("strip"))
        else:
            out.update(metrics.hull_contrast(field_, exts, cfg.margin).as_dict("hull"))
    else:
        radii = [geometry.distance_range(cfg.domain, p) for p in cfg.observations]
        pts = field_.lattice.points()
        inside = np.ones(len(pts), dtype=bool)
        outside = np.zeros(len(pts), dtype=bool)
        for p, (lo, hi) in zip(cfg.observations, radii):
            r = np.linalg.norm(pts - np.asarray(p), axis=1)
            inside &= (lo < r) & (r < hi)
            outside |= (r < lo - cfg.margin) | (r > hi + cfg.margin)
        prefix = "annulus" if len(radii) == 1 else "annuli"
        out.update(metrics.contrast(field_.values, inside, outside).as_dict(prefix))
    cen = metrics.peak_centroid(field_, cfg.peak_level)
    truth = geometry.centroid(cfg.domain)
    for i, c in enumerate(cen):
        out[f"peak_centroid_{i + 1}"] = float(c)
    out["peak_centroid_offset"] = float(np.linalg.norm(cen - truth))
    out["modes_used"] = int(sum(field_.meta["modes_used"]))
    return out


def reconstruct(cfg, data_dir, out_dir) -> StageResult:
    os.makedirs(out_dir, exist_ok=True)
    res = StageResult()
    t0 = time.perf_counter()
    recs = _load(cfg, data_dir)
    lattice = cfg.lattice()
    scan = scan_hull if cfg.kind == "far" else scan_annuli
    fld = scan(recs, cfg.grid, lattice, cfg.source.t_min, cfg.source.t_max,
               cfg.truncation, cfg.noise, cfg.seed, cfg.complex_noise)
    res.timings["reconstruct"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    path = os.path.join(out_dir, f"{cfg.tag}_field.csv")
    io.write_field_csv(path, fld)
    res.files.append(path)
    arr, coord, rest = io.field_slice(fld, cfg.slice_axis, cfg.slice_value)
    name = f"{cfg.tag}_field.pgm" if coord is None else f"{cfg.tag}_y{cfg.slice_axis + 1}_slice.pgm"
    path = os.path.join(out_dir, name)
    io.write_pgm(path, arr)
    res.files.append(path)
    if cfg.write_operators:
        assemble = assemble_far_operator if cfg.kind == "far" else assemble_near_operator
        for j, rec in enumerate(recs):
            F = assemble(rec, cfg.grid)
            if cfg.noise > 0:
                F = add_noise(F, cfg.noise, [cfg.seed, j], cfg.complex_noise)
            path = os.path.join(out_dir, f"{cfg.tag}_operator{j}.csv")
            io.write_operator_csv(path, F.entries)
            res.files.append(path)
            spec = operator_spectrum(rec, cfg.grid, cfg.kind, cfg.noise, cfg.seed, j, cfg.complex_noise)
            path = os.path.join(out_dir, f"{cfg.tag}_eigenvalues{j}.csv")
            io._write(path, "lambda\n" + "".join(f"{v!r}\n" for v in spec.eigenvalues.tolist()))
            res.files.append(path)

    res.metrics = ground_truth_metrics(cfg, fld)
    if coord is not None:
        res.metrics["slice_coordinate"] = coord
    path = os.path.join(out_dir, f"{cfg.tag}_metrics.txt")
    io._write(path, format_metrics(res.metrics))
    res.files.append(path)
    res.timings["write"] = time.perf_counter() - t0
    return res


def format_metrics(values: dict) -> str:
    lines = []
    for k, v in values.items():
        lines.append(f"{k}={v!r}" if isinstance(v, float) else f"{k}={v}")
    return "\n".join(lines) + "\n"


def config_cases(cfg):
    """One catalog case per observation of the run config."""
    return [CatalogCase(f"{cfg.tag}_{j}", cfg.source, tuple(obs), cfg.kind, cfg.resolution,
                        cfg.quadrature, cfg.grid.k_min, cfg.grid.k_max, cfg.grid.n, cfg.grid.scheme)
            for j, obs in enumerate(cfg.observations)]


def catalog_for(cfg):
    if cfg is None:
        return default_catalog()
    if cfg.validate_cases is None:
        return config_cases(cfg)
    builtin = {c.name: c for c in default_catalog()}
    cases = []
    for name in cfg.validate_cases:
        if name == "experiment":
            cases += config_cases(cfg)
        elif name in builtin:
            cases.append(builtin[name])
        else:
            raise InvalidConfig(f"[validate] cases: unknown case {name!r}; "
                                f"known: experiment {' '.join(builtin)}")
    if not cases:
        raise InvalidConfig("[validate] cases: catalog is empty")
    return cases


def validate(cfg, out_dir=None, mismatch=False) -> StageResult:
    res = StageResult()
    t0 = time.perf_counter()
    report = run_catalog(catalog_for(cfg), mismatch)
    res.timings["validate"] = time.perf_counter() - t0
    res.text = report.text()
    res.metrics = {"checks": len(report.checks), "failures": len(report.failures()),
                   "passed": int(report.passed)}
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        for name, body in (("validation_report.txt", res.text), ("validation_residuals.csv", report.csv())):
            path = os.path.join(out_dir, name)
            io._write(path, body)
            res.files.append(path)
    res.report = report
    return res


def extents(cfg) -> StageResult:
    """Ground-truth strips, hull area or annulus radii."""
    res = StageResult()
    lines = []
    if cfg.kind == "far":
        exts = []
        for j, d in enumerate(cfg.observations):
            e = geometry.directional_extent(cfg.domain, d)
            exts.append(e)
            lines.append(f"strip_{j}_low={e.low!r}")
            lines.append(f"strip_{j}_high={e.high!r}")
        if cfg.dimension == 2:
            area = geometry.polygon_area(geometry.theta_hull_polygon(exts))
            lines.append(f"hull_area={area!r}")
    else:
        for j, p in enumerate(cfg.observations):
            lo, hi = geometry.distance_range(cfg.domain, p)
            t_arr, t_ter = cfg.source.t_min + lo, cfg.source.t_max + hi
            lines += [f"annulus_{j}_inner={lo!r}", f"annulus_{j}_outer={hi!r}",
                      f"arrival_{j}={t_arr!r}", f"terminal_{j}={t_ter!r}"]
    cen = geometry.centroid(cfg.domain)
    lines += [f"centroid_{i + 1}={float(c)!r}" for i, c in enumerate(cen)]
    lines.append(f"volume={cfg.domain.volume()!r}")
    res.text = "\n".join(lines) + "\n"
    return res


def write_manifest(cfg, out_dir, result: StageResult) -> str:
    return io.write_manifest(out_dir, result.files, cfg.digest() if cfg is not None else "",
                             __version__, result.timings)
