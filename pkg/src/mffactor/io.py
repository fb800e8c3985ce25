"""
File formats: record and field CSVs, 16-bit PGM slices, operator dumps
and the run manifest.

Floats are written with ``repr``, the shortest text that reads back to the
same double, and lines end in LF, so identical runs give identical bytes.
"""

from __future__ import annotations

import hashlib
import json
import os

import numpy as np

from .errors import InvalidArgument
from .forward import FarFieldRecord, NearFieldRecord

RECORD_HEADER = "k,re,im"


def record_filename(tag: str, kind: str, j: int) -> str:
    return f"{tag}_{'dir' if kind == 'far' else 'pt'}{j}.csv"


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_record_csv(path, record) -> None:
    rows = [RECORD_HEADER]
    for k, v in zip(record.wavenumbers, record.values):
        rows.append(f"{float(k)!r},{float(v.real)!r},{float(v.imag)!r}")
    _write(path, "\n".join(rows) + "\n")


def read_record_csv(path, observation, kind="far"):
    """Read a ``k,re,im`` file; errors name the file and line."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != RECORD_HEADER:
        raise InvalidArgument(f"{path}: expected header '{RECORD_HEADER}'")
    ks, vals = [], []
    for n, line in enumerate(lines[1:], 2):
        parts = line.split(",")
        if len(parts) != 3:
            raise InvalidArgument(f"{path}:{n}: expected 3 fields")
        try:
            k, re_, im = (float(p) for p in parts)
        except ValueError:
            raise InvalidArgument(f"{path}:{n}: not a number") from None
        ks.append(k)
        vals.append(complex(re_, im))
    cls = FarFieldRecord if kind == "far" else NearFieldRecord
    return cls(np.asarray(observation, dtype=float), np.array(ks), np.array(vals))


def write_field_csv(path, field) -> None:
    pts = field.lattice.points()
    dim = pts.shape[1]
    rows = [",".join(f"y{i + 1}" for i in range(dim)) + ",W"]
    for p, w in zip(pts, field.values):
        rows.append(",".join(repr(float(c)) for c in p) + f",{float(w)!r}")
    _write(path, "\n".join(rows) + "\n")


def field_slice(field, axis: int = 1, value: float = 0.0):
    """2D array of a 3D field at the lattice plane nearest ``value`` on ``axis``.

    Returns (array, actual coordinate, remaining axes).
    """
    grid = field.grid()
    if grid.ndim == 2:
        return grid, None, (0, 1)
    ax = field.lattice.axes()[axis]
    i = int(np.argmin(np.abs(ax - value)))
    rest = tuple(a for a in range(3) if a != axis)
    return np.take(grid, i, axis=axis), float(ax[i]), rest


def pgm_bytes(array) -> bytes:
    """P5 16-bit big-endian image of a 2D array indexed [i, j] on axes (u, v).

    Image columns follow u and rows follow v from top (largest) to bottom;
    values are round(65535 * W / max W), NaN maps to 0.
    """
    a = np.asarray(array, dtype=float)
    if a.ndim != 2:
        raise InvalidArgument("PGM needs a 2D array")
    a = np.where(np.isfinite(a), a, 0.0)
    top = a.max()
    scaled = np.zeros(a.shape) if top <= 0 else a / top
    img = np.rint(65535 * np.clip(scaled, 0.0, 1.0)).astype(">u2").T[::-1]
    h, w = img.shape
    return f"P5\n{w} {h}\n65535\n".encode("ascii") + img.tobytes()


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise InvalidArgument(f"{path}: not a binary PGM")
    w, h = (int(v) for v in parts[1].split())
    return np.frombuffer(parts[3], dtype=">u2").reshape(h, w)


def write_pgm(path, array) -> None:
    with open(path, "wb") as fh:
        fh.write(pgm_bytes(array))


def write_operator_csv(path, matrix) -> None:
    """Row-major ``re,im`` pairs, one matrix row per line."""
    rows = []
    for row in np.asarray(matrix):
        rows.append(",".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row))
    _write(path, "\n".join(rows) + "\n")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, files, config_digest, version, timings) -> str:
    """JSON manifest listing every output with its checksum."""
    entries = [{"path": os.path.relpath(f, out_dir), "sha256": sha256_file(f)} for f in sorted(files)]
    doc = {
        "config_sha256": config_digest,
        "version": version,
        "stage_seconds": {k: round(v, 6) for k, v in timings.items()},
        "files": entries,
    }
    path = os.path.join(out_dir, "manifest.json")
    _write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path
