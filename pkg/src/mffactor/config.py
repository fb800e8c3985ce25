"""
Run configuration: a flat ``key = value`` text format with ``[section]``
headers.

Values are numbers, bare strings, or bracketed lists of numbers.  A number
may be written as a decimal, a fraction ``a/b``, and may carry a ``pi``
suffix, so ``16/6 pi``, ``0.25pi`` and ``pi`` are all numbers.  ``#``
starts a comment.  Union supports use one ``[domain.<name>]`` section per
component next to ``[domain] shape = union``.

Angles are in units of pi, so ``angles = [0.25]`` is the direction at 45
degrees.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field

from . import geometry
from .errors import InvalidConfig
from .source import SPATIAL_KINDS, SpaceTimeSource, make_source
from .spectral import SCHEMES, FrequencyGrid

_NUMBER = re.compile(
    r"^\s*(?P<num>[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?)?"
    r"(\s*/\s*(?P<den>\d+(\.\d*)?([eE][-+]?\d+)?))?"
    r"\s*(?P<pi>pi)?\s*$")
_SECTION = re.compile(r"^\[\s*([A-Za-z_][\w.]*)\s*\]$")
_KEY = re.compile(r"^[A-Za-z_]\w*$")


def parse_number(text: str):
    """int, float or None; ``pi`` alone is a number."""
    m = _NUMBER.match(text)
    if not m or (m.group("num") is None and m.group("pi") is None):
        return None
    if m.group("num") is None and m.group("den") is not None:
        return None
    num = m.group("num")
    val = 1 if num is None else (int(num) if re.fullmatch(r"[-+]?\d+", num) else float(num))
    if m.group("den") is not None:
        den = float(m.group("den"))
        if den == 0:
            return None
        val = val / den
    if m.group("pi"):
        val = val * math.pi
    return val


def parse_value(text: str):
    text = text.strip()
    if text.startswith("["):
        if not text.endswith("]"):
            raise ValueError("unterminated list")
        body = text[1:-1].strip()
        if not body:
            return []
        out = []
        for item in body.split(","):
            v = parse_number(item)
            if v is None:
                raise ValueError(f"list item {item.strip()!r} is not a number")
            out.append(float(v))
        return out
    v = parse_number(text)
    return text if v is None else v


def parse_text(text: str) -> dict:
    """Sections -> {key: (value, line)}; raises InvalidConfig naming the line."""
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            current = m.group(1)
            if current in sections:
                raise InvalidConfig(f"line {lineno}: duplicate section [{current}]")
            sections[current] = {}
            continue
        if "=" not in line:
            raise InvalidConfig(f"line {lineno}: expected 'key = value', got {line!r}")
        if current is None:
            raise InvalidConfig(f"line {lineno}: key outside any [section]")
        key, val = (s.strip() for s in line.split("=", 1))
        if not _KEY.match(key):
            raise InvalidConfig(f"line {lineno}: invalid key {key!r}")
        if key in sections[current]:
            raise InvalidConfig(f"line {lineno}: duplicate key '{key}' in [{current}]")
        try:
            sections[current][key] = (parse_value(val), lineno)
        except ValueError as exc:
            raise InvalidConfig(f"line {lineno}: key '{key}': {exc}") from None
    return sections


def _format(value) -> str:
    if isinstance(value, list):
        return "[" + ", ".join(repr(float(v)) for v in value) + "]"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize(sections: dict) -> str:
    """Canonical text; parse(serialize(x)) reproduces the parsed values."""
    lines = []
    for name, entries in sections.items():
        if lines:
            lines.append("")
        lines.append(f"[{name}]")
        for key, item in entries.items():
            value = item[0] if isinstance(item, tuple) else item
            lines.append(f"{key} = {_format(value)}")
    return "\n".join(lines) + "\n"


def plain(sections: dict) -> dict:
    """Drop line numbers."""
    return {s: {k: v[0] for k, v in e.items()} for s, e in sections.items()}


# --------------------------------------------------------------------------
# typed run configuration
# --------------------------------------------------------------------------

class _Section:
    def __init__(self, name, entries):
        self.name = name
        self.entries = entries or {}
        self.used = set()

    def _where(self, key):
        line = self.entries[key][1] if key in self.entries else None
        where = f"line {line}: " if line else ""
        return f"{where}[{self.name}] {key}"

    def get(self, key, default=None, kind=None, required=False):
        if key not in self.entries:
            if required:
                raise InvalidConfig(f"[{self.name}] missing required key '{key}'")
            return default
        self.used.add(key)
        value = self.entries[key][0]
        if kind == "number" and not isinstance(value, (int, float)):
            raise InvalidConfig(f"{self._where(key)} must be a number")
        if kind == "int" and not (isinstance(value, int) or (isinstance(value, float) and value.is_integer())):
            raise InvalidConfig(f"{self._where(key)} must be an integer")
        if kind == "list" and not isinstance(value, list):
            raise InvalidConfig(f"{self._where(key)} must be a [list] of numbers")
        if kind == "str" and not isinstance(value, str):
            raise InvalidConfig(f"{self._where(key)} must be a name")
        return int(value) if kind == "int" else value

    def fail(self, key, msg):
        raise InvalidConfig(f"{self._where(key)}: {msg}")

    def check_unused(self):
        extra = sorted(set(self.entries) - self.used)
        if extra:
            raise InvalidConfig(f"{self._where(extra[0])}: unknown key")


def _groups(values, dim, sec, key):
    if len(values) % dim:
        sec.fail(key, f"length {len(values)} is not a multiple of the dimension {dim}")
    return [tuple(values[i:i + dim]) for i in range(0, len(values), dim)]


def _build_shape(sec: _Section, sections: dict, prefix: str):
    shape = sec.get("shape", kind="str", required=True)
    try:
        if shape == "union":
            parts = []
            for name in sections:
                if name.startswith(prefix + "."):
                    sub = _Section(name, sections[name])
                    parts.append(_build_shape(sub, {}, name))
                    sub.check_unused()
            if not parts:
                sec.fail("shape", "union needs [domain.<name>] sections")
            dom = geometry.Union(tuple(parts))
            if dom.overlap_fraction() > 0:
                sec.fail("shape", "union components overlap")
            return dom
        if shape == "ball":
            return geometry.Ball(tuple(sec.get("center", kind="list", required=True)),
                                 float(sec.get("radius", kind="number", required=True)))
        if shape == "cube":
            return geometry.Cube(tuple(sec.get("center", kind="list", required=True)),
                                 tuple(sec.get("half_widths", kind="list", required=True)))
        if shape == "ellipse":
            return geometry.Ellipse(tuple(sec.get("center", kind="list", required=True)),
                                    tuple(sec.get("semi_axes", kind="list", required=True)))
        if shape == "kite":
            return geometry.Kite(tuple(sec.get("center", [0.0, 0.0], kind="list")),
                                 float(sec.get("scale", 1.0, kind="number")))
    except InvalidConfig:
        raise
    except ValueError as exc:
        sec.fail("shape", str(exc))
    sec.fail("shape", f"unknown shape {shape!r}")


@dataclass
class RunConfig:
    name: str
    kind: str
    domain: object
    source: SpaceTimeSource
    grid: FrequencyGrid
    observations: list
    lattice_lower: tuple
    lattice_upper: tuple
    lattice_shape: tuple
    truncation: int | None = None
    noise: float = 0.0
    seed: int = 0
    complex_noise: bool = False
    quadrature: str = "gauss"
    resolution: int = 48
    slice_axis: int = 1
    slice_value: float = 0.0
    margin: float = 0.25
    peak_level: float = 0.8
    write_operators: bool = False
    validate_cases: list | None = None
    text: str = ""
    sections: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return self.domain.dimension

    @property
    def tag(self) -> str:
        return self.name

    def lattice(self):
        from .indicator import Lattice
        return Lattice(self.lattice_lower, self.lattice_upper, self.lattice_shape)

    def digest(self) -> str:
        return hashlib.sha256(serialize(self.sections).encode()).hexdigest()


def build_config(sections: dict, text: str = "") -> RunConfig:
    known = {"experiment", "domain", "source", "band", "observations", "lattice",
             "reconstruct", "quadrature", "output", "validate"}
    for name in sections:
        if name.split(".")[0] not in known or ("." in name and not name.startswith("domain.")):
            raise InvalidConfig(f"unknown section [{name}]")
    for required in ("domain", "source", "band", "observations", "lattice"):
        if required not in sections:
            raise InvalidConfig(f"missing section [{required}]")
    S = {n: _Section(n, sections.get(n)) for n in known}

    name = S["experiment"].get("name", "run", kind="str")
    if not re.fullmatch(r"[\w.-]+", name):
        S["experiment"].fail("name", "must be a plain file-name stem")
    kind = S["experiment"].get("kind", "far", kind="str")
    if kind not in ("far", "near"):
        S["experiment"].fail("kind", "must be far or near")

    domain = _build_shape(S["domain"], sections, "domain")
    dim = domain.dimension

    src_sec = S["source"]
    spatial = src_sec.get("spatial", "constant", kind="str")
    if spatial not in SPATIAL_KINDS:
        src_sec.fail("spatial", f"unknown spatial factor; expected one of {SPATIAL_KINDS}")
    gradient = src_sec.get("gradient", [], kind="list")
    if spatial == "affine" and len(gradient) != dim:
        src_sec.fail("gradient", f"needs {dim} components")
    t_min = float(src_sec.get("t_min", 0.0, kind="number"))
    t_max = float(src_sec.get("t_max", 0.1, kind="number"))
    if t_min < 0:
        src_sec.fail("t_min", "must be nonnegative")
    if not t_max > t_min:
        src_sec.fail("t_max", "must exceed t_min")
    temporal = src_sec.get("temporal", [1.0], kind="list")
    if not temporal:
        src_sec.fail("temporal", "needs at least one coefficient")
    strict = src_sec.get("strict", 0, kind="int")
    source = make_source(domain, spatial, float(src_sec.get("amplitude", 1.0, kind="number")),
                         float(src_sec.get("offset", 0.0, kind="number")), gradient, temporal,
                         t_min, t_max, bool(strict))

    band = S["band"]
    k_min = float(band.get("k_min", 0.0, kind="number"))
    k_max = float(band.get("k_max", 16 * math.pi / 6, kind="number"))
    n = band.get("n", 16, kind="int")
    scheme = band.get("scheme", "nystrom", kind="str")
    if scheme not in SCHEMES:
        band.fail("scheme", f"expected one of {SCHEMES}")
    if k_min < 0 or not k_max > k_min:
        band.fail("k_max", "band needs 0 <= k_min < k_max")
    if n < 1:
        band.fail("n", "must be positive")
    grid = FrequencyGrid(k_min, k_max, n, scheme)

    obs = S["observations"]
    observations = []
    if kind == "far":
        if "angles" in obs.entries:
            if dim != 2:
                obs.fail("angles", "angles describe 2D directions; use directions in 3D")
            observations += [tuple(geometry.direction_from_angle(a)) for a in obs.get("angles", kind="list")]
        if "count" in obs.entries:
            m = obs.get("count", kind="int")
            if dim != 2 or m < 1:
                obs.fail("count", "equi-angular directions need a positive count in 2D")
            observations += [tuple(geometry.direction_from_angle(j / m)) for j in range(m)]
        if "directions" in obs.entries:
            for d in _groups(obs.get("directions", kind="list"), dim, obs, "directions"):
                nrm = math.sqrt(sum(v * v for v in d))
                if nrm == 0:
                    obs.fail("directions", "zero direction")
                observations.append(tuple(v / nrm for v in d))
    else:
        if dim != 3:
            S["experiment"].fail("kind", "near-field runs are 3D only")
        for p in _groups(obs.get("points", [], kind="list"), 3, obs, "points"):
            inner, _ = geometry.distance_range(domain, p, 20_000)
            if inner <= 1e-9:
                obs.fail("points", f"sensor {p} lies inside or on the support")
            observations.append(tuple(p))
    if not observations:
        raise InvalidConfig("[observations] lists no direction or point")

    lat = S["lattice"]
    lower = tuple(lat.get("lower", kind="list", required=True))
    upper = tuple(lat.get("upper", kind="list", required=True))
    shape = lat.get("shape", kind="list", required=True)
    if len(lower) != dim or len(upper) != dim:
        lat.fail("lower", f"bounds need {dim} components")
    if any(not h > l for l, h in zip(lower, upper)):
        lat.fail("upper", "lattice has zero measure (upper must exceed lower on every axis)")
    if len(shape) == 1:
        shape = shape * dim
    if len(shape) != dim or any(s < 2 or not float(s).is_integer() for s in shape):
        lat.fail("shape", f"needs {dim} integer counts >= 2")
    shape = tuple(int(s) for s in shape)

    rec = S["reconstruct"]
    trunc = rec.get("truncation", "auto")
    if trunc == "auto":
        truncation = None
    elif isinstance(trunc, (int, float)) and float(trunc).is_integer() and 1 <= trunc <= n:
        truncation = int(trunc)
    else:
        rec.fail("truncation", f"must be auto or an integer in [1, {n}]")
    noise = float(rec.get("noise", 0.0, kind="number"))
    if noise < 0:
        rec.fail("noise", "must be nonnegative")
    seed = rec.get("seed", 0, kind="int")
    noise_kind = rec.get("noise_kind", "real", kind="str")
    if noise_kind not in ("real", "complex"):
        rec.fail("noise_kind", "must be real or complex")
    margin = float(rec.get("margin", 0.25, kind="number"))
    peak = float(rec.get("peak_level", 0.8, kind="number"))
    if not 0 < peak <= 1:
        rec.fail("peak_level", "must lie in (0, 1]")

    q = S["quadrature"]
    method = q.get("method", "gauss", kind="str")
    if method not in ("gauss", "midpoint"):
        q.fail("method", "must be gauss or midpoint")
    resolution = q.get("resolution", 48 if dim == 2 else 24, kind="int")
    if resolution < 2:
        q.fail("resolution", "must be at least 2")

    out = S["output"]
    axis = out.get("slice_axis", 1, kind="int")
    if dim == 3 and not 0 <= axis < 3:
        out.fail("slice_axis", "must be 0, 1 or 2")
    slice_value = float(out.get("slice_value", 0.0, kind="number"))
    write_ops = bool(out.get("operators", 0, kind="int"))

    val = S["validate"]
    cases = val.get("cases", None)
    if cases is not None:
        if isinstance(cases, (int, float)) or isinstance(cases, list):
            val.fail("cases", "must be a space-separated list of case names")
        cases = cases.split() if cases.strip() not in ("none", "") else []

    for s in S.values():
        s.check_unused()

    return RunConfig(name, kind, domain, source, grid, observations, lower, upper, shape,
                     truncation, noise, seed, noise_kind == "complex", method, resolution,
                     axis, slice_value, margin, peak, write_ops, cases, text, sections)


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidConfig(f"cannot read config {path}: {exc.strerror}") from None
    return build_config(parse_text(text), text)
