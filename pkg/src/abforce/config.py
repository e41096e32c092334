"""Scenario-file parsing and validation.

Scenario files are TOML with three flat sections::

    [scenario]
    mu = 1e-14
    y0 = 1e-5
    v0 = 1e7

    [run]
    mode = "sweep"
    sweep.axis = "y0"
    sweep.min = 1e-6
    sweep.max = 1e-3
    sweep.points = 31

    [slits]
    d = 1e-6

Every key is listed in :data:`SCHEMA`; anything else is rejected.
"""

from __future__ import annotations

import math
import re
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .core import CODATA2018, Scenario, Side
from .errors import ConfigError, RegimeError

__all__ = ["MODES", "SCHEMA", "RunConfig", "SweepSpec", "SlitSpec", "parse_config",
           "config_from_dict", "config_to_dict", "keys_help"]

MODES = ("fields", "force-check", "perturbative", "trajectory", "sweep", "fringe")
SWEEP_AXES = ("y0", "mu", "v0", "z")
SCALES = ("log", "linear")
FORMATS = ("csv", "json")
MAX_POINTS = 10**6

_NUM = "number"
_INT = "integer"
_STR = "string"
_BOOL = "boolean"

# (section, key) -> (type, default, description); None default means required
SCHEMA = {
    ("scenario", "mu"): (_NUM, None, "dipole moment along +x, A m^2 (>= 0)"),
    ("scenario", "y0"): (_NUM, None, "impact parameter, m (> 0)"),
    ("scenario", "v0"): (_NUM, None, "electron speed along +z, m/s (beta < 0.1)"),
    ("scenario", "side"): (_STR, "left", "left: dipole at y=+y0; right: y=-y0"),
    ("scenario", "charge"): (_NUM, -CODATA2018.e, "particle charge, C"),
    ("scenario", "mass"): (_NUM, CODATA2018.m_e, "particle mass, kg"),
    ("scenario", "z_span"): (_NUM, 1e4, "path half-length in units of y0 (>= 100)"),
    ("scenario", "allow_relativistic"): (_BOOL, False, "accept beta >= 0.1"),
    ("run", "mode"): (_STR, "perturbative", "one of " + ", ".join(MODES)),
    ("run", "sweep.axis"): (_STR, None, "swept parameter: y0, mu, v0 (sweep) or z (fields, force-check)"),
    ("run", "sweep.min"): (_NUM, None, "sweep lower bound (z in units of y0)"),
    ("run", "sweep.max"): (_NUM, None, "sweep upper bound"),
    ("run", "sweep.points"): (_INT, None, "number of points, 2..1e6 (default 31 for sweep, 101 for z)"),
    ("run", "sweep.scale"): (_STR, None, "log or linear (default log; linear for z)"),
    ("run", "rel_tol"): (_NUM, 1e-10, "trajectory relative tolerance, 1e-13..1e-6"),
    ("run", "abs_tol"): (_NUM, 1e-12, "trajectory absolute tolerance (scaled units), 1e-13..1e-6"),
    ("run", "method"): (_STR, "tan", "shift quadrature: tan or truncated"),
    ("run", "allow_nonperturbative"): (_BOOL, False, "accept kappa > 1e-3"),
    ("slits", "a"): (_NUM, 5e-8, "slit width, m"),
    ("slits", "d"): (_NUM, 1e-6, "slit separation, m"),
    ("slits", "L"): (_NUM, 1.0, "slit-to-screen distance, m (>= 100 d)"),
    ("slits", "n_samples"): (_INT, 4096, "screen samples (>= 512)"),
    ("slits", "half_width"): (_NUM, None, "screen half-width, m (default 10 fringe spacings)"),
}
# keys that are required only in some modes; their None default means "unset"
_OPTIONAL_NONE = {("run", "sweep.axis"), ("run", "sweep.min"), ("run", "sweep.max"),
                  ("run", "sweep.points"), ("run", "sweep.scale"), ("slits", "half_width")}


def keys_help() -> str:
    lines = ["scenario file keys (TOML):"]
    current = None
    for (section, key), (kind, default, desc) in SCHEMA.items():
        if section != current:
            lines.append(f"  [{section}]")
            current = section
        if default is None:
            dflt = "required" if (section, key) not in _OPTIONAL_NONE else "unset"
        else:
            dflt = f"default {default!r}"
        lines.append(f"    {key:<24} {kind:<8} {desc} ({dflt})")
    return "\n".join(lines)


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    min: float
    max: float
    points: int
    scale: str

    def values(self):
        if self.scale == "log":
            return np.logspace(math.log10(self.min), math.log10(self.max), self.points)
        return np.linspace(self.min, self.max, self.points)


@dataclass(frozen=True)
class SlitSpec:
    a: float = 5e-8
    d: float = 1e-6
    L: float = 1.0
    n_samples: int = 4096
    half_width: float | None = None


@dataclass(frozen=True)
class RunConfig:
    mode: str
    scenario: Scenario
    sweep: SweepSpec | None
    slits: SlitSpec
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    method: str = "tan"
    allow_nonperturbative: bool = False
    output_format: str = "csv"
    output_path: str | None = None
    seed: int = 0
    raw: dict = field(default_factory=dict, compare=False, repr=False)


_POS_RE = re.compile(r"line (\d+), column (\d+)")


def _flatten(section: str, table: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in table.items():
        name = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(section, v, name + "."))
        else:
            out[name] = v
    return out


def _check_type(section, key, value, kind):
    where = f"[{section}] {key}"
    if kind == _NUM:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where} must be a number, got {value!r}", key=key)
        if not math.isfinite(value):
            raise ConfigError(f"{where} must be finite", key=key)
        return float(value)
    if kind == _INT:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where} must be an integer, got {value!r}", key=key)
        return value
    if kind == _BOOL:
        if not isinstance(value, bool):
            raise ConfigError(f"{where} must be true or false, got {value!r}", key=key)
        return value
    if not isinstance(value, str):
        raise ConfigError(f"{where} must be a string, got {value!r}", key=key)
    return value


def _normalize(doc: dict) -> dict:
    """Validate keys and types; return {(section, key): value} with defaults applied."""
    values = {}
    for section, table in doc.items():
        if section not in ("scenario", "run", "slits"):
            raise ConfigError(f"unknown section [{section}]", key=section)
        if not isinstance(table, dict):
            raise ConfigError(f"[{section}] must be a table", key=section)
        for key, value in _flatten(section, table).items():
            if (section, key) not in SCHEMA:
                raise ConfigError(f"unknown key {key!r} in [{section}]", key=key)
            values[(section, key)] = _check_type(section, key, value, SCHEMA[(section, key)][0])
    for sk, (_, default, _) in SCHEMA.items():
        if sk not in values:
            if default is None and sk not in _OPTIONAL_NONE:
                raise ConfigError(f"missing required key {sk[1]!r} in [{sk[0]}]", key=sk[1])
            values[sk] = default
    return values


def _choice(values, sk, allowed):
    v = values[sk]
    if v is not None and v not in allowed:
        raise ConfigError(f"[{sk[0]}] {sk[1]} = {v!r}; expected one of {', '.join(allowed)}", key=sk[1])
    return v


def _build_sweep(values, mode):
    axis = _choice(values, ("run", "sweep.axis"), SWEEP_AXES)
    lo, hi = values[("run", "sweep.min")], values[("run", "sweep.max")]
    points = values[("run", "sweep.points")]
    scale = _choice(values, ("run", "sweep.scale"), SCALES)
    if mode in ("fields", "force-check"):
        axis = axis or "z"
        if axis != "z":
            raise ConfigError(f"mode {mode} sweeps z only, got sweep.axis = {axis!r}", key="sweep.axis")
        lo = -5.0 if lo is None else lo
        hi = 5.0 if hi is None else hi
        scale = scale or "linear"
        points = 101 if points is None else points
    elif mode == "sweep":
        if axis is None or lo is None or hi is None:
            raise ConfigError("sweep mode needs sweep.axis, sweep.min and sweep.max", key="sweep.axis")
        if axis == "z":
            raise ConfigError("sweep mode sweeps y0, mu or v0", key="sweep.axis")
        scale = scale or "log"
        points = 31 if points is None else points
    else:
        return None
    if not 2 <= points <= MAX_POINTS:
        raise ConfigError(f"sweep.points = {points} outside [2, {MAX_POINTS}]", key="sweep.points")
    if not lo < hi:
        raise ConfigError(f"sweep.min ({lo:g}) must be below sweep.max ({hi:g})", key="sweep.min")
    if (scale == "log" or axis != "z") and lo <= 0:
        raise ConfigError(f"sweep.min must be positive for axis {axis} / {scale} scale", key="sweep.min")
    return SweepSpec(axis, float(lo), float(hi), int(points), scale)


def config_from_dict(doc: dict, *, mode: str | None = None, output_format: str = "csv",
                     output_path: str | None = None, seed: int = 0,
                     points: int | None = None) -> RunConfig:
    """Validate a parsed scenario document (TOML or the JSON "config" echo)."""
    doc = {k: v for k, v in doc.items()}
    values = _normalize(doc)
    if points is not None:
        values[("run", "sweep.points")] = points
    mode = mode or values[("run", "mode")]
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}", key="mode")
    values[("run", "mode")] = mode
    if output_format not in FORMATS:
        raise ConfigError(f"unknown format {output_format!r}", key="format")
    side = _choice(values, ("scenario", "side"), tuple(s.value for s in Side))
    method = _choice(values, ("run", "method"), ("tan", "truncated"))
    try:
        scenario = Scenario(
            mu=values[("scenario", "mu")],
            y0=values[("scenario", "y0")],
            v0=values[("scenario", "v0")],
            side=Side(side),
            charge=values[("scenario", "charge")],
            mass=values[("scenario", "mass")],
            z_span=values[("scenario", "z_span")],
            allow_relativistic=values[("scenario", "allow_relativistic")],
        )
    except RegimeError:
        raise
    except ValueError as exc:
        raise ConfigError(f"[scenario] {exc}") from exc
    slits = SlitSpec(
        a=values[("slits", "a")],
        d=values[("slits", "d")],
        L=values[("slits", "L")],
        n_samples=values[("slits", "n_samples")],
        half_width=values[("slits", "half_width")],
    )
    for key in ("rel_tol", "abs_tol"):
        tol = values[("run", key)]
        if not 1e-13 <= tol <= 1e-6:
            raise ConfigError(f"[run] {key} = {tol:g} outside [1e-13, 1e-6]", key=key)
    return RunConfig(
        mode=mode,
        scenario=scenario,
        sweep=_build_sweep(values, mode),
        slits=slits,
        rel_tol=values[("run", "rel_tol")],
        abs_tol=values[("run", "abs_tol")],
        method=method,
        allow_nonperturbative=values[("run", "allow_nonperturbative")],
        output_format=output_format,
        output_path=output_path,
        seed=seed,
        raw=values,
    )


def parse_config(text: str, **overrides) -> RunConfig:
    """Parse scenario-file text; see :func:`config_from_dict` for ``overrides``."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = _POS_RE.search(str(exc))
        line, col = (int(m.group(1)), int(m.group(2))) if m else (None, None)
        raise ConfigError(f"parse error: {exc}", line=line, column=col) from exc
    return config_from_dict(doc, **overrides)


def config_to_dict(cfg: RunConfig) -> dict:
    """Echo of the effective configuration, re-parseable by :func:`config_from_dict`."""
    s = cfg.scenario
    run = {
        "mode": cfg.mode,
        "rel_tol": cfg.rel_tol,
        "abs_tol": cfg.abs_tol,
        "method": cfg.method,
        "allow_nonperturbative": cfg.allow_nonperturbative,
    }
    if cfg.sweep is not None:
        run["sweep"] = {k: v for k, v in asdict(cfg.sweep).items()}
    slits = {k: v for k, v in asdict(cfg.slits).items() if v is not None}
    return {
        "scenario": {
            "mu": s.mu,
            "y0": s.y0,
            "v0": s.v0,
            "side": s.side.value,
            "charge": s.charge,
            "mass": s.mass,
            "z_span": s.z_span,
            "allow_relativistic": s.allow_relativistic,
        },
        "run": run,
        "slits": slits,
    }
