"""Run orchestration and CSV / JSON report emission."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .config import RunConfig, config_to_dict
from .core import Scenario
from .errors import ConfigError
from .fields import ChargeKinematics, exact_charge_fields, simplified_charge_B
from .forces import force_electron_frame, force_lab, force_numeric_oracle, lab_energy_surface
from .interference import SlitGeometry, extract_shift, pattern, predicted_shift
from .perturbative import closure_report
from .trajectory import Mode, integrate

__all__ = ["COLUMNS", "run", "build_rows", "to_csv", "to_json", "format_number"]

PERTURBATIVE_COLUMNS = [
    "y0", "mu", "v0", "side", "kappa", "delta_z", "delta_z_closed", "phi", "phi_closed",
    "phi_AB", "agreement", "lambda_dB", "truncation_bound",
]

COLUMNS = {
    "fields": ["zeta", "z", "beta", "Bx_exact", "Bx_simplified", "rel_deviation",
               "Ex", "Ey", "Ez"],
    "force-check": ["zeta", "z", "F_lab_y", "F_lab_z", "F_electron_y", "F_electron_z",
                    "F_oracle_y", "F_oracle_z", "frame_rel_diff", "oracle_rel_diff"],
    "perturbative": PERTURBATIVE_COLUMNS,
    "sweep": PERTURBATIVE_COLUMNS,
    "trajectory": ["mode", "y0", "mu", "v0", "kappa", "delta_z", "delta_z_numeric",
                   "rel_error", "delta_vz_residual", "transverse_deflection",
                   "transverse_velocity", "steps", "rejected", "n_evals"],
    "fringe": ["x", "intensity", "envelope", "phi", "fringe_spacing", "predicted_shift",
               "fringe_shift", "envelope_peak_x"],
}


def format_number(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def _perturbative_row(cfg: RunConfig, s: Scenario) -> dict:
    r = closure_report(s, cfg.method, allow_nonperturbative=cfg.allow_nonperturbative)
    return {
        "y0": s.y0, "mu": s.mu, "v0": s.v0, "side": s.side.value, "kappa": r.kappa,
        "delta_z": r.delta_z, "delta_z_closed": r.delta_z_closed, "phi": r.phi,
        "phi_closed": r.phi_closed, "phi_AB": r.phi_AB, "agreement": r.agreement,
        "lambda_dB": r.lambda_dB, "truncation_bound": r.truncation_bound,
    }


def _sweep_point(args):
    cfg, value = args
    s = cfg.scenario.replace(**{cfg.sweep.axis: float(value)})
    return _perturbative_row(cfg, s)


def _fields_rows(cfg: RunConfig):
    s = cfg.scenario
    rows = []
    for zeta in cfg.sweep.values():
        z = float(zeta) * s.y0
        r = s.solenoid_position - np.array([0.0, 0.0, z])
        exact = exact_charge_fields(ChargeKinematics(s.charge, s.velocity, r, s.constants))
        simple = simplified_charge_B(s, z)
        bx, bs = float(exact.B[0]), float(simple.B[0])
        rows.append({
            "zeta": float(zeta), "z": z, "beta": s.beta, "Bx_exact": bx, "Bx_simplified": bs,
            "rel_deviation": abs(bx - bs) / abs(bx) if bx else 0.0,
            "Ex": float(exact.E[0]), "Ey": float(exact.E[1]), "Ez": float(exact.E[2]),
        })
    return rows


def _force_rows(cfg: RunConfig):
    s = cfg.scenario
    rng = np.random.default_rng(cfg.seed)
    zetas = cfg.sweep.values()
    spacing = (zetas[-1] - zetas[0]) / max(len(zetas) - 1, 1)
    # seeded sub-grid jitter so repeated checks probe fresh points
    zetas = zetas + rng.uniform(-0.25, 0.25, len(zetas)) * spacing
    energy = lab_energy_surface(s)
    rows = []
    for zeta in zetas:
        z = float(zeta) * s.y0
        fl = force_lab(s, z).F
        fe = force_electron_frame(s, z).F
        h = 1e-3 * math.hypot(s.y0, z)
        fo = force_numeric_oracle(energy, (0.0, z), h)
        norm = float(np.linalg.norm(fl))
        rows.append({
            "zeta": float(zeta), "z": z,
            "F_lab_y": float(fl[1]), "F_lab_z": float(fl[2]),
            "F_electron_y": float(fe[1]), "F_electron_z": float(fe[2]),
            "F_oracle_y": float(fo[1]), "F_oracle_z": float(fo[2]),
            "frame_rel_diff": float(np.max(np.abs(fl - fe))) / norm if norm else 0.0,
            "oracle_rel_diff": float(np.linalg.norm(fo - fl)) / norm if norm else 0.0,
        })
    return rows


def _trajectory_rows(cfg: RunConfig):
    s = cfg.scenario
    p = closure_report(s, cfg.method, allow_nonperturbative=cfg.allow_nonperturbative)
    rows = []
    for mode in Mode:
        t = integrate(s, mode, cfg.rel_tol, cfg.abs_tol)
        rows.append({
            "mode": mode.value, "y0": s.y0, "mu": s.mu, "v0": s.v0, "kappa": t.kappa,
            "delta_z": p.delta_z, "delta_z_numeric": t.delta_z_numeric,
            "rel_error": abs(t.delta_z_numeric - p.delta_z) / abs(p.delta_z) if p.delta_z else 0.0,
            "delta_vz_residual": t.delta_vz_residual,
            "transverse_deflection": t.transverse_deflection,
            "transverse_velocity": t.transverse_velocity,
            "steps": t.stats.accepted, "rejected": t.stats.rejected, "n_evals": t.stats.n_evals,
        })
    return rows


def slit_geometry(cfg: RunConfig, wavelength: float) -> SlitGeometry:
    sl = cfg.slits
    return SlitGeometry(sl.a, sl.d, sl.L, wavelength, sl.n_samples, sl.half_width)


def _fringe_rows(cfg: RunConfig):
    s = cfg.scenario
    p = closure_report(s, cfg.method, allow_nonperturbative=cfg.allow_nonperturbative)
    try:
        g = slit_geometry(cfg, p.lambda_dB)
    except ValueError as exc:
        raise ConfigError(f"[slits] {exc}") from exc
    pat = pattern(g, p.phi)
    shift = extract_shift(pat, g)
    common = {
        "phi": p.phi, "fringe_spacing": g.fringe_spacing,
        "predicted_shift": predicted_shift(g, p.phi), "fringe_shift": shift,
        "envelope_peak_x": pat.envelope_peak_x,
    }
    return [
        {"x": float(x), "intensity": float(i), "envelope": float(e), **common}
        for x, i, e in zip(pat.x, pat.intensity, pat.envelope)
    ]


def build_rows(cfg: RunConfig, workers: int = 1) -> list[dict]:
    """Compute the report rows for ``cfg``; row order never depends on ``workers``."""
    if cfg.mode == "perturbative":
        return [_perturbative_row(cfg, cfg.scenario)]
    if cfg.mode == "sweep":
        jobs = [(cfg, v) for v in cfg.sweep.values()]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(_sweep_point, jobs))
        return [_sweep_point(j) for j in jobs]
    if cfg.mode == "fields":
        return _fields_rows(cfg)
    if cfg.mode == "force-check":
        return _force_rows(cfg)
    if cfg.mode == "trajectory":
        return _trajectory_rows(cfg)
    if cfg.mode == "fringe":
        return _fringe_rows(cfg)
    raise ValueError(f"unknown mode {cfg.mode!r}")


def provenance(cfg: RunConfig) -> dict:
    # timestamp only from SOURCE_DATE_EPOCH so identical runs stay byte-identical
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    return {
        "version": __version__,
        "constants": cfg.scenario.constants.as_dict(),
        "timestamp": int(epoch) if epoch and epoch.isdigit() else None,
        "mode": cfg.mode,
        "seed": cfg.seed,
    }


def to_csv(cfg: RunConfig, rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = COLUMNS[cfg.mode]
    w.writerow(cols)
    for row in rows:
        w.writerow([format_number(row[c]) for c in cols])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    return v


def to_json(cfg: RunConfig, rows: list[dict]) -> str:
    cols = COLUMNS[cfg.mode]
    doc = {
        "config": config_to_dict(cfg),
        "rows": [{c: _jsonable(row[c]) for c in cols} for row in rows],
        "provenance": provenance(cfg),
    }
    # repr-based floats round-trip bit-exactly, as %.17g does in CSV
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def run(cfg: RunConfig, workers: int = 1) -> str:
    """Execute ``cfg`` and return the serialized report."""
    rows = build_rows(cfg, workers)
    text = to_json(cfg, rows) if cfg.output_format == "json" else to_csv(cfg, rows)
    if cfg.output_path:
        with open(cfg.output_path, "w", newline="\n") as fh:
            fh.write(text)
    return text
