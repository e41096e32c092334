"""Straight-path impulse integrals, de Broglie phase and the flux-phase closure.

The electron is assumed to move on the unperturbed line z = z0 + v0 t, so
the velocity change is an integral of the longitudinal force over z and
the shift is an integral of the velocity change.  Both are computed by
adaptive quadrature and checked against their closed forms:

    dv_z(z) = shift_sign * kappa * v0 * (1 + (z/y0)^2)^(-3/2)
    dz      = shift_sign * 2 * kappa * y0

Two quadrature modes handle the infinite path:

``"tan"``
    z = y0 tan u maps the whole line onto (-pi/2, pi/2).
``"truncated"``
    integrate over |z| <= z_span * y0 and add the analytic tail beyond it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import CODATA2018, KAPPA_WARN, PerturbativeWarning, Scenario, coupling
from .errors import RegimeError
from .fields import closure_field_magnitude
from .forces import longitudinal_kernel
from .quadrature import integrate

__all__ = [
    "VelocityProfile",
    "PerturbativeResult",
    "delta_v_profile",
    "delta_v_closed",
    "delta_z",
    "delta_z_closed",
    "de_broglie",
    "phase_shift",
    "phase_closed",
    "ab_flux_phase",
    "closure_report",
    "truncation_bound",
    "METHODS",
]

METHODS = ("tan", "truncated")
QUAD_RTOL = 1e-13


def _kappa(s: Scenario) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PerturbativeWarning)
        return coupling(s).kappa


def _check_regime(s: Scenario, allow_nonperturbative: bool) -> float:
    kappa = _kappa(s)
    if kappa > KAPPA_WARN and not allow_nonperturbative:
        raise RegimeError(
            f"kappa = {kappa:.3g} exceeds {KAPPA_WARN:g}; the straight-path "
            "approximation does not hold (pass allow_nonperturbative to override)"
        )
    return kappa


def _log_breakpoints(zmax: float) -> list[float]:
    pts = [0.0]
    p = 1.0
    while p < zmax:
        pts += [p, -p]
        p *= 10.0
    return sorted(pts)


def _dv_tail(zmax: float) -> float:
    # integral of the kernel from -inf to -zmax
    return (1.0 + zmax * zmax) ** -1.5


def truncation_bound(s: Scenario) -> float:
    """Relative error (y0 / Z_max)^2 of truncating the shift integral at +/-Z_max."""
    return 1.0 / s.z_span**2


# --- scaled building blocks (lengths in y0, velocity in kappa * v0) ---------

def _dv_scaled_quad(zeta: float, method: str, zmax: float) -> float:
    """Integral of the longitudinal kernel from -inf to zeta."""
    if method == "tan":
        u = math.atan(zeta)
        f = lambda u: longitudinal_kernel(np.tan(u)) * (1.0 + np.tan(u) ** 2)
        return integrate(f, -math.pi / 2, u, rel_tol=QUAD_RTOL, abs_tol=1e-17).value
    if method == "truncated":
        lo = -zmax
        if zeta <= lo:
            return (1.0 + zeta * zeta) ** -1.5
        bp = [p for p in _log_breakpoints(zmax) if lo < p < zeta]
        body = integrate(longitudinal_kernel, lo, zeta, rel_tol=QUAD_RTOL, abs_tol=1e-17,
                         breakpoints=bp)
        return body.value + _dv_tail(zmax)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def _dv_scaled_closed(zeta):
    return (1.0 + zeta * zeta) ** -1.5


def _dz_scaled(method: str, inner: str, zmax: float, rel_tol: float = QUAD_RTOL):
    """Integral over the whole path of the scaled velocity change."""
    if inner == "closed":
        dv, vectorized = _dv_scaled_closed, True
    elif inner == "quadrature":
        dv, vectorized = (lambda z: _dv_scaled_quad(z, method, zmax)), False
    else:
        raise ValueError("inner must be 'closed' or 'quadrature'")

    if method == "tan":
        f = lambda u: dv(np.tan(u) if vectorized else math.tan(u)) / np.cos(u) ** 2
        return integrate(f, -math.pi / 2, math.pi / 2, rel_tol=rel_tol, vectorized=vectorized)
    if method == "truncated":
        r = integrate(dv, -zmax, zmax, rel_tol=rel_tol, breakpoints=_log_breakpoints(zmax),
                      vectorized=vectorized)
        # tails beyond +/-zmax use the asymptotic closed form
        tail = 1.0 - zmax / math.sqrt(1.0 + zmax * zmax)
        return type(r)(r.value + 2.0 * tail, r.error, r.n_evals, r.n_intervals)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


# --- public operations -------------------------------------------------------

@dataclass(frozen=True)
class VelocityProfile:
    zeta: np.ndarray          # positions in units of y0
    delta_v: np.ndarray       # quadrature, m/s
    closed_form: np.ndarray   # m/s
    max_rel_deviation: float


def delta_v_closed(s: Scenario, z):
    """Closed-form longitudinal velocity change (m/s) at electron position z (m)."""
    return s.shift_sign * _kappa(s) * s.v0 * _dv_scaled_closed(np.asarray(z) / s.y0)


def delta_v_profile(s: Scenario, zeta_grid, method: str = "tan",
                    allow_nonperturbative: bool = False) -> VelocityProfile:
    """Velocity change along the path, (1 / m v0) * integral of F_z dz'.

    ``zeta_grid`` is in units of y0.
    """
    kappa = _check_regime(s, allow_nonperturbative)
    zeta = np.asarray(zeta_grid, dtype=float)
    scale = s.shift_sign * kappa * s.v0
    quad = np.array([_dv_scaled_quad(float(z), method, s.z_span) for z in zeta])
    closed = _dv_scaled_closed(zeta)
    dev = float(np.max(np.abs(quad - closed) / closed)) if zeta.size else 0.0
    return VelocityProfile(zeta, scale * quad, scale * closed, dev)


def delta_z_closed(s: Scenario) -> float:
    return s.shift_sign * 2.0 * _kappa(s) * s.y0


def delta_z(s: Scenario, method: str = "tan", inner: str = "closed",
            allow_nonperturbative: bool = False) -> float:
    """Signed longitudinal shift per pass (m).

    ``inner="closed"`` uses the closed-form antiderivative of the force for
    the velocity change; ``inner="quadrature"`` nests a second adaptive
    quadrature instead.
    """
    kappa = _check_regime(s, allow_nonperturbative)
    return s.shift_sign * kappa * s.y0 * _dz_scaled(method, inner, s.z_span).value


def de_broglie(m: float, v0: float, constants=None) -> float:
    """lambda = h / (m v0)."""
    if v0 <= 0:
        raise ValueError("v0 must be > 0")
    h = (constants or CODATA2018).h
    return h / (m * v0)


def phase_shift(s: Scenario, method: str = "tan", inner: str = "closed",
                allow_nonperturbative: bool = False) -> float:
    """phi = (2 pi / lambda) * 2 dz: lag on one path plus gain on the other."""
    dz = delta_z(s, method, inner, allow_nonperturbative)
    return 2.0 * math.pi / de_broglie(s.mass, s.v0, s.constants) * 2.0 * dz


def phase_closed(s: Scenario) -> float:
    """|q| mu / (hbar pi eps0 c^2 y0), signed like the shift."""
    k = s.constants
    return s.shift_sign * abs(s.charge) * s.mu / (k.hbar * math.pi * k.eps0 * k.c**2 * s.y0)


def ab_flux_phase(B: float, A: float, charge: float | None = None, constants=None) -> float:
    """Flux phase e B A / hbar."""
    k = constants or CODATA2018
    q = k.e if charge is None else abs(charge)
    return q * B * A / k.hbar


@dataclass(frozen=True)
class PerturbativeResult:
    delta_z: float
    phi: float
    phi_AB: float
    lambda_dB: float
    agreement: float
    kappa: float
    delta_z_closed: float
    phi_closed: float
    closure_B: float
    closure_area: float
    truncation_bound: float
    quad_error: float


def closure_report(s: Scenario, method: str = "tan", inner: str = "closed",
                   allow_nonperturbative: bool = False) -> PerturbativeResult:
    """Shift, phase and the flux-phase comparison with area 2 y0^2.

    The field used for the flux phase is ``closure_field_magnitude`` at
    r = y0; the flux phase takes the orientation of the shift so the
    agreement ratio is +1 on either side.
    """
    kappa = _check_regime(s, allow_nonperturbative)
    q = _dz_scaled(method, inner, s.z_span)
    dz = s.shift_sign * kappa * s.y0 * q.value
    lam = de_broglie(s.mass, s.v0, s.constants)
    phi = 2.0 * math.pi / lam * 2.0 * dz
    B = closure_field_magnitude(s.mu, s.y0, s.constants)
    A = 2.0 * s.y0**2
    phi_ab = s.shift_sign * ab_flux_phase(B, A, s.charge, s.constants)
    agreement = phi / phi_ab if phi_ab != 0 else math.nan
    return PerturbativeResult(
        delta_z=dz,
        phi=phi,
        phi_AB=phi_ab,
        lambda_dB=lam,
        agreement=agreement,
        kappa=kappa,
        delta_z_closed=delta_z_closed(s),
        phi_closed=phase_closed(s),
        closure_B=B,
        closure_area=A,
        truncation_bound=truncation_bound(s),
        quad_error=s.shift_sign * kappa * s.y0 * q.error,
    )
