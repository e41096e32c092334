"""Electromagnetic field evaluators.

All fields are the non-radiative "velocity" fields of sources in uniform
motion, evaluated at the source's present position.  For uniform motion
that form is exact, so no retarded-time solve is needed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import CODATA2018, Constants, Scenario
from .errors import SingularPointError

__all__ = [
    "Frame",
    "FieldSample",
    "ChargeKinematics",
    "exact_charge_fields",
    "simplified_charge_B",
    "dipole_B",
    "closure_field_magnitude",
    "motional_electric_dipole",
    "coulomb_E",
]


class Frame(str, enum.Enum):
    SOLENOID_REST = "solenoid_rest"
    ELECTRON_REST = "electron_rest"


@dataclass(frozen=True)
class FieldSample:
    E: np.ndarray
    B: np.ndarray
    frame: Frame = Frame.SOLENOID_REST


def _norm_or_raise(r: np.ndarray) -> float:
    rn = float(np.linalg.norm(r))
    if rn == 0.0:
        raise SingularPointError("field evaluated at the source point (r = 0)")
    return rn


@dataclass(frozen=True)
class ChargeKinematics:
    """Point charge ``q`` moving with velocity ``v``.

    ``r`` runs from the charge's present position to the field point.
    """

    q: float
    v: np.ndarray
    r: np.ndarray
    constants: Constants = CODATA2018

    def __post_init__(self):
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        object.__setattr__(self, "r", np.asarray(self.r, dtype=float))
        _norm_or_raise(self.r)
        if float(np.dot(self.v, self.v)) >= self.constants.c**2:
            raise ValueError("|v| must be below c")

    @property
    def beta2(self) -> float:
        return float(np.dot(self.v, self.v)) / self.constants.c**2

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.beta2)

    @property
    def sin2_theta(self) -> float:
        v2 = float(np.dot(self.v, self.v))
        if v2 == 0.0:
            return 0.0
        vxr = np.cross(self.v, self.r)
        return float(np.dot(vxr, vxr)) / (v2 * float(np.dot(self.r, self.r)))

    @property
    def theta(self) -> float:
        """Angle between v and r, measured from the forward direction."""
        v2 = float(np.dot(self.v, self.v))
        if v2 == 0.0:
            return 0.0
        cross = float(np.linalg.norm(np.cross(self.v, self.r)))
        return math.atan2(cross, float(np.dot(self.v, self.r)))


def exact_charge_fields(k: ChargeKinematics) -> FieldSample:
    """Fields of a uniformly moving point charge at the point ``k.r``.

    E = q / (4 pi eps0 gamma^2) (1 - beta^2 sin^2 theta)^(-3/2) r_hat / r^2,
    B = v x E / c^2.
    """
    c = k.constants
    rn = _norm_or_raise(k.r)
    anisotropy = (1.0 - k.beta2 * k.sin2_theta) ** -1.5
    E = (k.q / (4 * math.pi * c.eps0)) * (1.0 - k.beta2) * anisotropy * k.r / rn**3
    B = np.cross(k.v, E) / c.c**2
    return FieldSample(E=E, B=B, frame=Frame.SOLENOID_REST)


def simplified_charge_B(s: Scenario, z_e: float) -> FieldSample:
    """Slow-electron fields at the dipole location, electron at (0, 0, z_e).

    Uses the Coulomb form with gamma = 1, so B only has an x-component of
    magnitude |q| v0 y0 / (4 pi eps0 c^2 (y0^2 + z_e^2)^(3/2)).  Its sign
    flips with the side and with the sign of the charge.
    """
    c = s.constants
    r = s.solenoid_position - np.array([0.0, 0.0, z_e])
    rn = math.hypot(s.y0, z_e)
    E = s.charge / (4 * math.pi * c.eps0) * r / rn**3
    B_x = -s.charge * s.v0 * s.side.sign * s.y0 / (4 * math.pi * c.eps0 * c.c**2 * rn**3)
    return FieldSample(E=E, B=np.array([B_x, 0.0, 0.0]), frame=Frame.SOLENOID_REST)


def dipole_B(mu_vec, r, constants: Constants = CODATA2018) -> np.ndarray:
    """Static point-dipole field (mu0 / 4 pi r^3) [3 (mu . r_hat) r_hat - mu]."""
    mu_vec = np.asarray(mu_vec, dtype=float)
    r = np.asarray(r, dtype=float)
    rn = _norm_or_raise(r)
    rhat = r / rn
    return constants.mu0 / (4 * math.pi * rn**3) * (3.0 * np.dot(mu_vec, rhat) * rhat - mu_vec)


def closure_field_magnitude(mu: float, r: float, constants: Constants = CODATA2018) -> float:
    """Field magnitude mu mu0 / (2 pi r^3) used by the flux-phase comparison.

    This equals the on-axis dipole magnitude at distance r.  The physical
    field at the equatorial closest-approach point is half of it and points
    against mu; see :func:`dipole_B`.
    """
    if r <= 0:
        raise SingularPointError("closure field needs r > 0")
    return mu * constants.mu0 / (2 * math.pi * r**3)


def motional_electric_dipole(v, mu_vec, constants: Constants = CODATA2018) -> np.ndarray:
    """Electric dipole moment p = (v x mu) / c^2 of a moving magnetic dipole."""
    v = np.asarray(v, dtype=float)
    if float(np.dot(v, v)) >= constants.c**2:
        raise ValueError("|v| must be below c")
    return np.cross(v, np.asarray(mu_vec, dtype=float)) / constants.c**2


def coulomb_E(q: float, r, constants: Constants = CODATA2018) -> np.ndarray:
    """Static field q r / (4 pi eps0 r^3) of a charge, r from charge to field point."""
    r = np.asarray(r, dtype=float)
    rn = _norm_or_raise(r)
    return q / (4 * math.pi * constants.eps0) * r / rn**3
