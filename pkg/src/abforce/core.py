"""Physical constants, scenario record, 3-vectors and dimensionless scaling.

Internally every module works in units where lengths are measured in the
impact parameter ``y0`` and times in the transit time ``y0 / v0``.  The SI
prefactors only appear at the boundary, through :func:`coupling`.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import RegimeError, ScaleRangeError

__all__ = [
    "Constants",
    "CODATA2018",
    "make_constants",
    "Side",
    "Scenario",
    "DimensionlessCoupling",
    "PerturbativeWarning",
    "coupling",
    "vec3",
    "I_HAT",
    "J_HAT",
    "K_HAT",
    "scale_length",
    "unscale_length",
    "scale_time",
    "unscale_time",
    "BETA_LIMIT",
    "KAPPA_WARN",
]

BETA_LIMIT = 0.1
KAPPA_WARN = 1e-3
MIN_Z_SPAN = 1e2


@dataclass(frozen=True)
class Constants:
    """SI constants. ``reduced_planck`` is derived so that h = 2*pi*hbar."""

    name: str
    elementary_charge: float
    electron_mass: float
    vacuum_permittivity: float
    vacuum_permeability: float
    light_speed: float
    planck: float

    @property
    def reduced_planck(self) -> float:
        return self.planck / (2.0 * math.pi)

    # short aliases used throughout the formulas
    @property
    def e(self) -> float:
        return self.elementary_charge

    @property
    def m_e(self) -> float:
        return self.electron_mass

    @property
    def eps0(self) -> float:
        return self.vacuum_permittivity

    @property
    def mu0(self) -> float:
        return self.vacuum_permeability

    @property
    def c(self) -> float:
        return self.light_speed

    @property
    def h(self) -> float:
        return self.planck

    @property
    def hbar(self) -> float:
        return self.reduced_planck

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "elementary_charge": self.elementary_charge,
            "electron_mass": self.electron_mass,
            "vacuum_permittivity": self.vacuum_permittivity,
            "vacuum_permeability": self.vacuum_permeability,
            "light_speed": self.light_speed,
            "planck": self.planck,
        }


CODATA2018 = Constants(
    name="CODATA-2018",
    elementary_charge=1.602176634e-19,
    electron_mass=9.1093837015e-31,
    vacuum_permittivity=8.8541878128e-12,
    vacuum_permeability=1.25663706212e-6,
    light_speed=299792458.0,
    planck=6.62607015e-34,
)


def make_constants() -> Constants:
    return CODATA2018


def vec3(x: float, y: float, z: float) -> np.ndarray:
    """Return a finite float 3-vector."""
    v = np.array([x, y, z], dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite vector components: {v!r}")
    return v


I_HAT = vec3(1.0, 0.0, 0.0)
J_HAT = vec3(0.0, 1.0, 0.0)
K_HAT = vec3(0.0, 0.0, 1.0)


class Side(str, enum.Enum):
    """Which side of the electron path the solenoid sits on.

    ``LEFT`` puts the solenoid at y = +y0, ``RIGHT`` at y = -y0.  For a
    negative charge and mu > 0 the left side advances the electron
    (positive longitudinal shift); the right side retards it.
    """

    LEFT = "left"
    RIGHT = "right"

    @property
    def sign(self) -> int:
        return 1 if self is Side.LEFT else -1

    def flipped(self) -> "Side":
        return Side.RIGHT if self is Side.LEFT else Side.LEFT


class PerturbativeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Scenario:
    """One electron pass by a magnetic dipole.

    The dipole moment points along +x, the electron moves along +z on the
    line x = y = 0 and the dipole sits at (0, +/-y0, 0).
    """

    mu: float
    y0: float
    v0: float
    side: Side = Side.LEFT
    charge: float | None = None
    mass: float | None = None
    z_span: float = 1e4
    constants: Constants = field(default=CODATA2018)
    allow_relativistic: bool = False

    def __post_init__(self):
        if not isinstance(self.side, Side):
            object.__setattr__(self, "side", Side(self.side))
        if self.charge is None:
            object.__setattr__(self, "charge", -self.constants.e)
        if self.mass is None:
            object.__setattr__(self, "mass", self.constants.m_e)
        for name in ("mu", "y0", "v0", "charge", "mass", "z_span"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.mu < 0:
            raise ValueError("mu must be >= 0 (the moment direction is fixed along +x)")
        if self.y0 <= 0:
            raise ValueError("y0 must be > 0")
        if self.mass <= 0:
            raise ValueError("mass must be > 0")
        if self.z_span < MIN_Z_SPAN:
            raise ValueError(f"z_span must be >= {MIN_Z_SPAN:g}")
        if not 0 < self.v0 < self.constants.c:
            raise RegimeError("v0 must satisfy 0 < v0 < c")
        if self.beta >= BETA_LIMIT and not self.allow_relativistic:
            raise RegimeError(
                f"beta = v0/c = {self.beta:.4g} violates the slow-electron (gamma ~ 1) "
                f"regime beta < {BETA_LIMIT}; set allow_relativistic to override"
            )

    @property
    def beta(self) -> float:
        return self.v0 / self.constants.c

    @property
    def shift_sign(self) -> int:
        """Sign of the longitudinal shift: +1 is an advance along +z."""
        if self.charge == 0 or self.mu == 0:
            return 0
        return -int(math.copysign(1, self.charge)) * self.side.sign

    @property
    def solenoid_position(self) -> np.ndarray:
        return vec3(0.0, self.side.sign * self.y0, 0.0)

    @property
    def mu_vec(self) -> np.ndarray:
        return self.mu * I_HAT

    @property
    def velocity(self) -> np.ndarray:
        return self.v0 * K_HAT

    @property
    def z_max(self) -> float:
        """Path half-length in metres."""
        return self.z_span * self.y0

    def replace(self, **changes) -> "Scenario":
        return replace(self, **changes)


@dataclass(frozen=True)
class DimensionlessCoupling:
    kappa: float
    beta: float


def _log_abs(x: float) -> float:
    return math.log(abs(x)) if x != 0 else -math.inf


def coupling(s: Scenario) -> DimensionlessCoupling:
    """kappa = |q| mu / (4 pi eps0 c^2 m v0 y0^2).

    The half-shift per pass is ``kappa * y0`` and the peak velocity change
    is ``kappa * v0``.
    """
    k = s.constants
    if s.mu == 0 or s.charge == 0:
        return DimensionlessCoupling(0.0, s.beta)
    denominator_logs = (
        math.log(4 * math.pi),
        _log_abs(k.eps0),
        2 * _log_abs(k.c),
        _log_abs(s.mass),
        _log_abs(s.v0),
        2 * _log_abs(s.y0),
    )
    log_kappa = _log_abs(s.charge) + _log_abs(s.mu) - sum(denominator_logs)
    # keep a margin so the subsequent products stay normal
    if not (math.log(1e-290) < log_kappa < math.log(1e290)):
        raise ScaleRangeError(f"coupling kappa ~ exp({log_kappa:.1f}) is outside double range")
    # ratios are ordered so each intermediate stays near unity
    kappa = (abs(s.charge) / s.mass) * (s.mu / (4 * math.pi * k.eps0 * k.c)) / k.c
    kappa = kappa / s.v0 / s.y0 / s.y0
    if not (math.isfinite(kappa) and kappa > 0):
        raise ScaleRangeError("coupling kappa lost to over/underflow")
    if kappa > KAPPA_WARN:
        warnings.warn(
            f"kappa = {kappa:.3g} > {KAPPA_WARN:g}: outside the perturbative regime",
            PerturbativeWarning,
            stacklevel=2,
        )
    return DimensionlessCoupling(kappa, s.beta)


def scale_length(s: Scenario, x):
    return x / s.y0


def unscale_length(s: Scenario, x):
    return x * s.y0


def scale_time(s: Scenario, t):
    return t * s.v0 / s.y0


def unscale_time(s: Scenario, t):
    return t * s.y0 / s.v0
