"""Interaction energy and force on the electron in both frames.

Geometry: the electron sits at (0, y_e, z_e), the dipole at (0, +/-y0, 0).
Forces are gradients with respect to the electron position, so
``F = grad_e(mu . B)`` in the dipole rest frame and ``F = grad_e(p . E)``
in the electron rest frame, with B (resp. E) the electron's field at the
dipole.  Because p = (v_dipole x mu) / c^2 = (mu x v_e) / c^2, the two
energies ``mu . B`` and ``p . E`` are the same function, which is what makes
the frames agree.

The longitudinal component drives the phase shift.  The transverse one is
reported but the straight-line path ignores it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import K_HAT, Scenario, Side
from .errors import StepSizeError
from .fields import Frame, coulomb_E, motional_electric_dipole

__all__ = [
    "ForceSample",
    "interaction_energy_lab",
    "interaction_energy_electron_frame",
    "force_lab",
    "force_electron_frame",
    "force_numeric_oracle",
    "coulomb_directional_derivative",
    "longitudinal_kernel",
    "transverse_kernel",
    "unit_force",
    "lab_energy_surface",
    "electron_frame_energy_surface",
]


@dataclass(frozen=True)
class ForceSample:
    F: np.ndarray
    frame: Frame
    z: float
    side: Side
    y0: float


def _separation(s: Scenario, z: float, y: float = 0.0) -> np.ndarray:
    """Vector from the electron to the dipole."""
    return s.solenoid_position - np.array([0.0, y, z])


def _prefactor(s: Scenario) -> float:
    """q mu v0 / (4 pi eps0 c^2), in N m^3."""
    c = s.constants
    return s.charge * s.mu * s.v0 / (4 * math.pi * c.eps0 * c.c**2)


def interaction_energy_lab(s: Scenario, z: float, y: float = 0.0) -> float:
    """eps = -mu . B, B being the moving electron's magnetic field at the dipole."""
    c = s.constants
    r = _separation(s, z, y)
    E = coulomb_E(s.charge, r, c)
    B = np.cross(s.velocity, E) / c.c**2
    return -float(np.dot(s.mu_vec, B))


def interaction_energy_electron_frame(s: Scenario, z: float, y: float = 0.0) -> float:
    """eps = -p . E with p the moving dipole's electric moment."""
    p = motional_electric_dipole(-s.velocity, s.mu_vec, s.constants)
    E = coulomb_E(s.charge, _separation(s, z, y), s.constants)
    return -float(np.dot(p, E))


def force_lab(s: Scenario, z: float) -> ForceSample:
    """Analytic grad(mu . B) on the straight path (y_e = 0).

    F_z = 3 q mu v0 (+/-y0) z / (4 pi eps0 c^2 R^5)
    F_y = q mu v0 / (4 pi eps0 c^2) [1/R^3 - 3 y0^2/R^5],  R^2 = y0^2 + z^2
    """
    K = _prefactor(s)
    R2 = s.y0 * s.y0 + z * z
    R = math.sqrt(R2)
    R3 = R2 * R
    R5 = R3 * R2
    F_z = 3.0 * K * s.side.sign * s.y0 * z / R5
    F_y = K * (1.0 / R3 - 3.0 * s.y0 * s.y0 / R5)
    return ForceSample(np.array([0.0, F_y, F_z]), Frame.SOLENOID_REST, z, s.side, s.y0)


def coulomb_directional_derivative(q: float, r, direction, constants) -> np.ndarray:
    """(d . grad) E for a point charge field evaluated at r (charge at origin)."""
    r = np.asarray(r, dtype=float)
    d = np.asarray(direction, dtype=float)
    rn = float(np.linalg.norm(r))
    return q / (4 * math.pi * constants.eps0) * (d / rn**3 - 3.0 * np.dot(d, r) * r / rn**5)


def force_electron_frame(s: Scenario, z: float) -> ForceSample:
    """Force on the resting electron from the moving dipole's electric moment.

    The dipole moves with -v0 k_hat and carries p = (v x mu) / c^2.  The
    force on it in the electron's Coulomb field is (p . grad) E; the
    electron feels the opposite.
    """
    p = motional_electric_dipole(-s.v0 * K_HAT, s.mu_vec, s.constants)
    r = _separation(s, z)
    F_on_dipole = coulomb_directional_derivative(s.charge, r, p, s.constants)
    return ForceSample(-F_on_dipole, Frame.ELECTRON_REST, z, s.side, s.y0)


def lab_energy_surface(s: Scenario) -> Callable[[float, float], float]:
    """(y_e, z_e) -> mu . B.  Its gradient is the force on the electron."""
    return lambda y, z: -interaction_energy_lab(s, z, y)


def electron_frame_energy_surface(s: Scenario) -> Callable[[float, float], float]:
    """(y_e, z_e) -> p . E.  Its gradient is the force on the electron."""
    return lambda y, z: -interaction_energy_electron_frame(s, z, y)


_EPS = np.finfo(float).eps


def force_numeric_oracle(energy, point, h: float, noise_limit: float = 1e-6) -> np.ndarray:
    """Richardson-extrapolated central-difference gradient of ``energy(y, z)``.

    Returns the 3-vector (0, d/dy, d/dz).  Raises :class:`StepSizeError`
    when the estimated rounding noise exceeds ``noise_limit`` relative to
    the gradient norm.
    """
    if h <= 0:
        raise ValueError("h must be > 0")
    y, z = float(point[0]), float(point[1])
    if y == 0.0 and z == 0.0:
        raise ValueError("oracle point must not be the origin")

    def central(step):
        fyp, fym = energy(y + step, z), energy(y - step, z)
        fzp, fzm = energy(y, z + step), energy(y, z - step)
        g = np.array([(fyp - fym) / (2 * step), (fzp - fzm) / (2 * step)])
        scale = max(abs(fyp), abs(fym), abs(fzp), abs(fzm))
        return g, scale

    g1, s1 = central(h)
    g2, s2 = central(h / 2)
    g = (4.0 * g2 - g1) / 3.0
    # rounding error of the extrapolated difference, dominated by the h/2 stage
    noise = 4.0 * _EPS * max(s1, s2) / (h / 2)
    gn = float(np.linalg.norm(g))
    if gn > 0 and noise > noise_limit * gn:
        raise StepSizeError(
            f"step h={h:g} too small: rounding noise {noise:.3g} vs gradient {gn:.3g}"
        )
    return np.array([0.0, g[0], g[1]])


# Dimensionless kernels: force in units of m v0^2 / y0, lengths in y0.
# On the straight path F_z = shift_sign * kappa * longitudinal_kernel(zeta)
# and F_y = sign(q) * kappa * transverse_kernel(zeta).


def longitudinal_kernel(zeta):
    return -3.0 * zeta / (1.0 + zeta * zeta) ** 2.5


def transverse_kernel(zeta):
    R2 = 1.0 + zeta * zeta
    return 1.0 / R2**1.5 - 3.0 / R2**2.5


def unit_force(d, v_hat) -> np.ndarray:
    """Force shape for electron-minus-dipole separation ``d`` and velocity ``v_hat``.

    Both in scaled units.  The physical force is ``sign(q) * kappa`` times
    this vector.  ``v_hat`` enters through B = v x E, so a deflected electron
    carries its actual velocity into the interaction.
    """
    d = np.asarray(d, dtype=float)
    a = np.array([0.0, -v_hat[2], v_hat[1]])  # x_hat cross v_hat
    dn2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
    dn = math.sqrt(dn2)
    dn3 = dn2 * dn
    return -(a / dn3 - 3.0 * (a[0] * d[0] + a[1] * d[1] + a[2] * d[2]) * d / (dn3 * dn2))
