"""Far-field two-slit pattern with a phase offset between the two paths.

I(x) = sinc^2(pi a x / (lambda L)) * cos^2(pi d x / (lambda L) + phi / 2)

The single-slit envelope does not depend on phi; only the fringes under it
move, by -phi * lambda * L / (2 pi d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnderResolvedError

__all__ = [
    "SlitGeometry",
    "FringePattern",
    "pattern",
    "extract_shift",
    "envelope_peak",
    "predicted_shift",
    "dense_peak_oracle",
]

MIN_SAMPLES = 512
MIN_SAMPLES_PER_FRINGE = 8


@dataclass(frozen=True)
class SlitGeometry:
    slit_width: float
    slit_separation: float
    screen_distance: float
    wavelength: float
    n_samples: int = 4096
    half_width: float | None = None  # defaults to 10 fringe spacings

    def __post_init__(self):
        if min(self.slit_width, self.slit_separation, self.screen_distance, self.wavelength) <= 0:
            raise ValueError("slit geometry lengths must be > 0")
        if not self.slit_width < self.slit_separation:
            raise ValueError("slit_width must be smaller than slit_separation")
        if self.screen_distance < 100 * self.slit_separation:
            raise ValueError("screen_distance must be >= 100 * slit_separation (far field)")
        if self.n_samples < MIN_SAMPLES:
            raise ValueError(f"n_samples must be >= {MIN_SAMPLES}")
        if self.half_width is None:
            object.__setattr__(self, "half_width", 10.0 * self.fringe_spacing)
        elif self.half_width <= 0:
            raise ValueError("half_width must be > 0")

    @property
    def fringe_spacing(self) -> float:
        return self.wavelength * self.screen_distance / self.slit_separation

    def screen(self, oversample: int = 1) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n_samples * oversample)


@dataclass(frozen=True)
class FringePattern:
    x: np.ndarray
    intensity: np.ndarray
    envelope: np.ndarray
    phase_offset: float
    envelope_peak_x: float
    fringe_peak_x: float


def _envelope(g: SlitGeometry, x):
    # np.sinc(t) = sin(pi t) / (pi t)
    return np.sinc(g.slit_width * x / (g.wavelength * g.screen_distance)) ** 2


def _fringes(g: SlitGeometry, x, phi):
    return np.cos(math.pi * g.slit_separation * x / (g.wavelength * g.screen_distance) + 0.5 * phi) ** 2


def predicted_shift(g: SlitGeometry, phi: float) -> float:
    return -phi * g.fringe_spacing / (2 * math.pi)


def _raw(g: SlitGeometry, phi: float, x):
    env = _envelope(g, x)
    return env, env * _fringes(g, x, phi)


def _parabolic_vertex(x, y, i):
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2 * y1 + y2
    if denom == 0:
        return x[i], y1
    offset = 0.5 * (y0 - y2) / denom
    dx = x[i + 1] - x[i]
    return x[i] + offset * dx, y1 - 0.25 * (y0 - y2) * offset


def _local_maxima(y):
    inner = (y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:])
    return np.flatnonzero(inner) + 1


def _check_resolution(g: SlitGeometry, x):
    dx = x[1] - x[0]
    if g.fringe_spacing < MIN_SAMPLES_PER_FRINGE * dx:
        raise UnderResolvedError(
            f"fringe spacing {g.fringe_spacing:.3g} m spans fewer than "
            f"{MIN_SAMPLES_PER_FRINGE} samples (dx = {dx:.3g} m)"
        )


def _fringe_peak(x, intensity):
    peaks = _local_maxima(intensity)
    if peaks.size == 0:
        raise UnderResolvedError("no interior fringe maximum found")
    i = peaks[np.argmin(np.abs(x[peaks]))]
    return _parabolic_vertex(x, intensity, i)[0]


def envelope_peak(x, intensity, fit_half_width: float) -> float:
    """Envelope centre from a parabola fitted to the log heights of the fringe maxima.

    Only maxima with |x| <= ``fit_half_width`` enter the fit.
    """
    peaks = _local_maxima(intensity)
    pts = [_parabolic_vertex(x, intensity, i) for i in peaks]
    pts = [(px, py) for px, py in pts if abs(px) <= fit_half_width and py > 0]
    if len(pts) < 3:
        raise UnderResolvedError("need at least three fringe maxima to fit the envelope")
    px, py = np.array(pts).T
    a, b, _ = np.polyfit(px, np.log(py), 2)
    return -b / (2 * a)


def pattern(g: SlitGeometry, phi: float) -> FringePattern:
    """Sample the pattern on the screen and locate the fringe and envelope peaks."""
    x = g.screen()
    _check_resolution(g, x)
    env, raw = _raw(g, phi, x)
    intensity = raw / raw.max()
    fringe_x = _fringe_peak(x, intensity)
    env_x = envelope_peak(x, intensity, 0.5 * g.half_width)
    return FringePattern(x, intensity, env, phi, env_x, fringe_x)


def extract_shift(p: FringePattern, g: SlitGeometry) -> float:
    """Sub-sample position of the fringe maximum nearest x = 0."""
    _check_resolution(g, p.x)
    return _fringe_peak(p.x, p.intensity)


def dense_peak_oracle(g: SlitGeometry, phi: float, oversample: int = 100) -> float:
    """Brute-force fringe peak: argmax on an ``oversample`` times denser grid.

    Searches within half a fringe spacing of the predicted position.
    """
    center = predicted_shift(g, phi)
    half = 0.5 * g.fringe_spacing
    n = max(int(2 * half / (2 * g.half_width) * g.n_samples * oversample), 3)
    x = np.linspace(center - half, center + half, n)
    _, raw = _raw(g, phi, x)
    return float(x[np.argmax(raw)])
