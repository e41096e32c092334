"""Dormand-Prince 5(4) embedded Runge-Kutta integrator.

The 5th-order solution is propagated (local extrapolation); the embedded
4th-order solution supplies the error estimate.  Coefficients from Hairer,
Norsett & Wanner, *Solving Ordinary Differential Equations I*, Table 5.2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IntegrationError

__all__ = ["StepStats", "OdeSolution", "dopri5", "dopri5_fixed"]

C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
E = B5 - B4

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


@dataclass
class StepStats:
    accepted: int = 0
    rejected: int = 0
    n_evals: int = 0
    max_error_ratio: float = 0.0  # largest scaled error norm among accepted steps

    @property
    def attempted(self) -> int:
        return self.accepted + self.rejected


@dataclass
class OdeSolution:
    t: float
    y: np.ndarray
    stats: StepStats


def _stages(f, t, y, h, k0):
    k = [k0]
    for i in range(1, 7):
        dy = h * sum(a * kj for a, kj in zip(A[i], k) if a != 0.0)
        k.append(np.asarray(f(t + C[i] * h, y + dy), dtype=float))
    return k


def _initial_step(f, t0, y0, f0, rel_tol, abs_tol, span):
    # Hairer's starting-step heuristic for a 5th-order method
    scale = abs_tol + rel_tol * np.abs(y0)
    d0 = math.sqrt(np.mean((y0 / scale) ** 2))
    d1 = math.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    f1 = np.asarray(f(t0 + h0, y0 + h0 * f0), dtype=float)
    d2 = math.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)


def dopri5(f, t0: float, y0, t_end: float, rel_tol: float = 1e-10, abs_tol: float = 1e-12,
           h0: float | None = None, max_steps: int = 200_000) -> OdeSolution:
    """Integrate y' = f(t, y) from t0 to t_end (t_end > t0) with error control.

    The last step is clipped to land exactly on ``t_end``.  Raises
    :class:`IntegrationError` on step-size underflow or when ``max_steps``
    is exhausted.
    """
    if not t_end > t0:
        raise ValueError("t_end must exceed t0")
    y = np.array(y0, dtype=float)
    t = float(t0)
    stats = StepStats()
    k0 = np.asarray(f(t, y), dtype=float)
    stats.n_evals += 1
    span = t_end - t0
    h = h0 if h0 is not None else _initial_step(f, t, y, k0, rel_tol, abs_tol, span)
    stats.n_evals += 0 if h0 is not None else 1

    while t < t_end:
        if stats.attempted >= max_steps:
            raise IntegrationError(
                f"tolerance not achieved within {max_steps} steps (t = {t:g} of {t_end:g})"
            )
        last = t + h >= t_end
        if last:
            h = t_end - t
        if h <= 16 * np.finfo(float).eps * max(abs(t), 1.0) and not last:
            raise IntegrationError(f"step size underflow at t = {t:g} (h = {h:g})")
        k = _stages(f, t, y, h, k0)
        stats.n_evals += 6
        y_new = y + h * sum(b * kj for b, kj in zip(B5, k) if b != 0.0)
        err = h * sum(e * kj for e, kj in zip(E, k))
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = math.sqrt(float(np.mean((err / scale) ** 2)))
        if not math.isfinite(err_norm):
            raise IntegrationError(f"non-finite error estimate at t = {t:g}")
        if err_norm <= 1.0:
            t = t_end if last else t + h
            y = y_new
            k0 = k[6]  # first-same-as-last
            stats.accepted += 1
            stats.max_error_ratio = max(stats.max_error_ratio, err_norm)
            factor = MAX_FACTOR if err_norm == 0 else min(MAX_FACTOR, SAFETY * err_norm**-0.2)
        else:
            stats.rejected += 1
            factor = max(MIN_FACTOR, SAFETY * err_norm**-0.2)
        h = h * factor
    return OdeSolution(t, y, stats)


def dopri5_fixed(f, t0: float, y0, t_end: float, n_steps: int) -> np.ndarray:
    """Propagate the 5th-order solution with ``n_steps`` equal steps."""
    y = np.array(y0, dtype=float)
    h = (t_end - t0) / n_steps
    k0 = np.asarray(f(t0, y), dtype=float)
    for i in range(n_steps):
        t = t0 + i * h
        k = _stages(f, t, y, h, k0)
        y = y + h * sum(b * kj for b, kj in zip(B5, k) if b != 0.0)
        k0 = k[6]
    return y
