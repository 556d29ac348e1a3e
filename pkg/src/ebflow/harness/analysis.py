"""Analytic oscillation periods and period extraction from tip-radius series."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from ..errors import InsufficientOscillations


def analytic_period_2d(n: int, sigma: float, rho_d: float, rho_o: float, R0: float) -> float:
    """Period 2π/ω of mode ``n`` of a 2D droplet, ω² = (n³-n)σ / ((ρ_d+ρ_o)R0³)."""
    if n < 2 or rho_d <= 0 or rho_o <= 0 or R0 <= 0 or sigma < 0:
        raise ValueError("need n >= 2 and positive densities and radius")
    if sigma == 0:
        return math.inf
    omega = math.sqrt((n ** 3 - n) * sigma / ((rho_d + rho_o) * R0 ** 3))
    return 2.0 * math.pi / omega


def analytic_period_3d(n: int, We: float, R0: float, lam: float) -> float:
    """Period of mode ``n`` of a 3D droplet with density ratio ``lam`` at Weber number ``We``."""
    if n < 2 or We <= 0 or R0 <= 0 or lam < 0:
        raise ValueError("need n >= 2, We > 0, R0 > 0 and lambda >= 0")
    omega2 = n * (n - 1) * (n + 1) * (n + 2) / (We * R0 ** 3 * (n + 1 + n * lam))
    return 2.0 * math.pi / math.sqrt(omega2)


@dataclass
class OscillationRecord:
    t: list = field(default_factory=list)
    radius: list = field(default_factory=list)
    period: float = math.nan
    extrema: list = field(default_factory=list)

    def append(self, t, r) -> None:
        self.t.append(float(t))
        self.radius.append(float(r))


def _vertex(t, r, i):
    """Time and value of the parabola through samples i-1, i, i+1."""
    t0, t1, t2 = t[i - 1], t[i], t[i + 1]
    r0, r1, r2 = r[i - 1], r[i], r[i + 1]
    a, b, c = np.polyfit([t0 - t1, 0.0, t2 - t1], [r0, r1, r2], 2)
    if a == 0.0:
        return t1, r1
    s = -b / (2.0 * a)
    s = min(max(s, t0 - t1), t2 - t1)
    return t1 + s, c + b * s + a * s * s


def extract_period(record, t_estimate: float | None = None, prominence: float = 0.1) -> float:
    """Period as twice the mean gap between successive extrema of r(t).

    Samples with t < 0.1·t_estimate are discarded.  Extrema are local maxima
    and minima whose prominence exceeds ``prominence`` times the signal range,
    refined by a parabola through the three samples around each.
    """
    t = np.asarray(record.t, dtype=float)
    r = np.asarray(record.radius, dtype=float)
    if t_estimate is not None and math.isfinite(t_estimate):
        keep = t >= 0.1 * t_estimate
        t, r = t[keep], r[keep]
    if len(t) < 3:
        raise InsufficientOscillations("too few samples")
    span = float(r.max() - r.min())
    if span <= 0.0:
        raise InsufficientOscillations("constant signal")
    peaks, _ = find_peaks(r, prominence=prominence * span)
    troughs, _ = find_peaks(-r, prominence=prominence * span)
    idx = np.sort(np.concatenate([peaks, troughs]))
    if len(idx) < 3:
        raise InsufficientOscillations(f"found {len(idx)} extrema, need at least 3")
    ext = [_vertex(t, r, i) for i in idx]
    times = np.array([e[0] for e in ext])
    period = 2.0 * float(np.mean(np.diff(times)))
    if hasattr(record, "extrema"):
        record.extrema = ext
        record.period = period
    return period
