"""Small diagnostics shared by the CLI and the verification suite."""

from __future__ import annotations

import numpy as np

from .profiles import Profile


def modulation_period(profile: Profile) -> float | None:
    """One modulation period of a periodic profile, None for aperiodic ones."""
    if profile.kind == "parametric_resonance":
        return 2.0 * np.pi / (profile.epsilon * profile.omega0)
    if profile.kind == "janszky_adam":
        return profile.hold_high + profile.hold_low
    return None


def trailing_mean(times, values, window: float, n_sub: int = 64) -> np.ndarray:
    """Running mean of ``values`` over the trailing ``window`` at each time.

    Evaluated by linear interpolation on ``n_sub`` points per window, so the
    result is insensitive to the record spacing.  Times earlier than
    ``times[0] + window`` average over whatever part of the window is
    covered.
    """
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if window <= 0:
        return values.copy()
    out = np.empty_like(values)
    for i, t in enumerate(times):
        lo = max(t - window, times[0])
        grid = np.linspace(lo, t, n_sub)
        out[i] = np.interp(grid, times, values).mean()
    return out


def linear_fit(x, y):
    """Least-squares line through (x, y); returns (slope, intercept, r_squared)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    design = np.vstack([np.ones_like(x), x]).T
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = y - design @ coef
    ss_res = float(np.sum(residual**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - (ss_res / ss_tot if ss_tot > 0 else 0.0)
    return float(coef[1]), float(coef[0]), r2


def first_local_max(values, floor: float = 0.0) -> int | None:
    """Index of the first interior local maximum above ``floor``, or None."""
    v = np.asarray(values, dtype=np.float64)
    for i in range(1, v.shape[0] - 1):
        if v[i] > floor and v[i] > v[i - 1] and v[i] >= v[i + 1]:
            return i
    return None
