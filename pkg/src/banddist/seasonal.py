"""Typical intra-day curve estimation and removal.

The expected value at (time-of-day t, calendar day c) is estimated with a
Nadaraya-Watson smoother using a product of periodic (wrapped Gaussian)
kernels, averaging across all years of data.  This is a declared substitute
for a penalized additive-model fit: the downstream pipeline only consumes the
fitted surface, and the substitution reproduces the seasonal shape
qualitatively rather than matching any particular smoother's output.

Calendar days are indexed 1..366 on a leap-year calendar; in non-leap years
the Feb 29 column simply receives no direct observations and is filled by the
kernel weighting.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass

import numpy as np

from .core import TimeSeriesSet, ValidationError

__all__ = [
    "MissingDateLabelError",
    "InsufficientDataError",
    "SeasonalSurface",
    "YEAR_DAYS",
    "day_of_year_index",
    "fit_seasonal",
    "remove_seasonal",
]

YEAR_DAYS = 366

DEFAULT_H_T = 12.0  # two hours of ten-minute readings
DEFAULT_H_C = 15.0  # days


class MissingDateLabelError(ValidationError):
    pass


class InsufficientDataError(ValidationError):
    pass


def day_of_year_index(label: str) -> int:
    """Calendar-day index 1..366, aligned on the leap-year calendar.

    Dates after Feb 28 in non-leap years map to the same index as in leap
    years (Mar 1 is always 61).
    """
    try:
        d = datetime.date.fromisoformat(label.strip())
    except ValueError as exc:
        raise MissingDateLabelError(f"label {label!r} is not an ISO date") from exc
    return datetime.date(2000, d.month, d.day).timetuple().tm_yday


def _wrapped_gaussian(n: int, h: float) -> np.ndarray:
    """n x n kernel matrix K[a, b] = exp(-0.5 (d/h)^2) with circular distance d."""
    if h <= 0:
        raise ValidationError("bandwidth must be positive")
    idx = np.arange(n)
    gap = np.abs(idx[:, None] - idx[None, :])
    gap = np.minimum(gap, n - gap)
    return np.exp(-0.5 * (gap / h) ** 2)


@dataclass(frozen=True, eq=False)
class SeasonalSurface:
    """Expected value at (time-of-day, calendar day): a T x 366 grid."""

    grid: np.ndarray  # (day_length, YEAR_DAYS)
    h_t: float
    h_c: float

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=np.float64)
        if g.ndim != 2 or g.shape[1] != YEAR_DAYS:
            raise ValidationError(f"grid must be (day_length, {YEAR_DAYS})")
        if not np.isfinite(g).all():
            raise ValidationError("surface must be finite")
        g.setflags(write=False)
        object.__setattr__(self, "grid", g)

    @property
    def day_length(self) -> int:
        return self.grid.shape[0]

    def at(self, t: int, c: int) -> float:
        """Value at 1-based time-of-day t and calendar day c, wrapping both."""
        return float(self.grid[(t - 1) % self.day_length, (c - 1) % YEAR_DAYS])


def _calendar_days(ts: TimeSeriesSet) -> np.ndarray:
    if ts.labels is None:
        raise MissingDateLabelError("observations must carry date labels")
    return np.array([day_of_year_index(lab) for lab in ts.labels], dtype=np.int64)


def fit_seasonal(
    ts: TimeSeriesSet, h_t: float = DEFAULT_H_T, h_c: float = DEFAULT_H_C
) -> SeasonalSurface:
    """Fit the typical daily curve surface from dated daily observations.

    Each row of ``ts`` is one day (labelled with its ISO date); the estimate
    at grid cell (t, c) is the kernel-weighted average of all readings, with
    weights separable over time-of-day and calendar-day circular distances.
    The estimator is linear in the data and periodic in both axes.
    """
    days = _calendar_days(ts)
    x = ts.values  # (n_days, day_length)
    day_len = ts.t
    k_t = _wrapped_gaussian(day_len, h_t)  # (T, T)
    k_c_full = _wrapped_gaussian(YEAR_DAYS, h_c)  # (366, 366)
    k_c = k_c_full[:, days - 1]  # (366, n_days)
    numer = k_c @ x @ k_t.T  # (366, T)
    denom = k_c.sum(axis=1)[:, None] * k_t.sum(axis=1)[None, :]  # (366, T)
    if (denom <= 0).any():
        raise InsufficientDataError("a grid cell received zero kernel weight")
    return SeasonalSurface(grid=(numer / denom).T, h_t=h_t, h_c=h_c)


def remove_seasonal(ts: TimeSeriesSet, surface: SeasonalSurface) -> TimeSeriesSet:
    """Subtract the typical daily curve from each dated observation."""
    if surface.day_length != ts.t:
        raise ValidationError(
            f"surface day length {surface.day_length} != series length {ts.t}"
        )
    days = _calendar_days(ts)
    residuals = ts.values - surface.grid[:, days - 1].T
    return TimeSeriesSet(residuals, labels=ts.labels)
