"""Comparator distances: Lp norms and the PIDist equidepth-range similarity.

PIDist scores proximity only on dimensions where two observations fall into
the same equidepth range, as a proportion of that range's width.  It is a
similarity, exposed here converted to a distance; no metric properties are
claimed for it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DistanceMatrix, TimeSeriesSet, ValidationError

__all__ = [
    "InvalidPError",
    "KTooLargeError",
    "EquidepthRanges",
    "lp_distance_matrix",
    "build_equidepth_ranges",
    "pidist_similarity",
    "pidist_distance_matrix",
    "default_pidist_k",
]


class InvalidPError(ValidationError):
    pass


class KTooLargeError(ValidationError):
    pass


def lp_distance_matrix(ts: TimeSeriesSet, p: float = 2.0) -> DistanceMatrix:
    """Pairwise Lp distance; p = 2 gives the Euclidean baseline."""
    if p < 1:
        raise InvalidPError(f"p must be >= 1, got {p}")
    x = ts.values
    diff = np.abs(x[:, None, :] - x[None, :, :])
    d = np.sum(diff**p, axis=2) ** (1.0 / p)
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(d, method="lp")


@dataclass(frozen=True, eq=False)
class EquidepthRanges:
    """Per-dimension equidepth ranges built from the observed values.

    Each dimension's N values are split, in sorted order (ties broken by
    observation index), into k groups whose sizes differ by at most one,
    larger groups first.  A group's range spans its lowest to highest value.
    ``assignments[t, x]`` is the range index of observation x on dimension t:
    the lowest-indexed range whose closed interval contains the value.
    """

    lows: np.ndarray  # (t, k)
    highs: np.ndarray  # (t, k)
    assignments: np.ndarray  # (t, n) int

    @property
    def k(self) -> int:
        return self.lows.shape[1]

    @property
    def widths(self) -> np.ndarray:
        return self.highs - self.lows

    def assign(self, t: int, value: float) -> int:
        """Range index for a value on dimension t (boundary ties go low)."""
        contains = (self.lows[t] <= value) & (value <= self.highs[t])
        idx = np.flatnonzero(contains)
        if idx.size == 0:
            raise ValueError(f"value {value} outside all ranges on dimension {t}")
        return int(idx[0])


def build_equidepth_ranges(ts: TimeSeriesSet, k: int) -> EquidepthRanges:
    """Split each dimension's values into k equal-count groups."""
    n, t = ts.n, ts.t
    if not 1 <= k <= n:
        raise KTooLargeError(f"k must be in 1..N={n}, got {k}")
    base, rem = divmod(n, k)
    sizes = [base + 1] * rem + [base] * (k - rem)
    bounds = np.cumsum([0] + sizes)
    lows = np.empty((t, k))
    highs = np.empty((t, k))
    assignments = np.empty((t, n), dtype=np.int64)
    for dim in range(t):
        vals = ts.values[:, dim]
        order = np.argsort(vals, kind="stable")
        s = vals[order]
        for g in range(k):
            lows[dim, g] = s[bounds[g]]
            highs[dim, g] = s[bounds[g + 1] - 1]
        # Lowest-indexed containing range wins on shared boundaries.
        for x in range(n):
            contains = (lows[dim] <= vals[x]) & (vals[x] <= highs[dim])
            assignments[dim, x] = int(np.flatnonzero(contains)[0])
    for a in (lows, highs, assignments):
        a.setflags(write=False)
    return EquidepthRanges(lows=lows, highs=highs, assignments=assignments)


def pidist_similarity(
    ranges: EquidepthRanges, ts: TimeSeriesSet, x: int, y: int, p: float = 2.0
) -> float:
    """PIDist similarity of observations x and y.

    Sums ``(1 - |x(t) - y(t)| / r_t)**p`` over dimensions where both fall in
    the same range, then takes the 1/p power; an empty sum gives 0.  A term
    on a zero-width range (all group values tied) is 1, the limit of the
    formula when both values coincide.
    """
    if p < 1:
        raise InvalidPError(f"p must be >= 1, got {p}")
    ax = ranges.assignments[:, x]
    ay = ranges.assignments[:, y]
    same = ax == ay
    if not same.any():
        return 0.0
    dims = np.flatnonzero(same)
    r = ranges.widths[dims, ax[dims]]
    gap = np.abs(ts.values[x, dims] - ts.values[y, dims])
    terms = np.where(r > 0, (1.0 - gap / np.where(r > 0, r, 1.0)) ** p, 1.0)
    return float(np.sum(terms) ** (1.0 / p))


def pidist_distance_matrix(
    ts: TimeSeriesSet, k: int, p: float = 2.0, rescale: bool = True
) -> DistanceMatrix:
    """PIDist converted to a distance.

    With ``rescale`` (the default) the similarity is divided by its maximum
    attainable value T**(1/p) and inverted, giving distances in [0, 1];
    otherwise the distance is T**(1/p) minus the similarity.  Rescaling is
    optional in the original formulation, so it is exposed as a flag.
    """
    ranges = build_equidepth_ranges(ts, k)
    n = ts.n
    max_sim = ts.t ** (1.0 / p)
    d = np.zeros((n, n))
    for i in range(n - 1):
        for j in range(i + 1, n):
            s = pidist_similarity(ranges, ts, i, j, p)
            d[i, j] = d[j, i] = 1.0 - s / max_sim if rescale else max_sim - s
    return DistanceMatrix(d, method="pidist")


def default_pidist_k(n: int) -> int:
    """Default range count: ceil(N/10) clamped to [2, N].

    The original recommendation varies with dimension; this is a declared
    default, not a reconstruction of it.
    """
    return min(max(2, -(-n // 10)), n)
