"""Band distance between time series.

A band is the region between the pointwise min and max of two observations.
The distance between x and y is one minus the average Jaccard similarity of
the time-index sets where each falls inside a band, averaged over the
"informative" bands: those containing x or y at at least one time index.

Two implementations are provided: :func:`band_distance_matrix`, built on a
precomputed containment table, and :func:`naive_band_distance_matrix`, a
direct transcription of the definitions used as a brute-force oracle.  Both
enumerate bands in lexicographic (i, j) order and reduce the per-band values
identically, so their outputs agree bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DistanceMatrix, TimeSeriesSet

__all__ = [
    "Band",
    "ContainmentTable",
    "ResourceLimitError",
    "DEFAULT_MEMORY_CAP",
    "band_pairs",
    "band_index",
    "build_containment",
    "bandwise_similarity",
    "band_distance_pair",
    "band_distance_matrix",
    "naive_band_distance_matrix",
]

DEFAULT_MEMORY_CAP = 2 * 1024**3  # bytes


class ResourceLimitError(RuntimeError):
    """The containment table would exceed the configured memory cap."""


@dataclass(frozen=True, order=True)
class Band:
    """A band defined by the ordered pair (i, j) of observation indices, i < j."""

    i: int
    j: int

    def __post_init__(self):
        if not 0 <= self.i < self.j:
            raise ValueError(f"band indices must satisfy 0 <= i < j, got {self}")


def band_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Defining index pairs of all N*(N-1)/2 bands, in lexicographic order."""
    return np.triu_indices(n, k=1)


def band_index(n: int, i: int, j: int) -> int:
    """Position of band (i, j) in the lexicographic enumeration."""
    if not 0 <= i < j < n:
        raise IndexError(f"invalid band ({i}, {j}) for n={n}")
    return i * (2 * n - i - 1) // 2 + (j - i - 1)


@dataclass(frozen=True, eq=False)
class ContainmentTable:
    """Per-band, per-observation containment bits over time.

    ``bits[b, x, t]`` is True iff observation x lies inside band b at time t
    (closed interval on both sides).  ``popcounts[b, x]`` caches the number
    of times x is inside band b.
    """

    bits: np.ndarray  # (n_bands, n, t) bool
    popcounts: np.ndarray  # (n_bands, n) int64
    pair_i: np.ndarray
    pair_j: np.ndarray

    @property
    def n_bands(self) -> int:
        return self.bits.shape[0]

    @property
    def n(self) -> int:
        return self.bits.shape[1]


def build_containment(
    ts: TimeSeriesSet, memory_cap: int = DEFAULT_MEMORY_CAP
) -> ContainmentTable:
    """Evaluate all band envelopes and containment bits for a dataset.

    Raises :class:`ResourceLimitError` if the table would exceed
    ``memory_cap`` bytes (bits are stored one byte each).
    """
    x = ts.values
    n, t = x.shape
    n_bands = n * (n - 1) // 2
    needed = n_bands * n * t  # bytes, one per bit
    if needed > memory_cap:
        raise ResourceLimitError(
            f"containment table needs {needed} bytes > cap {memory_cap}"
        )
    ii, jj = band_pairs(n)
    lo = np.minimum(x[ii], x[jj])  # (n_bands, t)
    hi = np.maximum(x[ii], x[jj])
    bits = (x[None, :, :] >= lo[:, None, :]) & (x[None, :, :] <= hi[:, None, :])
    pop = bits.sum(axis=2, dtype=np.int64)
    for a in (bits, pop, ii, jj):
        a.setflags(write=False)
    return ContainmentTable(bits=bits, popcounts=pop, pair_i=ii, pair_j=jj)


def bandwise_similarity(table: ContainmentTable, b: Band, x: int, y: int) -> float:
    """Jaccard similarity of the time-index sets of x and y inside band b.

    Defined as 1 when the union is empty (the band never contains either
    observation).
    """
    bi = band_index(table.n, b.i, b.j)
    inter = int(np.count_nonzero(table.bits[bi, x] & table.bits[bi, y]))
    union = int(table.popcounts[bi, x] + table.popcounts[bi, y]) - inter
    if union == 0:
        return 1.0
    return inter / union


def _pair_distance_from_columns(inter: np.ndarray, union: np.ndarray) -> float:
    # Average d = 1 - inter/union over informative bands (union > 0), in
    # band-enumeration order, dividing once at the end.
    informative = union > 0
    d = 1.0 - inter[informative] / union[informative]
    return float(np.sum(d) / d.size)


def band_distance_pair(table: ContainmentTable, x: int, y: int) -> float:
    """Band distance between observations x and y, in [0, 1]."""
    inter = np.count_nonzero(table.bits[:, x] & table.bits[:, y], axis=1).astype(
        np.float64
    )
    union = (table.popcounts[:, x] + table.popcounts[:, y]).astype(np.float64) - inter
    return _pair_distance_from_columns(inter, union)


def band_distance_matrix(
    ts: TimeSeriesSet, memory_cap: int = DEFAULT_MEMORY_CAP
) -> DistanceMatrix:
    """Pairwise band distances for all observations.

    Containment bits are shared across pairs; the per-band intersection
    counts are computed with one batched matrix product.
    """
    table = build_containment(ts, memory_cap=memory_cap)
    n = table.n
    # float32 holds the integer counts exactly (t <= 2**24) and dispatches
    # the batched product to BLAS.
    bits_f = table.bits.astype(np.float32)
    inter = np.matmul(bits_f, bits_f.transpose(0, 2, 1))  # (n_bands, n, n)
    pop = table.popcounts
    out = np.zeros((n, n), dtype=np.float64)
    for i in range(n - 1):
        inter_i = inter[:, i, :].astype(np.float64)
        union_i = (pop[:, i][:, None] + pop).astype(np.float64) - inter_i
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = _pair_distance_from_columns(
                inter_i[:, j], union_i[:, j]
            )
    return DistanceMatrix(out, method="band")


def naive_band_distance_matrix(ts: TimeSeriesSet) -> DistanceMatrix:
    """Brute-force band distance straight from the definitions.

    Re-evaluates the min/max envelopes per (band, pair, time); O(N^4 T), so
    intended for small instances and as the oracle for the fast path.
    """
    x = ts.values
    n, t = x.shape
    bands = [(i, j) for i in range(n - 1) for j in range(i + 1, n)]
    contained = []
    for i, j in bands:
        in_band = []
        for obs in range(n):
            times = set()
            for tt in range(t):
                lo = min(x[i, tt], x[j, tt])
                hi = max(x[i, tt], x[j, tt])
                if lo <= x[obs, tt] <= hi:
                    times.add(tt)
            in_band.append(frozenset(times))
        contained.append(in_band)
    out = np.zeros((n, n), dtype=np.float64)
    for a in range(n - 1):
        for b in range(a + 1, n):
            inter, union = [], []
            for in_band in contained:
                ta, tb = in_band[a], in_band[b]
                u = len(ta | tb)
                if u == 0:
                    continue  # uninformative band, excluded from the average
                inter.append(len(ta & tb))
                union.append(u)
            out[a, b] = out[b, a] = _pair_distance_from_columns(
                np.array(inter, dtype=np.float64), np.array(union, dtype=np.float64)
            )
    return DistanceMatrix(out, method="band")
