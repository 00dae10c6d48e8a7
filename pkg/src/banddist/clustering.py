"""k-medoids (PAM) over a distance matrix, a minimal k-means baseline, and
partition-agreement scores (Rand index, adjusted Rand index).

Determinism: PAM uses BUILD initialization plus full SWAP, and every tie is
broken by lowest index, so two runs on equal inputs produce identical
partitions.  Optional random restarts replace BUILD with seeded random
initializations and keep the best final cost.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .core import (
    DistanceMatrix,
    LengthMismatchError,
    Partition,
    TimeSeriesSet,
    ValidationError,
)
from .baselines import KTooLargeError

__all__ = [
    "KMedoidsConfig",
    "kmedoids",
    "kmedoids_cost",
    "kmeans",
    "rand_index",
    "adjusted_rand_index",
]


@dataclass(frozen=True)
class KMedoidsConfig:
    k: int
    max_iterations: int = 100
    seed: int = 0
    restarts: int = 0  # 0 -> deterministic BUILD initialization

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError("k must be positive")
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be positive")
        if self.restarts < 0:
            raise ValidationError("restarts must be nonnegative")


def kmedoids_cost(d: np.ndarray, medoids: np.ndarray) -> float:
    """Total distance from each point to its nearest medoid."""
    return float(np.sum(np.min(d[:, medoids], axis=1)))


def _build_init(d: np.ndarray, k: int) -> np.ndarray:
    """Greedy BUILD: start from the point minimizing total distance, then
    repeatedly add the medoid yielding the largest cost reduction."""
    medoids = [int(np.argmin(d.sum(axis=1)))]
    nearest = d[:, medoids[0]].copy()
    for _ in range(1, k):
        gain = np.sum(np.maximum(nearest[None, :] - d, 0.0), axis=1)
        gain[medoids] = -np.inf
        c = int(np.argmax(gain))
        medoids.append(c)
        nearest = np.minimum(nearest, d[:, c])
    return np.array(sorted(medoids), dtype=np.int64)


def _swap_phase(d: np.ndarray, medoids: np.ndarray, max_iterations: int) -> np.ndarray:
    """Full PAM SWAP: apply the best strictly improving (medoid, candidate)
    swap until none exists or the iteration cap is reached."""
    n = d.shape[0]
    medoids = np.array(sorted(medoids), dtype=np.int64)
    for _ in range(max_iterations):
        dm = d[:, medoids]  # (n, k)
        order = np.argsort(dm, axis=1, kind="stable")
        n1 = order[:, 0]  # index into medoids of the nearest
        d1 = dm[np.arange(n), n1]
        d2 = dm[np.arange(n), order[:, 1]] if medoids.size > 1 else np.full(n, np.inf)
        others = np.setdiff1d(np.arange(n), medoids)
        if others.size == 0:
            break
        dc = d[:, others]  # (n, n-k)
        best = (0.0, None, None)
        for mi in range(medoids.size):
            mine = n1 == mi
            delta = np.where(
                mine[:, None],
                np.minimum(dc, d2[:, None]) - d1[:, None],
                np.minimum(dc - d1[:, None], 0.0),
            ).sum(axis=0)
            ci = int(np.argmin(delta))
            if delta[ci] < best[0] - 1e-12 or (
                best[1] is not None
                and abs(delta[ci] - best[0]) <= 1e-12
                and (mi, others[ci]) < (best[1], best[2])
            ):
                best = (float(delta[ci]), mi, int(others[ci]))
        if best[1] is None or best[0] >= -1e-12:
            break
        previous = medoids
        medoids = medoids.copy()
        medoids[best[1]] = best[2]
        medoids = np.array(sorted(medoids), dtype=np.int64)
        # Debug-build invariant: every accepted swap strictly lowers the cost.
        assert kmedoids_cost(d, medoids) < kmedoids_cost(d, previous)
    return medoids


def _assign(d: np.ndarray, medoids: np.ndarray) -> np.ndarray:
    """Labels 1..k by nearest medoid; ties go to the lower medoid index.

    Medoids are kept in ascending index order, so cluster id c is the c-th
    smallest medoid index."""
    dm = d[:, medoids]
    return np.argmin(dm, axis=1).astype(np.int64) + 1


def kmedoids(dist: DistanceMatrix, cfg: KMedoidsConfig) -> Partition:
    """Partition a distance matrix into k clusters around medoids (PAM)."""
    d = dist.values
    n = d.shape[0]
    if cfg.k > n:
        raise KTooLargeError(f"k={cfg.k} exceeds N={n}")
    candidates = [_build_init(d, cfg.k)]
    if cfg.restarts > 0:
        rng = np.random.default_rng(cfg.seed)
        for _ in range(cfg.restarts):
            candidates.append(
                np.sort(rng.choice(n, size=cfg.k, replace=False)).astype(np.int64)
            )
    best_medoids, best_cost = None, np.inf
    for init in candidates:
        medoids = _swap_phase(d, init, cfg.max_iterations)
        cost = kmedoids_cost(d, medoids)
        if cost < best_cost - 1e-12:
            best_medoids, best_cost = medoids, cost
    labels = _assign(d, best_medoids)
    # Guarantee the defining label of each medoid despite distance ties.
    for cid, m in enumerate(best_medoids, start=1):
        labels[m] = cid
    return Partition(labels=labels, medoids=tuple(int(m) for m in best_medoids))


def kmeans(
    ts: TimeSeriesSet, k: int, seed: int = 0, max_iterations: int = 100
) -> tuple[Partition, np.ndarray]:
    """Lloyd's k-means with Euclidean assignment; returns (partition, centroids).

    Included as the mean-dominated baseline: its centroids are pointwise
    averages, so cluster representatives are unrealistically smooth.  An
    emptied cluster is re-seeded with the point farthest from its centroid.
    """
    x = ts.values
    n = x.shape[0]
    if k > n:
        raise KTooLargeError(f"k={k} exceeds N={n}")
    rng = np.random.default_rng(seed)
    centroids = x[np.sort(rng.choice(n, size=k, replace=False))].copy()
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(max_iterations):
        d2 = np.sum((x[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
        new_labels = np.argmin(d2, axis=1)
        for c in range(k):
            members = new_labels == c
            if not members.any():
                stray = int(np.argmax(d2[np.arange(n), new_labels]))
                new_labels[stray] = c
                members = new_labels == c
            centroids[c] = x[members].mean(axis=0)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    # Renumber to 1..k_effective and reorder centroids to match; clusters
    # emptied by degenerate data are dropped.
    order: list[int] = []
    for v in labels:
        if int(v) not in order:
            order.append(int(v))
    return Partition(labels=_relabel(labels)), centroids[order]


def _relabel(raw: np.ndarray) -> np.ndarray:
    """Map arbitrary label values to 1..k in order of first appearance."""
    out = np.empty_like(raw)
    seen: dict[int, int] = {}
    for idx, v in enumerate(raw):
        out[idx] = seen.setdefault(int(v), len(seen) + 1)
    return out


def _contingency(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatchError("partitions must be equal-length 1-D sequences")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)
    return table


def rand_index(a, b) -> float:
    """Fraction of observation pairs on which two partitions agree."""
    table = _contingency(a, b)
    n = int(table.sum())
    if n < 2:
        raise LengthMismatchError("need at least 2 observations")
    both = sum(comb(int(v), 2) for v in table.ravel())
    in_a = sum(comb(int(v), 2) for v in table.sum(axis=1))
    in_b = sum(comb(int(v), 2) for v in table.sum(axis=0))
    total = comb(n, 2)
    agree = total + 2 * both - in_a - in_b
    return agree / total


def adjusted_rand_index(a, b) -> float:
    """Hubert-Arabie chance-corrected Rand index.

    When the correction denominator is zero (expected index equals the
    maximum), returns 1 if the partitions are identical and 0 otherwise.
    """
    table = _contingency(a, b)
    n = int(table.sum())
    if n < 2:
        raise LengthMismatchError("need at least 2 observations")
    index = sum(comb(int(v), 2) for v in table.ravel())
    in_a = sum(comb(int(v), 2) for v in table.sum(axis=1))
    in_b = sum(comb(int(v), 2) for v in table.sum(axis=0))
    expected = in_a * in_b / comb(n, 2)
    maximum = (in_a + in_b) / 2
    if maximum == expected:
        return 1.0 if _same_partition(table) else 0.0
    return (index - expected) / (maximum - expected)


def _same_partition(table: np.ndarray) -> bool:
    # Identical up to relabeling: exactly one nonzero cell per row and column.
    return (
        table.shape[0] == table.shape[1]
        and ((table > 0).sum(axis=0) == 1).all()
        and ((table > 0).sum(axis=1) == 1).all()
    )
