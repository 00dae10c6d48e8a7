"""Shared domain types, validation, and CSV serialization.

All numeric data is stored as 64-bit floats.  Types are immutable after
construction and safe to share across workers.  Time indices are 1-based in
all documentation and external file formats; internal arrays are 0-based.
"""

from __future__ import annotations

import csv
import hashlib
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ValidationError",
    "NonFiniteError",
    "TooFewObservationsError",
    "RaggedRowsError",
    "LengthMismatchError",
    "DegenerateBandWarning",
    "TimeSeriesSet",
    "DistanceMatrix",
    "Partition",
    "LabeledDataset",
    "validate_set",
    "read_matrix_csv",
    "write_matrix_csv",
    "content_hash",
]

# Full round-trip precision for CSV output.
_FLOAT_FMT = ".17g"


class ValidationError(ValueError):
    """Base class for invalid domain data."""


class NonFiniteError(ValidationError):
    """A NaN or infinite entry was found; carries its (row, column) location."""

    def __init__(self, row: int, col: int):
        self.row = row
        self.col = col
        super().__init__(f"non-finite value at row {row}, column {col}")


class TooFewObservationsError(ValidationError):
    pass


class RaggedRowsError(ValidationError):
    pass


class LengthMismatchError(ValidationError):
    pass


class DegenerateBandWarning(UserWarning):
    """N = 2 datasets have a single band containing both observations everywhere,
    so the band distance between distinct rows is 0."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TimeSeriesSet:
    """N observations of a real-valued series over T shared time points.

    Rows are observations, columns are time indices t = 1..T.  Optional
    ``labels`` give one text identifier per row (e.g. dates).
    """

    values: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 2:
            raise RaggedRowsError("expected a 2-D matrix of observations")
        if v.shape[0] < 2:
            raise TooFewObservationsError(
                f"need at least 2 observations, got {v.shape[0]}"
            )
        if v.shape[1] < 1:
            raise ValidationError("need at least one time point")
        v = v.astype(np.float64)
        bad = ~np.isfinite(v)
        if bad.any():
            r, c = np.argwhere(bad)[0]
            raise NonFiniteError(int(r), int(c))
        if self.labels is not None and len(self.labels) != v.shape[0]:
            raise LengthMismatchError("labels length must equal N")
        object.__setattr__(self, "values", _freeze(v))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        if v.shape[0] == 2:
            warnings.warn(
                "N = 2: the only band contains both observations everywhere, "
                "so their band distance is 0 even if they differ",
                DegenerateBandWarning,
                stacklevel=3,
            )

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def t(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other):
        if not isinstance(other, TimeSeriesSet):
            return NotImplemented
        return np.array_equal(self.values, other.values) and self.labels == other.labels


def validate_set(raw, labels=None) -> TimeSeriesSet:
    """Validate a raw matrix and return a :class:`TimeSeriesSet`.

    Never repairs data: non-finite entries, fewer than two rows, or ragged
    rows raise the corresponding :class:`ValidationError` subclass.
    Idempotent: validating the values of a valid set returns an equal set.
    """
    if isinstance(raw, TimeSeriesSet):
        return raw
    if isinstance(raw, np.ndarray):
        arr = raw
    else:
        rows = [np.asarray(r, dtype=np.float64) for r in raw]
        if rows and any(r.shape != rows[0].shape for r in rows):
            lengths = sorted({r.shape for r in rows})
            raise RaggedRowsError(f"rows have differing lengths: {lengths}")
        arr = np.asarray(rows, dtype=np.float64)
    return TimeSeriesSet(arr, labels=tuple(labels) if labels is not None else None)


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric N x N matrix of pairwise distances with a method tag."""

    values: np.ndarray
    method: str  # one of "band", "lp", "pidist"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValidationError("distance matrix must be square")
        if self.method not in ("band", "lp", "pidist"):
            raise ValidationError(f"unknown method tag {self.method!r}")
        if not np.array_equal(v, v.T):
            raise ValidationError("distance matrix must be exactly symmetric")
        if np.diag(v).any():
            raise ValidationError("distance matrix must have a zero diagonal")
        if (v < 0).any():
            raise ValidationError("distances must be nonnegative")
        if self.method == "band" and (v > 1).any():
            raise ValidationError("band distances must lie in [0, 1]")
        object.__setattr__(self, "values", _freeze(v))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other):
        if not isinstance(other, DistanceMatrix):
            return NotImplemented
        return self.method == other.method and np.array_equal(
            self.values, other.values
        )


@dataclass(frozen=True, eq=False)
class Partition:
    """Cluster labels (ids 1..k) plus medoid indices for medoid-based methods."""

    labels: np.ndarray
    medoids: tuple[int, ...] | None = None

    def __post_init__(self):
        lab = np.asarray(self.labels, dtype=np.int64)
        if lab.ndim != 1:
            raise ValidationError("labels must be a 1-D sequence")
        k = int(lab.max(initial=0))
        if set(np.unique(lab)) != set(range(1, k + 1)):
            raise ValidationError("cluster ids must be exactly 1..k, each nonempty")
        if self.medoids is not None:
            med = tuple(int(m) for m in self.medoids)
            if len(med) != k:
                raise ValidationError("need one medoid per cluster")
            for cid, m in enumerate(med, start=1):
                if lab[m] != cid:
                    raise ValidationError(
                        f"medoid {m} of cluster {cid} carries label {lab[m]}"
                    )
            object.__setattr__(self, "medoids", med)
        lab.setflags(write=False)
        object.__setattr__(self, "labels", lab)

    @property
    def k(self) -> int:
        return int(self.labels.max())

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.labels, other.labels) and self.medoids == other.medoids


@dataclass(frozen=True)
class LabeledDataset:
    """A TimeSeriesSet together with known class ids for each observation."""

    series: TimeSeriesSet
    truth: np.ndarray

    def __post_init__(self):
        tr = np.asarray(self.truth, dtype=np.int64)
        if tr.shape != (self.series.n,):
            raise LengthMismatchError("truth length must equal N")
        tr.setflags(write=False)
        object.__setattr__(self, "truth", tr)


def _is_number(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def format_float(x: float) -> str:
    return format(float(x), _FLOAT_FMT)


def write_matrix_csv(path, values, labels=None, header=None) -> None:
    """Write a matrix as CSV at full (17 significant digit) precision."""
    values = np.asarray(values, dtype=np.float64)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if header is not None:
            w.writerow(header)
        for i, row in enumerate(values):
            cells = [format_float(x) for x in row]
            if labels is not None:
                cells = [labels[i]] + cells
            w.writerow(cells)


def read_matrix_csv(path):
    """Read a CSV matrix; returns ``(values, labels)``.

    An optional header row and an optional leading label column are
    auto-detected by non-numeric content.
    """
    with open(path, "r", newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise ValidationError(f"{path}: empty file")
    start = 0
    # A header row is one whose trailing cells are all non-numeric.
    if len(rows) > 1 and all(not _is_number(c) for c in rows[0][1:]):
        start = 1
    body = rows[start:]
    has_labels = any(not _is_number(r[0]) for r in body)
    labels = [r[0] for r in body] if has_labels else None
    data_rows = [r[1:] for r in body] if has_labels else body
    widths = {len(r) for r in data_rows}
    if len(widths) != 1:
        raise RaggedRowsError(f"{path}: rows have differing lengths {sorted(widths)}")
    try:
        values = np.array([[float(c) for c in r] for r in data_rows], dtype=np.float64)
    except ValueError as exc:
        raise ValidationError(f"{path}: non-numeric cell ({exc})") from exc
    return values, labels


def content_hash(ts: TimeSeriesSet) -> str:
    """SHA-256 of the set's values and labels, used to key distance caches."""
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(ts.values).tobytes())
    if ts.labels:
        h.update("\x1f".join(ts.labels).encode("utf-8"))
    return h.hexdigest()
