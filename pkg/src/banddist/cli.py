"""Command-line entry point: data ingestion, pipeline orchestration, and
result/plot-data emission.

Every command writes its artifacts plus a ``manifest.json`` recording the
command, all parameters, and SHA-256 hashes of the input files; re-invoking
with ``banddist rerun --manifest <path>`` reproduces the artifacts byte for
byte.  Plot output is data-only (CSV series and (window, bin, value)
triples); rendering is external.

The memory cap for the band containment table can be overridden with the
``BANDDIST_MEMORY_CAP`` environment variable (bytes).
"""

from __future__ import annotations

import argparse
import csv
import datetime
import hashlib
import json
import os
import sys
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bands, baselines, clustering, seasonal, spectral
from . import simulation as sim
from .core import (
    DistanceMatrix,
    Partition,
    TimeSeriesSet,
    ValidationError,
    content_hash,
    format_float,
    read_matrix_csv,
    validate_set,
    write_matrix_csv,
)

__all__ = [
    "RunConfig",
    "WindIngestSpec",
    "IncompleteDayError",
    "ParseError",
    "MissingArtifactError",
    "ingest",
    "run_pipeline",
    "emit_report",
    "main",
]

DAY_LENGTH = 144
MEMORY_CAP_ENV = "BANDDIST_MEMORY_CAP"


class IncompleteDayError(ValidationError):
    pass


class ParseError(ValidationError):
    pass


class MissingArtifactError(ValidationError):
    pass


@dataclass(frozen=True)
class WindIngestSpec:
    """Input layout: ``wide`` (one day per row, 144 columns, date label) or
    ``long`` (timestamp,value rows; complete 144-reading days required)."""

    format: str = "wide"
    day_length: int = DAY_LENGTH

    def __post_init__(self):
        if self.format not in ("wide", "long"):
            raise ValidationError(f"unknown ingest format {self.format!r}")


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation: a command plus its JSON-serializable parameters."""

    command: str
    params: dict
    out_dir: str = "."


def _memory_cap() -> int:
    raw = os.environ.get(MEMORY_CAP_ENV)
    return int(raw) if raw else bands.DEFAULT_MEMORY_CAP


def ingest(spec: WindIngestSpec, path) -> TimeSeriesSet:
    """Read dated daily observations; one row per complete day, ordered by date."""
    if spec.format == "wide":
        values, labels = read_matrix_csv(path)
        if labels is not None:
            order = np.argsort(np.array(labels, dtype=object), kind="stable")
            values = values[order]
            labels = [labels[i] for i in order]
        return validate_set(values, labels=labels)
    by_day: dict[str, list[tuple[str, float]]] = defaultdict(list)
    with open(path, "r", newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            if lineno == 1 and not _is_float(row[-1]):
                continue  # header
            if len(row) != 2:
                raise ParseError(f"{path}:{lineno}: expected timestamp,value")
            try:
                stamp = datetime.datetime.fromisoformat(row[0].strip())
                value = float(row[1])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
            by_day[stamp.date().isoformat()].append((row[0].strip(), value))
    incomplete = {
        day: len(rows)
        for day, rows in by_day.items()
        if len(rows) != spec.day_length
    }
    if incomplete:
        listing = ", ".join(f"{d} ({c} readings)" for d, c in sorted(incomplete.items()))
        raise IncompleteDayError(f"incomplete days: {listing}")
    days = sorted(by_day)
    values = np.array(
        [[v for _, v in sorted(by_day[d])] for d in days], dtype=np.float64
    )
    return validate_set(values, labels=days)


def _is_float(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def _parse_method(text: str):
    """Parse a distance method flag: band | lp[:p] | pidist[:k[,p]]."""
    name, _, rest = text.partition(":")
    if name == "band":
        return ("band", {})
    if name == "lp":
        return ("lp", {"p": float(rest) if rest else 2.0})
    if name == "pidist":
        parts = [p for p in rest.split(",") if p]
        return (
            "pidist",
            {
                "k": int(parts[0]) if parts else 0,  # 0 -> default from N
                "p": float(parts[1]) if len(parts) > 1 else 2.0,
            },
        )
    raise ValidationError(f"unknown distance method {text!r}")


def _compute_distance(ts: TimeSeriesSet, method: str, opts: dict) -> DistanceMatrix:
    if method == "band":
        return bands.band_distance_matrix(ts, memory_cap=_memory_cap())
    if method == "lp":
        return baselines.lp_distance_matrix(ts, p=opts["p"])
    k = opts["k"] or baselines.default_pidist_k(ts.n)
    return baselines.pidist_distance_matrix(ts, k=k, p=opts["p"])


def _sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(cfg: RunConfig, inputs, outputs) -> Path:
    manifest = {
        "command": cfg.command,
        "parameters": cfg.params,
        "out_dir": cfg.out_dir,
        "inputs": {str(p): _sha256_file(p) for p in inputs},
        "outputs": sorted(str(o) for o in outputs),
    }
    path = Path(cfg.out_dir) / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", "utf-8")
    return path


def _distance_with_cache(ts: TimeSeriesSet, method: str, opts: dict, cache_dir):
    """Binary distance cache keyed by the input set's content hash."""
    if not cache_dir:
        return _compute_distance(ts, method, opts)
    tag = method + json.dumps(opts, sort_keys=True)
    key = hashlib.sha256((content_hash(ts) + tag).encode()).hexdigest()
    cache = Path(cache_dir) / f"{key}.npy"
    if cache.exists():
        return DistanceMatrix(np.load(cache), method=method)
    dist = _compute_distance(ts, method, opts)
    cache.parent.mkdir(parents=True, exist_ok=True)
    np.save(cache, dist.values)
    return dist


def _write_partition_csv(path, part: Partition, labels) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["observation", "cluster", "is_medoid"])
        medoids = set(part.medoids or ())
        for i, cid in enumerate(part.labels):
            name = labels[i] if labels else str(i + 1)
            w.writerow([name, int(cid), int(i in medoids)])


def _paper_sample(ts: TimeSeriesSet) -> TimeSeriesSet:
    """First 15 June and December days per year, mirroring the 90-day study."""
    if ts.labels is None:
        raise ValidationError("--paper-sample requires dated observations")
    chosen: list[int] = []
    seen: Counter = Counter()
    for i, lab in enumerate(ts.labels):
        d = datetime.date.fromisoformat(lab)
        if d.month in (6, 12) and seen[(d.year, d.month)] < 15:
            seen[(d.year, d.month)] += 1
            chosen.append(i)
    return validate_set(ts.values[chosen], labels=[ts.labels[i] for i in chosen])


def _load_input(p: dict) -> TimeSeriesSet:
    spec = WindIngestSpec(
        format=p.get("format", "wide"), day_length=p.get("day_length", DAY_LENGTH)
    )
    ts = ingest(spec, p["input"])
    if p.get("paper_sample"):
        ts = _paper_sample(ts)
    return ts


def _transform(ts: TimeSeriesSet, p: dict, extra_outputs, out: Path) -> TimeSeriesSet:
    """Optional detrend and/or spectral transform ahead of the distance stage."""
    kind = p.get("transform", "none")
    if kind not in ("none", "detrend", "stft", "detrend+stft", "pgram"):
        raise ValidationError(f"unknown transform {kind!r}")
    if kind.startswith("detrend"):
        surface = seasonal.fit_seasonal(
            ts, h_t=p.get("h_t", seasonal.DEFAULT_H_T),
            h_c=p.get("h_c", seasonal.DEFAULT_H_C),
        )
        ts = seasonal.remove_seasonal(ts, surface)
        path = out / "surface.csv"
        write_matrix_csv(path, surface.grid)
        extra_outputs.append(path)
    if kind.endswith("stft"):
        vecs = [
            spectral.vectorize_stft(
                spectral.stft(
                    row,
                    win=p.get("win", spectral.STFT_DEFAULTS["win"]),
                    inc=p.get("inc", spectral.STFT_DEFAULTS["inc"]),
                    n_coef=p.get("n_coef", spectral.STFT_DEFAULTS["n_coef"]),
                    taper=p.get("taper", spectral.STFT_DEFAULTS["taper"]),
                    floor_eps=p.get("floor_eps", spectral.STFT_DEFAULTS["floor_eps"]),
                    normalize_variance=p.get("normalize_variance", False),
                ),
                augment_mean=p.get("augment_mean", False),
                normalize_variance=p.get("normalize_variance", False),
            )
            for row in ts.values
        ]
        ts = validate_set(np.vstack(vecs), labels=ts.labels)
    elif kind == "pgram":
        spans = tuple(p.get("spans", spectral.DEFAULT_DANIELL_SPANS))
        rows = [
            spectral.daniell_smooth(spectral.periodogram(row), spans).ordinates
            for row in ts.values
        ]
        ts = validate_set(np.vstack(rows), labels=ts.labels)
    return ts


# ---------------------------------------------------------------------------
# Commands


def _cmd_distances(cfg: RunConfig) -> list[Path]:
    p = cfg.params
    out = Path(cfg.out_dir)
    ts = _load_input(p)
    method, opts = _parse_method(p.get("method", "band"))
    dist = _distance_with_cache(ts, method, opts, p.get("cache_dir"))
    path = out / "distances.csv"
    write_matrix_csv(path, dist.values, labels=list(ts.labels) if ts.labels else None)
    return [path]


def _cmd_cluster(cfg: RunConfig) -> list[Path]:
    p = cfg.params
    out = Path(cfg.out_dir)
    ts = _load_input(p)
    extra: list[Path] = []
    ts = _transform(ts, p, extra, out)
    method, opts = _parse_method(p.get("method", "band"))
    dist = _distance_with_cache(ts, method, opts, p.get("cache_dir"))
    part = clustering.kmedoids(
        dist,
        clustering.KMedoidsConfig(
            k=p.get("k", 6),
            seed=p.get("seed", 0),
            restarts=p.get("restarts", 0),
        ),
    )
    dist_path = out / "distances.csv"
    write_matrix_csv(dist_path, dist.values, labels=list(ts.labels) if ts.labels else None)
    part_path = out / "partition.csv"
    _write_partition_csv(part_path, part, ts.labels)
    report = emit_report(part, ts, out, params=p)
    return [dist_path, part_path, *extra, *report]


def _cmd_simulate(cfg: RunConfig) -> list[Path]:
    p = cfg.params
    out = Path(cfg.out_dir)
    design = p.get("design", "a").lower()
    runs = p.get("runs", 100)
    seed = p.get("seed", 0)
    spans = tuple(p.get("spans", spectral.DEFAULT_DANIELL_SPANS))
    generators = {
        "a": sim.simulation_a_run,
        "b": sim.simulation_b_run,
        "c": lambda s: sim.simulation_c_run(s, spans=spans),
    }
    if design not in generators:
        raise ValidationError(f"unknown design {design!r}")
    result = sim.compare_methods(generators[design], m=runs, seed=seed)
    runs_path = out / "runs.csv"
    with open(runs_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["run", "rand_band", "rand_euclid", "delta"])
        for r in range(result.m):
            w.writerow(
                [
                    r,
                    format_float(result.rand_band[r]),
                    format_float(result.rand_euclid[r]),
                    format_float(result.delta[r]),
                ]
            )
    summary = {
        "design": design,
        "M": result.m,
        "mean_delta": result.mean_delta,
        "sd_delta": result.sd_delta,
        "z": result.z,
        "zero_variance": result.zero_variance,
        "config": {"seed": seed, "runs": runs, "spans": list(spans)},
    }
    summary_path = out / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", "utf-8")
    return [runs_path, summary_path]


def _cmd_detrend(cfg: RunConfig) -> list[Path]:
    p = cfg.params
    out = Path(cfg.out_dir)
    ts = _load_input(p)
    surface = seasonal.fit_seasonal(
        ts, h_t=p.get("h_t", seasonal.DEFAULT_H_T), h_c=p.get("h_c", seasonal.DEFAULT_H_C)
    )
    residuals = seasonal.remove_seasonal(ts, surface)
    res_path = out / "residuals.csv"
    write_matrix_csv(res_path, residuals.values, labels=list(ts.labels))
    surf_path = out / "surface.csv"
    write_matrix_csv(surf_path, surface.grid)
    return [res_path, surf_path]


def _cmd_stft(cfg: RunConfig) -> list[Path]:
    p = cfg.params
    out = Path(cfg.out_dir)
    ts = _load_input(p)
    vecs, triples = [], []
    for i, row in enumerate(ts.values):
        img = spectral.stft(
            row,
            win=p.get("win", spectral.STFT_DEFAULTS["win"]),
            inc=p.get("inc", spectral.STFT_DEFAULTS["inc"]),
            n_coef=p.get("n_coef", spectral.STFT_DEFAULTS["n_coef"]),
            taper=p.get("taper", spectral.STFT_DEFAULTS["taper"]),
            floor_eps=p.get("floor_eps", spectral.STFT_DEFAULTS["floor_eps"]),
            normalize_variance=p.get("normalize_variance", False),
        )
        vecs.append(
            spectral.vectorize_stft(
                img,
                augment_mean=p.get("augment_mean", False),
                normalize_variance=p.get("normalize_variance", False),
            )
        )
        name = ts.labels[i] if ts.labels else str(i + 1)
        for w, f, v in spectral.stft_plot_triples(img):
            triples.append([name, int(w), int(f), format_float(v)])
    vec_path = out / "stft_vectors.csv"
    write_matrix_csv(vec_path, np.vstack(vecs), labels=list(ts.labels) if ts.labels else None)
    tri_path = out / "stft_triples.csv"
    with open(tri_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["observation", "window", "bin", "value"])
        w.writerows(triples)
    return [vec_path, tri_path]


def _cmd_pgram(cfg: RunConfig) -> list[Path]:
    p = cfg.params
    out = Path(cfg.out_dir)
    ts = _load_input(p)
    spans = tuple(p.get("spans", spectral.DEFAULT_DANIELL_SPANS))
    rows = [
        spectral.daniell_smooth(spectral.periodogram(row), spans).ordinates
        for row in ts.values
    ]
    path = out / "pgram.csv"
    write_matrix_csv(path, np.vstack(rows), labels=list(ts.labels) if ts.labels else None)
    return [path]


def emit_report(part: Partition, ts: TimeSeriesSet, out_dir, params=None) -> list[Path]:
    """Write per-cluster member lists (with month counts when labels are
    dates), medoid series, and line plot data."""
    out = Path(out_dir)
    months = None
    if ts.labels:
        try:
            months = [datetime.date.fromisoformat(lab).month for lab in ts.labels]
        except ValueError:
            months = None
    clusters_path = out / "clusters.csv"
    with open(clusters_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        header = ["cluster", "size", "members"]
        if months is not None:
            header += [f"month_{m:02d}" for m in range(1, 13)]
        w.writerow(header)
        for cid in range(1, part.k + 1):
            idx = np.flatnonzero(part.labels == cid)
            names = [ts.labels[i] if ts.labels else str(i + 1) for i in idx]
            row = [cid, len(idx), ";".join(names)]
            if months is not None:
                counts = Counter(months[i] for i in idx)
                row += [counts.get(m, 0) for m in range(1, 13)]
            w.writerow(row)
    outputs = [clusters_path]
    if part.medoids is not None:
        medoid_path = out / "medoids.csv"
        write_matrix_csv(
            medoid_path,
            ts.values[list(part.medoids)],
            labels=[ts.labels[m] if ts.labels else str(m + 1) for m in part.medoids],
        )
        outputs.append(medoid_path)
    return outputs


def _cmd_report(cfg: RunConfig) -> list[Path]:
    p = cfg.params
    part_path = Path(p["partition"])
    data_path = Path(p["input"])
    for required in (part_path, data_path):
        if not required.exists():
            raise MissingArtifactError(f"missing artifact: {required}")
    with open(part_path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    labels = np.array([int(r["cluster"]) for r in rows])
    medoids = tuple(i for i, r in enumerate(rows) if int(r["is_medoid"]))
    part = Partition(labels=labels, medoids=medoids if medoids else None)
    values, names = read_matrix_csv(data_path)
    ts = validate_set(values, labels=names or [r["observation"] for r in rows])
    return emit_report(part, ts, cfg.out_dir, params=p)


_COMMANDS = {
    "distances": _cmd_distances,
    "cluster": _cmd_cluster,
    "simulate": _cmd_simulate,
    "detrend": _cmd_detrend,
    "stft": _cmd_stft,
    "pgram": _cmd_pgram,
    "report": _cmd_report,
}


def run_pipeline(cfg: RunConfig) -> int:
    """Execute one command; writes artifacts plus a manifest, returns 0 on
    success.  Errors are reported with the failing stage's name."""
    if cfg.command not in _COMMANDS:
        raise ValidationError(f"unknown command {cfg.command!r}")
    Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
    try:
        outputs = _COMMANDS[cfg.command](cfg)
    except Exception as exc:
        print(f"error [{cfg.command}]: {exc}", file=sys.stderr)
        return 1
    inputs = [
        cfg.params[key]
        for key in ("input", "partition")
        if cfg.params.get(key) and Path(cfg.params[key]).exists()
    ]
    _write_manifest(cfg, inputs, [Path(o).name for o in outputs])
    return 0


def _add_input_args(sub, long_format=True):
    sub.add_argument("--input", required=True, help="input CSV file")
    sub.add_argument("--format", choices=["wide", "long"], default="wide")
    sub.add_argument("--out", default=".", help="output directory")
    sub.add_argument(
        "--paper-sample",
        action="store_true",
        help="keep only the first 15 June and December days per year",
    )


def _add_spectral_args(sub):
    sub.add_argument("--win", type=int, default=spectral.STFT_DEFAULTS["win"])
    sub.add_argument("--inc", type=int, default=spectral.STFT_DEFAULTS["inc"])
    sub.add_argument("--n-coef", type=int, default=spectral.STFT_DEFAULTS["n_coef"])
    sub.add_argument("--taper", default=spectral.STFT_DEFAULTS["taper"])
    sub.add_argument(
        "--floor-eps", type=float, default=spectral.STFT_DEFAULTS["floor_eps"]
    )
    sub.add_argument("--augment-mean", action="store_true")
    sub.add_argument("--normalize-variance", action="store_true")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="banddist",
        description="Band-distance time series toolkit",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("distances", help="pairwise distance matrix")
    _add_input_args(p)
    p.add_argument("--method", default="band", help="band | lp[:p] | pidist[:k[,p]]")
    p.add_argument("--cache-dir", help="binary distance cache directory")

    p = subs.add_parser("cluster", help="distance + k-medoids + report")
    _add_input_args(p)
    p.add_argument("--method", default="band")
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=0)
    p.add_argument(
        "--transform",
        choices=["none", "detrend", "stft", "detrend+stft", "pgram"],
        default="none",
    )
    p.add_argument("--h-t", type=float, default=seasonal.DEFAULT_H_T)
    p.add_argument("--h-c", type=float, default=seasonal.DEFAULT_H_C)
    p.add_argument("--spans", type=int, nargs="+", default=list(spectral.DEFAULT_DANIELL_SPANS))
    _add_spectral_args(p)
    p.add_argument("--cache-dir")

    p = subs.add_parser("simulate", help="band-vs-Euclidean comparison designs")
    p.add_argument("--design", choices=["a", "b", "c"], required=True)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--spans", type=int, nargs="+", default=list(spectral.DEFAULT_DANIELL_SPANS))
    p.add_argument("--out", default=".")

    p = subs.add_parser("detrend", help="remove the typical daily curve")
    _add_input_args(p)
    p.add_argument("--h-t", type=float, default=seasonal.DEFAULT_H_T)
    p.add_argument("--h-c", type=float, default=seasonal.DEFAULT_H_C)

    p = subs.add_parser("stft", help="short-time Fourier transform vectors")
    _add_input_args(p)
    _add_spectral_args(p)

    p = subs.add_parser("pgram", help="Daniell-smoothed periodograms")
    _add_input_args(p)
    p.add_argument("--spans", type=int, nargs="+", default=list(spectral.DEFAULT_DANIELL_SPANS))

    p = subs.add_parser("report", help="cluster report from saved artifacts")
    p.add_argument("--partition", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", default=".")

    p = subs.add_parser("rerun", help="reproduce artifacts from a manifest")
    p.add_argument("--manifest", required=True)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    params = {
        k: v
        for k, v in vars(args).items()
        if k not in ("command", "out") and v is not None
    }
    return RunConfig(command=args.command, params=params, out_dir=args.out)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "rerun":
        manifest = json.loads(Path(args.manifest).read_text("utf-8"))
        cfg = RunConfig(
            command=manifest["command"],
            params=manifest["parameters"],
            out_dir=manifest["out_dir"],
        )
        return run_pipeline(cfg)
    return run_pipeline(_config_from_args(args))


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
