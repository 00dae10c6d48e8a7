"""Acceptance gate: one test per release criterion, each printing a single
PASS/FAIL line.  Tolerances and instance counts are pinned; do not loosen
them to make a failing criterion pass.

Criterion 7's adjusted-Rand hand value of -1/3 is asserted as written even
though the Hubert-Arabie formula gives exactly -1/2 for that pair of
partitions (cross-checked by hand and against scikit-learn); the test is a
strict ``xfail`` so the defect stays visible without breaking the build.
"""

import itertools
import time

import numpy as np
import pytest

from banddist.bands import band_distance_matrix, naive_band_distance_matrix
from banddist.clustering import (
    KMedoidsConfig,
    adjusted_rand_index,
    kmedoids,
    kmedoids_cost,
    rand_index,
)
from banddist.core import DistanceMatrix, validate_set, write_matrix_csv
from banddist.seasonal import fit_seasonal, remove_seasonal
from banddist.simulation import (
    compare_methods,
    run_seed,
    simulation_a_run,
    simulation_b_run,
    simulation_c_run,
)
from banddist.spectral import parseval_variance, periodogram, stft
from banddist.cli import main as cli_main

MASTER_SEED = 3  # shared by criteria 4-6 so designs A/B/C use matched seeds


def report(criterion: int, name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"acceptance {criterion} [{name}]: {status}{suffix}")


def random_set(rng, n_range=(3, 10), t_range=(1, 12)):
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    t = int(rng.integers(t_range[0], t_range[1] + 1))
    return validate_set(rng.standard_normal((n, t)))


def test_criterion_1_metric_axioms():
    rng = np.random.default_rng(10)
    start = time.time()
    ok = True
    for _ in range(200):
        d = band_distance_matrix(random_set(rng)).values
        n = d.shape[0]
        off = d[~np.eye(n, dtype=bool)]
        ok &= np.array_equal(d, d.T)                         # symmetry
        ok &= bool(np.all(np.diag(d) == 0.0))                # d(x, x) = 0
        ok &= bool(np.all(off > 0.0))                        # distinct rows
        slack = d[:, :, None] + d[None, :, :] - d[:, None, :]
        ok &= bool(np.min(slack) >= -1e-12)                  # triangle
    elapsed = time.time() - start
    ok &= elapsed < 30.0
    report(1, "metric axioms", ok, f"200 instances in {elapsed:.1f}s")
    assert ok


def test_criterion_2_oracle_equivalence():
    rng = np.random.default_rng(20)
    start = time.time()
    ok = True
    for _ in range(50):
        ts = random_set(rng, n_range=(3, 12), t_range=(1, 20))
        fast = band_distance_matrix(ts).values
        naive = naive_band_distance_matrix(ts).values
        ok &= np.array_equal(fast, naive)
    elapsed = time.time() - start
    ok &= elapsed < 60.0
    report(2, "oracle equivalence", ok, f"50 instances, 0 tolerance, {elapsed:.1f}s")
    assert ok


def test_criterion_3_order_preservation():
    rng = np.random.default_rng(30)
    transforms = (
        lambda c, a, b: a * c + b,          # increasing affine
        lambda c, a, b: np.exp(a * c),      # exponential
        lambda c, a, b: c**3 + a * c + b,   # strictly increasing cubic (a > 0)
    )
    ok = True
    for _ in range(50):
        ts = random_set(rng)
        base = band_distance_matrix(ts).values
        cols = ts.values.copy()
        for j in range(cols.shape[1]):
            f = transforms[int(rng.integers(len(transforms)))]
            cols[:, j] = f(cols[:, j], float(rng.uniform(0.5, 3.0)), float(rng.normal()))
        mapped = band_distance_matrix(validate_set(cols)).values
        ok &= np.array_equal(base, mapped)
    report(3, "order-preservation invariance", ok, "50 instances, exact")
    assert ok


def test_criterion_4_simulation_a():
    start = time.time()
    res = compare_methods(simulation_a_run, m=200, seed=MASTER_SEED)
    elapsed = time.time() - start
    ok = res.mean_delta > 0 and res.z is not None and res.z > 3 and elapsed < 300
    report(
        4,
        "simulation A",
        ok,
        f"M=200 mean={res.mean_delta:.4f} Z={res.z:.2f} in {elapsed:.0f}s",
    )
    assert ok


def test_criterion_5_simulation_b():
    res_a = compare_methods(simulation_a_run, m=200, seed=MASTER_SEED)
    res_b = compare_methods(simulation_b_run, m=200, seed=MASTER_SEED)
    ok = res_b.z is not None and res_b.z > 5 and res_b.z > res_a.z
    report(
        5,
        "simulation B",
        ok,
        f"M=200 Z_B={res_b.z:.2f} > 5 and > Z_A={res_a.z:.2f} (matched seeds)",
    )
    assert ok


def test_criterion_6_simulation_c():
    start = time.time()
    ok = True
    details = []
    single_seed = run_seed(MASTER_SEED, 5)
    for spans in ((5, 5), (9, 9)):
        single = simulation_c_run(single_seed, spans=spans)
        ok &= single.rand_band >= 0.95 and single.rand_euclid <= 0.92
        res = compare_methods(
            lambda s: simulation_c_run(s, spans=spans), m=100, seed=MASTER_SEED
        )
        ok &= res.mean_delta >= 0.05 and res.z is not None and res.z > 10
        details.append(
            f"spans={spans}: single band={single.rand_band:.3f}"
            f" eucl={single.rand_euclid:.3f}, M=100 diff={res.mean_delta:.3f}"
            f" Z={res.z:.1f}"
        )
    elapsed = time.time() - start
    ok &= elapsed < 600
    report(6, "simulation C", ok, "; ".join(details) + f"; {elapsed:.0f}s")
    assert ok


def test_criterion_7_rand_index():
    a, b = [1, 1, 2, 2], [1, 2, 1, 2]
    ok = (
        rand_index(a, b) == 1 / 3
        and rand_index(a, a) == 1.0
        and adjusted_rand_index(a, a) == 1.0
        and adjusted_rand_index([1, 2, 1, 2], [2, 1, 2, 1]) == 1.0
    )
    report(7, "Rand/ARI hand cases", ok, "Rand(a,b)=1/3 exact, identical -> 1")
    assert ok


@pytest.mark.xfail(
    strict=True,
    reason="stated hand value -1/3 contradicts the Hubert-Arabie formula, "
    "which gives exactly -1/2 for these partitions",
)
def test_criterion_7_ari_stated_hand_value():
    value = adjusted_rand_index([1, 1, 2, 2], [1, 2, 1, 2])
    report(7, "ARI stated hand value", value == -1 / 3, f"ARI={value}")
    assert value == -1 / 3


def test_criterion_8_spectral():
    t = np.arange(144)
    tone = np.cos(2 * np.pi * 36 * t / 144)
    pg = periodogram(tone)
    peak = pg.ordinates[35]
    off = np.delete(pg.ordinates, 35)
    ok = bool(np.all(off < 1e-9 * peak))
    rng = np.random.default_rng(80)
    for n in (64, 144, 145):
        x = rng.standard_normal(n)
        var = np.var(x)
        ok &= abs(parseval_variance(periodogram(x)) - var) / var < 1e-9
    img = stft(rng.standard_normal(144), win=40, inc=8, n_coef=12)
    ok &= img.magnitudes.shape[0] == 14
    report(8, "spectral checks", ok, "concentration, Parseval 1e-9, 14 windows")
    assert ok


def test_criterion_9_detrending_and_determinism(tmp_path):
    # Substitute for the unreproducible external-dataset figures: seasonal
    # removal must be exactly invertible and the CLI byte-deterministic.
    rng = np.random.default_rng(90)
    import datetime

    days = [
        (datetime.date(2004, 1, 1) + datetime.timedelta(days=i)).isoformat()
        for i in range(60)
    ]
    values = np.sin(2 * np.pi * np.arange(24) / 24) + 0.1 * rng.normal(size=(60, 24))
    ts = validate_set(values, labels=days)
    surface = fit_seasonal(ts)
    resid = remove_seasonal(ts, surface)
    # Self-consistency: a constant shift of the data moves the fitted surface
    # by the same constant and leaves the residuals unchanged.
    shifted = validate_set(values + 5.0, labels=days)
    surface_shifted = fit_seasonal(shifted)
    ok = np.allclose(surface_shifted.grid, surface.grid + 5.0, rtol=0, atol=1e-9)
    ok &= np.allclose(
        remove_seasonal(shifted, surface_shifted).values,
        resid.values,
        rtol=0,
        atol=1e-9,
    )

    path = tmp_path / "in.csv"
    write_matrix_csv(path, values, labels=days)
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    args = ["cluster", "--input", str(path), "--k", "3", "--transform", "detrend"]
    ok &= cli_main(args + ["--out", str(out1)]) == 0
    ok &= cli_main(args + ["--out", str(out2)]) == 0
    for name in ("distances.csv", "partition.csv", "clusters.csv", "residuals.csv"):
        if (out1 / name).exists() or (out2 / name).exists():
            ok &= (out1 / name).read_bytes() == (out2 / name).read_bytes()
    report(9, "detrending + determinism", ok, "substitute for external-data figures")
    assert ok


def test_criterion_10_kmedoids_exhaustive():
    rng = np.random.default_rng(100)
    ok = True
    for _ in range(30):
        pts = rng.standard_normal((4, 3))
        d = np.sqrt(np.sum((pts[:, None] - pts[None, :]) ** 2, axis=2))
        np.fill_diagonal(d, 0.0)
        d = (d + d.T) / 2
        dist = DistanceMatrix(d, method="lp")
        # Single-swap local search can stall on adversarial 4-point inputs,
        # so the optimum is required of the restarted configuration.
        part = kmedoids(dist, KMedoidsConfig(k=2, restarts=12, seed=0))
        got = kmedoids_cost(d, np.array(part.medoids))
        best = min(
            kmedoids_cost(d, np.array(m)) for m in itertools.combinations(range(4), 2)
        )
        ok &= abs(got - best) <= 1e-12
    report(10, "k-medoids exhaustive optimum", ok, "30 random 4-point instances, k=2")
    assert ok
