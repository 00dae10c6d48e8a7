"""Simulation designs comparing the band distance against Euclidean distance.

Three designs are provided:

* Design A: two classes of heteroskedastic multivariate normal curves of
  length 15 (crossing linear means, a shared bumped variance profile,
  Toeplitz autocorrelation rho = 0.9), 10 observations per class, k = 2.
* Design B: nine classes from all combinations of three mean curves and
  three variance profiles, 10 observations each, k = 9.  The exact curves
  are declared defaults (configurable), chosen to preserve the qualitative
  ordering of results between designs A and B.
* Design C: 15 realizations from each of six stationary ARMA models
  (T = 144), clustered on their Daniell-smoothed periodograms, k = 6.

Each run clusters with k-medoids under both distances and records the Rand
index against the known classes.  :func:`compare_methods` aggregates the
per-run differences into a mean, standard deviation, and z-score.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .bands import band_distance_matrix
from .baselines import lp_distance_matrix
from .clustering import KMedoidsConfig, kmedoids, rand_index
from .core import LabeledDataset, TimeSeriesSet, ValidationError, validate_set
from .spectral import DEFAULT_DANIELL_SPANS, daniell_smooth, periodogram

__all__ = [
    "NotPositiveDefiniteError",
    "MvnClassSpec",
    "ArmaSpec",
    "RunResult",
    "ComparisonResult",
    "sample_mvn",
    "simulate_arma",
    "arma_spectral_density",
    "SIM_A_SPECS",
    "SIM_B_SPECS",
    "SIM_C_SPECS",
    "simulation_a_run",
    "simulation_b_run",
    "simulation_c_run",
    "compare_methods",
    "splitmix64",
    "run_seed",
]

ARMA_BURN_IN = 500


class NotPositiveDefiniteError(ValidationError):
    pass


@dataclass(frozen=True)
class MvnClassSpec:
    """One multivariate-normal class: mean curve, variance profile, and
    Toeplitz autocorrelation Sigma_ij = sigma_i * sigma_j * rho**|i-j|."""

    mean: tuple[float, ...]
    sigma2: tuple[float, ...]
    rho: float

    def __post_init__(self):
        if len(self.mean) != len(self.sigma2):
            raise ValidationError("mean and sigma2 must have equal length")
        if any(v <= 0 for v in self.sigma2):
            raise ValidationError("variances must be positive")
        if not -1 < self.rho < 1:
            raise ValidationError("rho must lie in (-1, 1)")
        object.__setattr__(self, "mean", tuple(float(v) for v in self.mean))
        object.__setattr__(self, "sigma2", tuple(float(v) for v in self.sigma2))

    def covariance(self) -> np.ndarray:
        sd = np.sqrt(np.asarray(self.sigma2))
        lags = np.abs(np.subtract.outer(np.arange(sd.size), np.arange(sd.size)))
        return sd[:, None] * sd[None, :] * self.rho**lags


@dataclass(frozen=True)
class ArmaSpec:
    """Stationary ARMA model: x_t = sum phi_i x_{t-i} + e_t + sum theta_j e_{t-j}."""

    ar: tuple[float, ...] = ()
    ma: tuple[float, ...] = ()
    noise_variance: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "ar", tuple(float(v) for v in self.ar))
        object.__setattr__(self, "ma", tuple(float(v) for v in self.ma))
        if self.noise_variance <= 0:
            raise ValidationError("noise variance must be positive")
        if self.ar:
            # Roots of 1 - phi_1 z - ... - phi_p z^p must lie outside the unit circle.
            coeffs = [-c for c in reversed(self.ar)] + [1.0]
            roots = np.roots(coeffs)
            if (np.abs(roots) <= 1.0).any():
                raise ValidationError(f"AR polynomial not stationary: {self.ar}")


def sample_mvn(spec: MvnClassSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """n draws from N(mean, Sigma) via the Cholesky factor of Sigma."""
    cov = spec.covariance()
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc
    z = rng.standard_normal((n, cov.shape[0]))
    return np.asarray(spec.mean) + z @ chol.T


def simulate_arma(
    spec: ArmaSpec,
    n_series: int,
    length: int,
    rng: np.random.Generator,
    burn_in: int = ARMA_BURN_IN,
) -> np.ndarray:
    """Simulate realizations by the recursive difference equation, with the
    first ``burn_in`` samples discarded; innovations are Gaussian."""
    scale = np.sqrt(spec.noise_variance)
    e = scale * rng.standard_normal((n_series, length + burn_in))
    b = np.concatenate([[1.0], spec.ma])
    a = np.concatenate([[1.0], -np.asarray(spec.ar)]) if spec.ar else np.array([1.0])
    x = lfilter(b, a, e, axis=1)
    return x[:, burn_in:]


def arma_spectral_density(spec: ArmaSpec, freqs) -> np.ndarray:
    """Closed-form rational spectrum at frequencies in cycles per step.

    f(w) = sigma^2/(2 pi) * |theta(e^{-iw})|^2 / |phi(e^{-iw})|^2, used as an
    independent oracle for the simulated periodograms.
    """
    w = 2 * np.pi * np.asarray(freqs, dtype=np.float64)
    z = np.exp(-1j * w)
    num = np.ones_like(z)
    for j, th in enumerate(spec.ma, start=1):
        num = num + th * z**j
    den = np.ones_like(z)
    for j, ph in enumerate(spec.ar, start=1):
        den = den - ph * z**j
    return spec.noise_variance / (2 * np.pi) * np.abs(num) ** 2 / np.abs(den) ** 2


# ---------------------------------------------------------------------------
# Design definitions

_SIM_A_MU1 = tuple(round(0.1 * i, 10) for i in range(1, 16))
_SIM_A_MU2 = tuple(reversed(_SIM_A_MU1))
_SIM_A_SIGMA2 = (1, 1, 1, 1, 3, 5, 7, 9, 3, 2, 1, 1, 1, 1, 1)
_SIM_RHO = 0.9

SIM_A_SPECS = (
    MvnClassSpec(mean=_SIM_A_MU1, sigma2=_SIM_A_SIGMA2, rho=_SIM_RHO),
    MvnClassSpec(mean=_SIM_A_MU2, sigma2=_SIM_A_SIGMA2, rho=_SIM_RHO),
)

# Declared default curves for design B (three means x three variance
# profiles); the originals are only available as plots.
_SIM_B_MEANS = (_SIM_A_MU1, _SIM_A_MU2, (0.8,) * 15)
_SIM_B_SIGMA2 = (_SIM_A_SIGMA2, tuple(reversed(_SIM_A_SIGMA2)), (9.0,) * 15)

SIM_B_SPECS = tuple(
    MvnClassSpec(mean=mu, sigma2=s2, rho=_SIM_RHO)
    for mu in _SIM_B_MEANS
    for s2 in _SIM_B_SIGMA2
)

SIM_C_SPECS = (
    ArmaSpec(ma=(0.5,)),
    ArmaSpec(ma=(0.9, 0.9)),
    ArmaSpec(ma=(0.8, 0.6, 0.2)),
    ArmaSpec(ar=(0.8,)),
    ArmaSpec(ar=(0.3, 0.3)),
    ArmaSpec(ar=(0.9, -0.8)),
)

SIM_C_LENGTH = 144
SIM_C_PER_CLASS = 15
SIM_AB_PER_CLASS = 10


@dataclass(frozen=True)
class RunResult:
    """Rand indices of both methods against truth for a single run."""

    rand_band: float
    rand_euclid: float

    @property
    def delta(self) -> float:
        return self.rand_band - self.rand_euclid


def _mvn_dataset(
    specs, per_class: int, rng: np.random.Generator
) -> LabeledDataset:
    blocks = [sample_mvn(spec, per_class, rng) for spec in specs]
    truth = np.repeat(np.arange(1, len(specs) + 1), per_class)
    return LabeledDataset(series=validate_set(np.vstack(blocks)), truth=truth)


def _cluster_and_score(data: LabeledDataset, k: int) -> RunResult:
    d_band = band_distance_matrix(data.series)
    d_eucl = lp_distance_matrix(data.series, p=2.0)
    cfg = KMedoidsConfig(k=k)
    part_band = kmedoids(d_band, cfg)
    part_eucl = kmedoids(d_eucl, cfg)
    return RunResult(
        rand_band=rand_index(data.truth, part_band.labels),
        rand_euclid=rand_index(data.truth, part_eucl.labels),
    )


def simulation_a_run(seed: int) -> RunResult:
    """One run of design A: 2 classes x 10 observations, k = 2."""
    rng = np.random.default_rng(seed)
    return _cluster_and_score(_mvn_dataset(SIM_A_SPECS, SIM_AB_PER_CLASS, rng), k=2)


def simulation_b_run(seed: int) -> RunResult:
    """One run of design B: 9 classes x 10 observations, k = 9."""
    rng = np.random.default_rng(seed)
    return _cluster_and_score(_mvn_dataset(SIM_B_SPECS, SIM_AB_PER_CLASS, rng), k=9)


def simulation_c_dataset(
    seed: int, spans=DEFAULT_DANIELL_SPANS
) -> LabeledDataset:
    """Smoothed periodograms of ARMA realizations, as a labelled dataset."""
    rng = np.random.default_rng(seed)
    rows = []
    for spec in SIM_C_SPECS:
        series = simulate_arma(spec, SIM_C_PER_CLASS, SIM_C_LENGTH, rng)
        for s in series:
            rows.append(daniell_smooth(periodogram(s), spans).ordinates)
    truth = np.repeat(np.arange(1, len(SIM_C_SPECS) + 1), SIM_C_PER_CLASS)
    return LabeledDataset(series=validate_set(np.vstack(rows)), truth=truth)


def simulation_c_run(seed: int, spans=DEFAULT_DANIELL_SPANS) -> RunResult:
    """One run of design C: 6 ARMA classes x 15 realizations, k = 6."""
    return _cluster_and_score(simulation_c_dataset(seed, spans), k=6)


@dataclass(frozen=True)
class ComparisonResult:
    """Aggregated band-vs-Euclidean comparison over M runs.

    ``z`` is mean(delta) / sqrt(var(delta) / M) with the sample variance;
    when all deltas are identical the variance is zero and ``zero_variance``
    is flagged instead of raising.
    """

    rand_band: np.ndarray
    rand_euclid: np.ndarray

    def __post_init__(self):
        for name in ("rand_band", "rand_euclid"):
            a = np.asarray(getattr(self, name), dtype=np.float64)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.rand_band.shape != self.rand_euclid.shape:
            raise ValidationError("per-run score arrays must match")
        if self.m < 2:
            raise ValidationError("need at least two runs")

    @property
    def m(self) -> int:
        return self.rand_band.size

    @property
    def delta(self) -> np.ndarray:
        return self.rand_band - self.rand_euclid

    @property
    def mean_delta(self) -> float:
        return float(np.mean(self.delta))

    @property
    def sd_delta(self) -> float:
        return float(np.std(self.delta, ddof=1))

    @property
    def zero_variance(self) -> bool:
        return self.sd_delta == 0.0

    @property
    def z(self) -> float | None:
        if self.zero_variance:
            return None
        return self.mean_delta / np.sqrt(self.sd_delta**2 / self.m)


def splitmix64(x: int) -> int:
    """One step of the splitmix64 mixing function (deterministic, 64-bit)."""
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


def run_seed(seed: int, run: int) -> int:
    """Per-run seed derived from the master seed and run index, so runs are
    independent of execution order."""
    return splitmix64((seed & 0xFFFFFFFFFFFFFFFF) ^ splitmix64(run))


def compare_methods(run_generator, m: int, seed: int = 0) -> ComparisonResult:
    """Run ``run_generator(run_seed)`` M times and aggregate the Rand-index
    differences (positive delta favors the band distance)."""
    if m < 2:
        raise ValidationError("M must be >= 2")
    band = np.empty(m)
    eucl = np.empty(m)
    for r in range(m):
        res = run_generator(run_seed(seed, r))
        band[r] = res.rand_band
        eucl[r] = res.rand_euclid
    return ComparisonResult(rand_band=band, rand_euclid=eucl)
