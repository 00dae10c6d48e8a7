"""Frequency-domain representations: periodograms, modified-Daniell smoothing,
and the short-time Fourier transform with log-magnitude vectorization.

Defaults reproduce a 14-window, 12-coefficient STFT image for daily series of
144 ten-minute readings (win=40, inc=8, n_coef=12).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ValidationError

__all__ = [
    "TooShortError",
    "InvalidSpanError",
    "WindowTooLongError",
    "TooManyCoefficientsError",
    "Periodogram",
    "STFTImage",
    "periodogram",
    "parseval_variance",
    "daniell_kernel",
    "compose_kernels",
    "daniell_smooth",
    "stft",
    "vectorize_stft",
    "stft_plot_triples",
]

STFT_DEFAULTS = dict(win=40, inc=8, n_coef=12, taper="hann", floor_eps=1e-12)
DEFAULT_DANIELL_SPANS = (9, 9)


class TooShortError(ValidationError):
    pass


class InvalidSpanError(ValidationError):
    pass


class WindowTooLongError(ValidationError):
    pass


class TooManyCoefficientsError(ValidationError):
    pass


@dataclass(frozen=True, eq=False)
class Periodogram:
    """Ordinates I(w_j) at the Fourier frequencies j/T, j = 1..floor(T/2).

    The series mean is removed, so the zero frequency is dropped.  With the
    |DFT|^2 / T normalization, the weighted ordinate sum (weight 2 per bin,
    1 at the Nyquist bin when T is even) equals T times the population
    variance of the series; see :func:`parseval_variance`.
    """

    ordinates: np.ndarray
    series_length: int

    def __post_init__(self):
        o = np.asarray(self.ordinates, dtype=np.float64)
        if o.ndim != 1 or o.shape[0] != self.series_length // 2:
            raise ValidationError("expected floor(T/2) ordinates")
        o.setflags(write=False)
        object.__setattr__(self, "ordinates", o)

    @property
    def frequencies(self) -> np.ndarray:
        t = self.series_length
        return np.arange(1, t // 2 + 1) / t


def periodogram(series) -> Periodogram:
    """I(w_j) = |DFT of the mean-removed series at frequency j/T|^2 / T."""
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise TooShortError("need a 1-D series of length >= 2")
    t = x.size
    xc = x - x.mean()
    dft = np.fft.rfft(xc)
    ords = np.abs(dft[1 : t // 2 + 1]) ** 2 / t
    return Periodogram(ordinates=ords, series_length=t)


def parseval_variance(pg: Periodogram) -> float:
    """Reconstruct the series' population variance from the ordinates."""
    t = pg.series_length
    w = np.full(pg.ordinates.size, 2.0)
    if t % 2 == 0:
        w[-1] = 1.0  # Nyquist bin appears once in the full spectrum
    return float(np.sum(w * pg.ordinates) / t)


def daniell_kernel(span: int) -> np.ndarray:
    """Modified Daniell kernel of the given odd span, half-weight endpoints."""
    if span < 3 or span % 2 == 0:
        raise InvalidSpanError(f"span must be odd and >= 3, got {span}")
    m = (span - 1) // 2
    w = np.full(span, 1.0 / (2 * m))
    w[0] = w[-1] = 1.0 / (4 * m)
    return w


def compose_kernels(spans) -> np.ndarray:
    """Single kernel equivalent to smoothing once per span in sequence."""
    out = np.array([1.0])
    for span in spans:
        out = np.convolve(out, daniell_kernel(span))
    return out


def _kernel_smooth(values: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    # Half-sample mirror padding: equivalent to circular convolution of the
    # even 2T-periodic extension, so it preserves total mass and composes
    # across stacked spans.
    m = (kernel.size - 1) // 2
    padded = np.pad(values, m, mode="symmetric")
    return np.convolve(padded, kernel, mode="valid")


def daniell_smooth(pg: Periodogram, spans) -> Periodogram:
    """Smooth a periodogram with modified Daniell kernels, one per span."""
    out = pg.ordinates
    for span in spans:
        out = _kernel_smooth(out, daniell_kernel(span))
    return Periodogram(ordinates=out, series_length=pg.series_length)


def _taper_window(name: str, win: int) -> np.ndarray:
    if name == "hann":
        return np.hanning(win)
    if name == "none":
        return np.ones(win)
    raise ValidationError(f"unknown taper {name!r}")


@dataclass(frozen=True, eq=False)
class STFTImage:
    """Log-magnitude STFT: W windows x F frequency bins.

    ``magnitudes[w, f]`` is log(max(|DFT bin f+1 of window w|, floor_eps)).
    The source series' mean and population variance are carried along for
    optional augmentation during vectorization.
    """

    magnitudes: np.ndarray  # (windows, n_coef)
    win: int
    inc: int
    taper: str
    floor_eps: float
    series_mean: float
    series_variance: float

    def __post_init__(self):
        m = np.asarray(self.magnitudes, dtype=np.float64)
        if not np.isfinite(m).all():
            raise ValidationError("STFT magnitudes must be finite")
        m.setflags(write=False)
        object.__setattr__(self, "magnitudes", m)

    @property
    def n_windows(self) -> int:
        return self.magnitudes.shape[0]

    @property
    def n_coef(self) -> int:
        return self.magnitudes.shape[1]


def stft(
    series,
    win: int = STFT_DEFAULTS["win"],
    inc: int = STFT_DEFAULTS["inc"],
    n_coef: int = STFT_DEFAULTS["n_coef"],
    taper: str = STFT_DEFAULTS["taper"],
    floor_eps: float = STFT_DEFAULTS["floor_eps"],
    normalize_variance: bool = False,
) -> STFTImage:
    """Short-time Fourier transform with log-scale magnitudes.

    Windows start at t = 1, 1+inc, ...; each is tapered, transformed, and
    the magnitudes of frequency bins 1..n_coef kept.  Magnitudes are floored
    at ``floor_eps`` before the log so exact zeros map to a constant.  With
    ``normalize_variance`` the series is first scaled to unit population
    variance (its original variance is recorded on the image).
    """
    x = np.asarray(series, dtype=np.float64)
    t = x.size
    if win > t:
        raise WindowTooLongError(f"win={win} exceeds series length {t}")
    if inc < 1:
        raise ValidationError("inc must be >= 1")
    if n_coef > win // 2:
        raise TooManyCoefficientsError(f"n_coef={n_coef} exceeds win/2={win // 2}")
    mean = float(x.mean())
    variance = float(x.var())
    if normalize_variance and variance > 0:
        x = x / np.sqrt(variance)
    w = _taper_window(taper, win)
    n_windows = (t - win) // inc + 1
    starts = np.arange(n_windows) * inc
    segments = x[starts[:, None] + np.arange(win)] * w
    mags = np.abs(np.fft.rfft(segments, axis=1)[:, 1 : n_coef + 1])
    img = np.log(np.maximum(mags, floor_eps))
    return STFTImage(
        magnitudes=img,
        win=win,
        inc=inc,
        taper=taper,
        floor_eps=floor_eps,
        series_mean=mean,
        series_variance=variance,
    )


def vectorize_stft(
    img: STFTImage, augment_mean: bool = False, normalize_variance: bool = False
) -> np.ndarray:
    """Row-major flattening of the image, ready for distance computation.

    With ``normalize_variance`` the source series' variance is appended (the
    image itself is scale-free when computed from the normalized series);
    with ``augment_mean`` the series mean is appended after it.
    """
    parts = [img.magnitudes.ravel()]
    if normalize_variance:
        parts.append(np.array([img.series_variance]))
    if augment_mean:
        parts.append(np.array([img.series_mean]))
    return np.concatenate(parts)


def stft_plot_triples(img: STFTImage) -> np.ndarray:
    """(window, bin, value) triples (1-based indices) for external heatmaps."""
    ws, fs = np.meshgrid(
        np.arange(1, img.n_windows + 1), np.arange(1, img.n_coef + 1), indexing="ij"
    )
    return np.column_stack([ws.ravel(), fs.ravel(), img.magnitudes.ravel()])
