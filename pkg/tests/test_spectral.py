import numpy as np
import pytest

from banddist.spectral import (
    InvalidSpanError,
    TooManyCoefficientsError,
    TooShortError,
    WindowTooLongError,
    compose_kernels,
    daniell_kernel,
    daniell_smooth,
    parseval_variance,
    periodogram,
    stft,
    stft_plot_triples,
    vectorize_stft,
)


def test_constant_series_zero_ordinates():
    pg = periodogram(np.full(50, 3.7))
    assert not pg.ordinates.any()


def test_too_short():
    with pytest.raises(TooShortError):
        periodogram([1.0])


def test_pure_cosine_concentration():
    t = np.arange(144)
    pg = periodogram(np.cos(2 * np.pi * 3 * t / 144))
    peak = pg.ordinates[2]  # bin j = 3 is index 2 (j starts at 1)
    others = np.delete(pg.ordinates, 2)
    assert peak == pytest.approx(144 / 4, rel=1e-12)
    assert others.max() < 1e-9 * peak


def test_parseval_reconstructs_variance():
    rng = np.random.default_rng(14)
    for t in (8, 9, 144, 145):
        x = rng.standard_normal(t)
        pg = periodogram(x)
        assert parseval_variance(pg) == pytest.approx(x.var(), rel=1e-9)


def test_white_noise_mean_level():
    rng = np.random.default_rng(15)
    means = [periodogram(rng.standard_normal(128)).ordinates.mean() for _ in range(500)]
    assert np.mean(means) == pytest.approx(1.0, rel=0.1)


def test_daniell_kernel_weights():
    assert daniell_kernel(3).tolist() == [0.25, 0.5, 0.25]
    with pytest.raises(InvalidSpanError):
        daniell_kernel(4)
    with pytest.raises(InvalidSpanError):
        daniell_kernel(1)


def test_daniell_hand_convolution():
    pg = periodogram(np.zeros(10) + 1.0)  # shape carrier; replace ordinates
    pg = type(pg)(ordinates=np.array([0.0, 0.0, 4.0, 0.0, 0.0]), series_length=10)
    sm = daniell_smooth(pg, spans=(3,))
    assert sm.ordinates.tolist() == [0.0, 1.0, 2.0, 1.0, 0.0]


def test_daniell_constant_unchanged():
    pg = periodogram(np.random.default_rng(0).standard_normal(20))
    const = type(pg)(ordinates=np.full(10, 2.5), series_length=20)
    sm = daniell_smooth(const, spans=(3, 5))
    assert np.allclose(sm.ordinates, 2.5, rtol=0, atol=1e-12)


def test_daniell_stacked_equals_composed():
    rng = np.random.default_rng(16)
    pg = periodogram(rng.standard_normal(64))
    twice = daniell_smooth(pg, spans=(3, 3))
    kernel = compose_kernels((3, 3))
    m = (kernel.size - 1) // 2
    padded = np.pad(pg.ordinates, m, mode="symmetric")
    once = np.convolve(padded, kernel, mode="valid")
    assert np.allclose(twice.ordinates, once, rtol=0, atol=1e-12)


def test_daniell_preserves_mass_and_nonnegativity():
    rng = np.random.default_rng(18)
    pg = periodogram(rng.standard_normal(100))
    sm = daniell_smooth(pg, spans=(9, 9))
    assert (sm.ordinates >= 0).all()
    assert sm.ordinates.sum() == pytest.approx(pg.ordinates.sum(), rel=1e-9)


def test_stft_window_count():
    img = stft(np.zeros(144), win=40, inc=8, n_coef=12)
    assert img.n_windows == 14
    assert img.n_coef == 12


def test_stft_zero_series_floor():
    img = stft(np.zeros(144), floor_eps=1e-12)
    assert np.allclose(img.magnitudes, np.log(1e-12))


def test_stft_errors():
    with pytest.raises(WindowTooLongError):
        stft(np.zeros(30), win=40)
    with pytest.raises(TooManyCoefficientsError):
        stft(np.zeros(144), win=40, n_coef=21)


def test_stft_stationary_tone_constant_row():
    t = np.arange(144)
    x = np.cos(2 * np.pi * (4 / 40) * t)  # bin 4 of a 40-sample window
    img = stft(x, win=40, inc=8, n_coef=12)
    row = np.exp(img.magnitudes[:, 3])  # bin 4 -> column index 3
    spread = (row.max() - row.min()) / row.mean()
    assert spread < 0.05


def test_stft_time_reversal_symmetry():
    rng = np.random.default_rng(20)
    x = rng.standard_normal(144)
    fwd = stft(x, win=40, inc=8, n_coef=12)
    rev = stft(x[::-1], win=40, inc=8, n_coef=12)
    assert np.allclose(rev.magnitudes, fwd.magnitudes[::-1], rtol=0, atol=1e-9)


def test_vectorize_flattening_order():
    img = stft(np.arange(24, dtype=float), win=8, inc=8, n_coef=2)
    flat = vectorize_stft(img)
    assert flat.shape == (6,)
    assert np.array_equal(flat, img.magnitudes.ravel())


def test_vectorize_augment_mean_zero():
    x = np.sin(2 * np.pi * np.arange(64) / 8)  # zero mean over full periods
    img = stft(x, win=16, inc=8, n_coef=4)
    vec = vectorize_stft(img, augment_mean=True)
    assert vec[-1] == pytest.approx(0.0, abs=1e-12)


def test_normalize_variance_scale_invariance():
    rng = np.random.default_rng(22)
    x = rng.standard_normal(144)
    img1 = stft(x, normalize_variance=True)
    img2 = stft(3.5 * x, normalize_variance=True)
    assert np.allclose(img1.magnitudes, img2.magnitudes, rtol=0, atol=1e-9)
    v1 = vectorize_stft(img1, normalize_variance=True)
    v2 = vectorize_stft(img2, normalize_variance=True)
    assert np.allclose(v1[:-1], v2[:-1], rtol=0, atol=1e-9)
    assert v2[-1] == pytest.approx(3.5**2 * v1[-1], rel=1e-9)


def test_plot_triples_shape_and_indices():
    img = stft(np.zeros(144))
    triples = stft_plot_triples(img)
    assert triples.shape == (14 * 12, 3)
    assert triples[0][:2].tolist() == [1, 1]
    assert triples[-1][:2].tolist() == [14, 12]
