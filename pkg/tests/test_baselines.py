import numpy as np
import pytest

from banddist.baselines import (
    InvalidPError,
    KTooLargeError,
    build_equidepth_ranges,
    default_pidist_k,
    lp_distance_matrix,
    pidist_distance_matrix,
    pidist_similarity,
)
from banddist.core import validate_set


def test_lp_345_triangle():
    ts = validate_set([[0, 0], [3, 4], [0, 0]])
    d = lp_distance_matrix(ts, p=2.0).values
    assert d[0, 1] == pytest.approx(5.0)
    assert d[0, 2] == 0.0


def test_lp_p1_unit_gaps():
    ts = validate_set([[1, 1, 1], [2, 2, 2]])
    assert lp_distance_matrix(ts, p=1.0).values[0, 1] == pytest.approx(3.0)


def test_lp_invalid_p():
    with pytest.raises(InvalidPError):
        lp_distance_matrix(validate_set([[0.0], [1.0]]), p=0.5)


def test_lp_matches_double_loop():
    rng = np.random.default_rng(23)
    ts = validate_set(rng.standard_normal((8, 12)))
    d = lp_distance_matrix(ts, p=2.0).values
    for i in range(8):
        for j in range(8):
            direct = np.sqrt(sum((ts.values[i, t] - ts.values[j, t]) ** 2 for t in range(12)))
            assert d[i, j] == pytest.approx(direct, rel=1e-12)


def test_equidepth_basic_split():
    ts = validate_set([[0.0], [1.0], [2.0], [3.0]])
    r = build_equidepth_ranges(ts, k=2)
    assert r.lows[0].tolist() == [0.0, 2.0]
    assert r.highs[0].tolist() == [1.0, 3.0]
    assert np.array_equal(r.widths[0], [1.0, 1.0])


def test_equidepth_k1_spans_all():
    ts = validate_set([[5.0], [-2.0], [3.0]])
    r = build_equidepth_ranges(ts, k=1)
    assert r.lows[0, 0] == -2.0 and r.highs[0, 0] == 5.0


def test_equidepth_k_too_large():
    with pytest.raises(KTooLargeError):
        build_equidepth_ranges(validate_set([[0.0], [1.0]]), k=3)


def test_equidepth_degenerate_ties():
    ts = validate_set([[2.0], [2.0], [2.0], [2.0]])
    r = build_equidepth_ranges(ts, k=2)
    assert (r.widths == 0).all()
    # boundary values on a shared edge assign to the lower-indexed range
    assert r.assign(0, 2.0) == 0


def test_equidepth_group_counts_balanced():
    rng = np.random.default_rng(5)
    ts = validate_set(rng.standard_normal((11, 4)))
    r = build_equidepth_ranges(ts, k=3)
    for dim in range(4):
        counts = np.bincount(r.assignments[dim], minlength=3)
        assert counts.max() - counts.min() <= 1


def test_pidist_hand_example():
    # 1-dim values {0,1,2,3}, k=2: 0 and 1 share the width-1 range
    ts = validate_set([[0.0], [1.0], [2.0], [3.0]])
    r = build_equidepth_ranges(ts, k=2)
    assert pidist_similarity(r, ts, 0, 1, p=1.0) == 0.0
    d = pidist_distance_matrix(ts, k=2, p=1.0).values
    assert d[0, 1] == 1.0


def test_pidist_self_similarity_full():
    rng = np.random.default_rng(31)
    ts = validate_set(rng.standard_normal((6, 5)))
    r = build_equidepth_ranges(ts, k=3)
    for p in (1.0, 2.0, 3.0):
        assert pidist_similarity(r, ts, 2, 2, p) == pytest.approx(5.0 ** (1 / p))


def test_pidist_disjoint_ranges_zero():
    ts = validate_set([[0.0, 0.0], [0.1, 0.1], [10.0, 10.0], [10.1, 10.1]])
    r = build_equidepth_ranges(ts, k=2)
    assert pidist_similarity(r, ts, 0, 2, p=2.0) == 0.0
    assert pidist_distance_matrix(ts, k=2).values[0, 2] == 1.0


def test_pidist_matrix_properties():
    rng = np.random.default_rng(37)
    ts = validate_set(rng.standard_normal((9, 6)))
    r = build_equidepth_ranges(ts, k=3)
    for i in range(9):
        for j in range(9):
            assert pidist_similarity(r, ts, i, j) == pidist_similarity(r, ts, j, i)
    d = pidist_distance_matrix(ts, k=3).values
    assert not np.diag(d).any()
    assert ((d >= 0) & (d <= 1)).all()


def test_pidist_rescale_flag():
    ts = validate_set([[0.0], [1.0], [2.0], [3.0]])
    d = pidist_distance_matrix(ts, k=2, p=1.0, rescale=False).values
    assert d[0, 1] == 1.0  # T**(1/p) - 0 with T = 1


def test_default_k_clamped():
    assert default_pidist_k(4) == 2
    assert default_pidist_k(95) == 10
    assert default_pidist_k(2) == 2
