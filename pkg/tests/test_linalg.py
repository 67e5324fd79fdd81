import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from attnsep.linalg import (
    hoeffding_tail,
    kron,
    normalize_exp,
    normalize_lin,
    rademacher_matrix,
    relu,
    relu_shift,
    stream_rng,
    vec,
)

finite_vectors = arrays(
    np.float64,
    st.integers(1, 12),
    elements=st.floats(-50, 50, allow_nan=False),
)


@given(finite_vectors)
def test_normalize_exp_is_a_distribution(v):
    f = normalize_exp(v)
    assert np.all(f >= 0)
    assert f.sum() == pytest.approx(1.0, abs=1e-12)


@given(finite_vectors, st.floats(-100, 100, allow_nan=False))
def test_normalize_exp_shift_invariance(v, shift):
    np.testing.assert_allclose(normalize_exp(v + shift), normalize_exp(v), atol=1e-9)


def test_normalize_exp_handles_huge_scores():
    f = normalize_exp(np.array([700.0, 1400.0, 2100.0]))
    assert np.isfinite(f).all() and f[2] == pytest.approx(1.0)


@given(finite_vectors)
def test_normalize_lin_unit_sum(v):
    s = v.sum()
    if abs(s) < 1e-6:
        v = v + 1.0  # move away from the singular set
    f = normalize_lin(v)
    assert f.sum() == pytest.approx(1.0, abs=1e-9)


def test_normalize_lin_rejects_zero_sum():
    with pytest.raises(ValueError, match="coordinate sum"):
        normalize_lin(np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        normalize_lin(np.zeros(4))


def test_hoeffding_tail_values():
    assert hoeffding_tail(np.array([0.1, 0.1]), 0.25) == pytest.approx(
        0.0038609082724554186, rel=1e-12
    )
    assert hoeffding_tail(np.array([0.5]), 0.0) == 1.0  # clamp at the trivial bound
    assert hoeffding_tail(np.zeros(3), 0.5) == 0.0
    assert hoeffding_tail(np.zeros(3), 0.0) == 1.0
    with pytest.raises(ValueError):
        hoeffding_tail(np.array([0.1]), -1.0)


@given(
    arrays(np.float64, st.integers(1, 8), elements=st.floats(0, 10, allow_nan=False)),
    st.floats(0, 5, allow_nan=False),
    st.floats(0, 5, allow_nan=False),
)
def test_hoeffding_tail_monotone_in_t(widths, t1, t2):
    lo, hi = sorted((t1, t2))
    assert hoeffding_tail(widths, hi) <= hoeffding_tail(widths, lo) + 1e-15
    assert 0.0 <= hoeffding_tail(widths, t1) <= 1.0


def test_relu_and_shift():
    z = np.array([-2.0, 0.0, 3.0])
    np.testing.assert_array_equal(relu(z), [0.0, 0.0, 3.0])
    np.testing.assert_array_equal(relu_shift(z, 1.0), [0.0, 0.0, 2.0])
    assert relu_shift(0.5, 0.5) == 0.0  # exact zero at the threshold


@given(st.integers(2, 5), st.integers(2, 5), st.integers(2, 4), st.integers(2, 4))
@settings(max_examples=25)
def test_kron_entry_law(n1, d1, n2, d2):
    rng = stream_rng(7, n1, d1, n2, d2)
    a = rng.integers(-3, 4, size=(n1, d1)).astype(float)
    b = rng.integers(-3, 4, size=(n2, d2)).astype(float)
    k = kron(a, b)
    assert k.shape == (n1 * n2, d1 * d2)
    for i1 in range(n1):
        for i2 in range(n2):
            for j1 in range(d1):
                for j2 in range(d2):
                    assert k[i1 * n2 + i2, j1 * d2 + j2] == a[i1, j1] * b[i2, j2]


def test_vec_is_row_major():
    m = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(vec(m), [1.0, 2.0, 3.0, 4.0])


def test_rademacher_matrix_is_signs():
    y = rademacher_matrix(50, 20, stream_rng(3))
    assert set(np.unique(y)) == {-1.0, 1.0}
    assert y.shape == (50, 20)
    # unbiased enough to rule out a constant generator
    assert abs(y.mean()) < 0.2


def test_stream_rng_streams_are_stable_and_distinct():
    a1 = stream_rng(11, 2, 5).standard_normal(4)
    a2 = stream_rng(11, 2, 5).standard_normal(4)
    b = stream_rng(11, 2, 6).standard_normal(4)
    c = stream_rng(12, 2, 5).standard_normal(4)
    np.testing.assert_array_equal(a1, a2)
    assert not np.array_equal(a1, b)
    assert not np.array_equal(a1, c)
