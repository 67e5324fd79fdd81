"""Structure of the planted head matrices."""

import math

import numpy as np
import pytest

from attnsep.datasets import (
    CrossAttnConfig,
    SelfAttnConfig,
    build_cross_pair,
    build_self_matrix,
    lemma_regime_violations,
    sample_cross,
    sample_self,
)
from attnsep.linalg import stream_rng
from attnsep.toy import D0, D1

SELF_44 = SelfAttnConfig(n=4, d=4, t=2, a0=0.01, a1=1.2, b=0.2, c=0.8)


def test_self_matrix_small_example():
    a = build_self_matrix(SELF_44, scale_a=1.2, j3=0)
    root_l = math.sqrt(math.log(4))  # 1.1774100225154747
    np.testing.assert_allclose(
        a,
        np.array(
            [
                [1.4128920270185696, 0.23548200450309495, 0.0, 0.9419280180123798],
                [0.0, 0.0, 0.23548200450309495, 0.9419280180123798],
                [0.0, 0.23548200450309495, 0.0, 0.9419280180123798],
                [0.0, 0.0, 0.23548200450309495, 0.9419280180123798],
            ]
        ),
        atol=1e-15,
    )
    assert a[0, 0] == pytest.approx(1.2 * root_l)


def test_self_matrix_row_sums_and_sparsity():
    cfg = SelfAttnConfig(n=12, d=6, t=3, a0=0.05, a1=2.0, b=0.2, c=0.8)
    for j3 in range(cfg.n):
        a = build_self_matrix(cfg, cfg.a1, j3)
        root_l = math.sqrt(math.log(cfg.n))
        sums = a.sum(axis=1)
        expected = np.full(cfg.n, (cfg.b + cfg.c) * root_l)
        expected[j3] += cfg.a1 * root_l
        np.testing.assert_allclose(sums, expected, rtol=1e-12)
        nonzeros = (a != 0).sum(axis=1)
        assert set(nonzeros) <= {2, 3}
        assert nonzeros[j3] == 3
        # middle block: each of the d-2 columns is hit by exactly t rows
        hits = (a[:, 1:-1] != 0).sum(axis=0)
        np.testing.assert_array_equal(hits, np.full(cfg.d - 2, cfg.t))


def test_self_config_structural_validation():
    with pytest.raises(ValueError, match=r"\(d-2\)\*t"):
        SelfAttnConfig(n=10, d=5, t=3, a0=0.01, a1=1.2, b=0.2, c=0.8)
    with pytest.raises(ValueError, match="d >= 3"):
        SelfAttnConfig(n=2, d=2, t=1, a0=0.01, a1=1.2, b=0.2, c=0.8)
    with pytest.raises(ValueError, match="positive"):
        SelfAttnConfig(n=4, d=4, t=2, a0=0.01, a1=-1.0, b=0.2, c=0.8)
    with pytest.raises(ValueError, match="regime"):
        SelfAttnConfig(n=4, d=4, t=2, a0=0.01, a1=1.2, b=0.2, c=0.8, regime="diag")
    with pytest.raises(ValueError, match="j3"):
        build_self_matrix(SELF_44, 1.2, j3=4)


def test_lemma_regime_violations_are_soft():
    # building is allowed off-regime; the report lists what is off
    cfg = SelfAttnConfig(n=4, d=4, t=2, a0=0.5, a1=0.1, b=0.3, c=0.8)
    msgs = " ".join(lemma_regime_violations(cfg))
    assert "a0" in msgs and "a1" in msgs and "b+c" in msgs
    assert lemma_regime_violations(SELF_44) == []
    ident = SelfAttnConfig(
        n=4, d=4, t=2, a0=0.01, a1=1.2, b=0.2, c=math.sqrt(0.96), regime="identity"
    )
    assert lemma_regime_violations(ident) == []


def test_sample_self_uses_the_right_scale():
    rng = stream_rng(1)
    inst1 = sample_self(SELF_44, D1, rng)
    inst0 = sample_self(SELF_44, D0, rng)
    root_l = math.sqrt(math.log(4))
    assert inst1.A1[inst1.j3, 0] == pytest.approx(1.2 * root_l)
    assert inst0.A1[inst0.j3, 0] == pytest.approx(0.01 * root_l)
    assert inst1.A1 is inst1.A2 is inst1.A3
    with pytest.raises(ValueError):
        sample_self(SELF_44, "D7", rng)


CROSS_63 = CrossAttnConfig(n=6, d=3, t=3, a0=0.01, a1=3.0)


def test_cross_pair_structure():
    a1, a2 = build_cross_pair(CROSS_63, scale_a=3.0, j2=1, j3=4)
    ln_n = math.log(6)
    # A1: zero spike column except at j2; flat ln(n) elsewhere
    np.testing.assert_allclose(a1[:, 1:], np.full((6, 2), ln_n))
    assert a1[1, 0] == pytest.approx(3.0 * ln_n)
    assert np.count_nonzero(a1[:, 0]) == 1
    # A2: unit rows; the planted key row also carries the first-column 1
    sums = a2.sum(axis=1)
    expected = np.ones(6)
    expected[4] = 2.0
    np.testing.assert_array_equal(sums, expected)
    assert set(np.unique(a2)) == {0.0, 1.0}
    hits = (a2[:, 1:] != 0).sum(axis=0)
    np.testing.assert_array_equal(hits, [3, 3])


def test_cross_score_peak_is_unique():
    a1, a2 = build_cross_pair(CROSS_63, scale_a=3.0, j2=2, j3=5)
    s = a1 @ np.eye(3) @ a2.T
    ln_n = math.log(6)
    assert s[2, 5] == pytest.approx((1 + 3.0) * ln_n, rel=1e-12)
    mask = np.ones_like(s, dtype=bool)
    mask[2, 5] = False
    np.testing.assert_allclose(s[mask], ln_n, rtol=1e-12)


def test_cross_config_structural_validation():
    with pytest.raises(ValueError, match=r"\(d-1\)\*t"):
        CrossAttnConfig(n=7, d=3, t=3, a0=0.01, a1=3.0)
    with pytest.raises(ValueError, match="d >= 2"):
        CrossAttnConfig(n=3, d=1, t=3, a0=0.01, a1=3.0)
    with pytest.raises(ValueError, match="j2"):
        build_cross_pair(CROSS_63, 3.0, j2=-1, j3=0)


def test_sample_cross_draw_order_and_collisions():
    rng = stream_rng(2)
    seen_collision = False
    for _ in range(200):
        inst = sample_cross(CROSS_63, D1, rng)
        assert 0 <= inst.j2 < 6 and 0 <= inst.j3 < 6
        seen_collision |= inst.j2 == inst.j3
    assert seen_collision  # j2 == j3 is allowed, not resampled
