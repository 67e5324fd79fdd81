"""Planted dataset generators for the self- and cross-attention experiments.

Self-attention head matrix (n x d, n = (d-2)t), shared by A1 = A2 = A3:

    column 0        spike column: scale * sqrt(ln n) at the planted row j3
    columns 1..d-2  t stacked copies of b * sqrt(ln n) * I_{d-2}
                    (row j has its middle entry at column 1 + (j mod (d-2)))
    column d-1      constant c * sqrt(ln n)

so every row has 2 or 3 nonzeros and row sums are (b+c) sqrt(ln n), with
(scale+b+c) sqrt(ln n) at j3.  The planted distribution D1 uses scale = a1,
the null D0 uses scale = a0 << 1.

Cross-attention uses n = (d-1)t and a pair of matrices:

    A1: column 0 is a * ln(n) * e_{j2}; columns 1..d-1 are constant ln(n)
    A2: column 0 is e_{j3}; columns 1..d-1 are t stacked copies of I_{d-1}

With X = I the score matrix has a single bump (1+a) ln n at (j2, j3) over a
flat ln n background.  A3 = A2.

Structural requirements (shape divisibility, positive scales) raise
ValueError; the scale *magnitudes* are deliberately unconstrained so that
degenerate settings (tiny a1, off-normalization b, c) can be swept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .attention import AttentionInstance
from .toy import D0, D1

__all__ = [
    "SelfAttnConfig",
    "CrossAttnConfig",
    "build_self_matrix",
    "build_cross_pair",
    "sample_self",
    "sample_cross",
    "lemma_regime_violations",
]


def _check_scales(**scales: float) -> None:
    for name, val in scales.items():
        if not (math.isfinite(val) and val > 0):
            raise ValueError(f"{name} must be positive and finite, got {val}")


@dataclass(frozen=True)
class SelfAttnConfig:
    n: int
    d: int
    t: int
    a0: float
    a1: float
    b: float
    c: float
    regime: str = "allones"  # scale normalization family: b+c=1 ('allones') or b^2+c^2=1 ('identity')

    def __post_init__(self):
        if self.d < 3:
            raise ValueError(f"self-attention needs d >= 3, got d={self.d}")
        if self.t < 1:
            raise ValueError(f"need t >= 1 identity blocks, got t={self.t}")
        if self.n != (self.d - 2) * self.t:
            raise ValueError(
                f"n must equal (d-2)*t, got n={self.n}, (d-2)*t={(self.d - 2) * self.t}"
            )
        if self.regime not in ("allones", "identity"):
            raise ValueError(f"unknown regime {self.regime!r}")
        _check_scales(a0=self.a0, a1=self.a1, b=self.b, c=self.c)


@dataclass(frozen=True)
class CrossAttnConfig:
    n: int
    d: int
    t: int
    a0: float
    a1: float

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"cross-attention needs d >= 2, got d={self.d}")
        if self.t < 1:
            raise ValueError(f"need t >= 1 identity blocks, got t={self.t}")
        if self.n != (self.d - 1) * self.t:
            raise ValueError(
                f"n must equal (d-1)*t, got n={self.n}, (d-1)*t={(self.d - 1) * self.t}"
            )
        _check_scales(a0=self.a0, a1=self.a1)


def lemma_regime_violations(cfg: SelfAttnConfig) -> list[str]:
    """Soft constraints under which the closed-form row values are proved.

    Violations do not prevent sampling (degeneracy sweeps leave the regime on
    purpose); the oracle layer refuses configs reported here.
    """
    bad = []
    if not 0 < cfg.a0 < 0.1:
        bad.append(f"a0={cfg.a0} outside (0, 0.1)")
    if cfg.regime == "allones":
        if abs(cfg.b + cfg.c - 1.0) > 1e-9:
            bad.append(f"b+c={cfg.b + cfg.c} != 1")
        if cfg.a1 < 0.7:
            bad.append(f"a1={cfg.a1} < 0.7")
    else:
        if abs(cfg.b**2 + cfg.c**2 - 1.0) > 1e-9:
            bad.append(f"b^2+c^2={cfg.b ** 2 + cfg.c ** 2} != 1")
        if cfg.a1 < 1.0:
            bad.append(f"a1={cfg.a1} < 1")
    return bad


def build_self_matrix(cfg: SelfAttnConfig, scale_a: float, j3: int) -> np.ndarray:
    """Deterministic head matrix for a given planted row j3."""
    n, d = cfg.n, cfg.d
    if not 0 <= j3 < n:
        raise ValueError(f"j3 must lie in [0, {n}), got {j3}")
    root_l = math.sqrt(math.log(n))
    a = np.zeros((n, d))
    a[j3, 0] = scale_a * root_l
    rows = np.arange(n)
    a[rows, 1 + rows % (d - 2)] = cfg.b * root_l
    a[:, d - 1] = cfg.c * root_l
    return a


def sample_self(cfg: SelfAttnConfig, label: str, rng: np.random.Generator) -> AttentionInstance:
    """Draw an instance: one integer for j3, then the deterministic matrix."""
    if label == D1:
        scale = cfg.a1
    elif label == D0:
        scale = cfg.a0
    else:
        raise ValueError(f"unknown label {label!r}")
    j3 = int(rng.integers(cfg.n))
    a = build_self_matrix(cfg, scale, j3)
    return AttentionInstance(A1=a, A2=a, A3=a, label=label, j3=j3)


def build_cross_pair(
    cfg: CrossAttnConfig, scale_a: float, j2: int, j3: int
) -> tuple[np.ndarray, np.ndarray]:
    n, d = cfg.n, cfg.d
    for name, j in (("j2", j2), ("j3", j3)):
        if not 0 <= j < n:
            raise ValueError(f"{name} must lie in [0, {n}), got {j}")
    ln_n = math.log(n)
    a1 = np.full((n, d), ln_n)
    a1[:, 0] = 0.0
    a1[j2, 0] = scale_a * ln_n
    a2 = np.zeros((n, d))
    a2[j3, 0] = 1.0
    rows = np.arange(n)
    a2[rows, 1 + rows % (d - 1)] = 1.0
    return a1, a2


def sample_cross(cfg: CrossAttnConfig, label: str, rng: np.random.Generator) -> AttentionInstance:
    """Draw an instance: j2 then j3 (collisions allowed), then the matrices."""
    if label == D1:
        scale = cfg.a1
    elif label == D0:
        scale = cfg.a0
    else:
        raise ValueError(f"unknown label {label!r}")
    j2 = int(rng.integers(cfg.n))
    j3 = int(rng.integers(cfg.n))
    a1, a2 = build_cross_pair(cfg, scale, j2, j3)
    return AttentionInstance(A1=a1, A2=a2, A3=a2, label=label, j3=j3, j2=j2)
