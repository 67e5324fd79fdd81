"""Toy softmax-regression model.

A score vector v of length n is sampled from one of two distributions:

* ``D0`` (null): every coordinate uniform on [ln n, 1.4 ln n].
* ``D1`` (planted): same, then one uniformly chosen coordinate is set to 4 ln n.

The read-out normalizes v (softmax or linear), correlates against m random
sign vectors, and sums thresholded ReLUs.  Softmax concentrates ~all mass on
the planted spike, so on D1 the correlation inherits the spike's sign and has
magnitude >= 1/2 - o(1); linear normalization leaves mass spread out and the
network stays silent for moderate thresholds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import normalize_exp, normalize_lin, rademacher_matrix, relu, relu_shift

D0 = "D0"
D1 = "D1"

__all__ = ["D0", "D1", "ToySample", "ToyNetwork", "gen_sample", "weights", "output"]


@dataclass(frozen=True)
class ToySample:
    v: np.ndarray
    label: str
    spike_index: int | None  # None for D0


@dataclass(frozen=True)
class ToyNetwork:
    """Read-out parameters: sign matrix y (n x m) and threshold tau."""

    y: np.ndarray
    tau: float

    @property
    def m(self) -> int:
        return self.y.shape[1]


def gen_sample(n: int, label: str, rng: np.random.Generator) -> ToySample:
    """Draw one score vector.  Draw order: n uniforms, then (D1 only) the spike index."""
    if n < 4:
        raise ValueError(f"toy model needs n >= 4, got n={n}")
    if label not in (D0, D1):
        raise ValueError(f"unknown label {label!r}")
    ln_n = np.log(n)
    v = rng.uniform(ln_n, 1.4 * ln_n, size=n)
    spike = None
    if label == D1:
        spike = int(rng.integers(n))
        v[spike] = 4.0 * ln_n
    return ToySample(v=v, label=label, spike_index=spike)


def fresh_network(n: int, m: int, tau: float, rng: np.random.Generator) -> ToyNetwork:
    if m < 1:
        raise ValueError(f"need m >= 1 read-out columns, got m={m}")
    return ToyNetwork(y=rademacher_matrix(n, m, rng), tau=tau)


def weights(v: np.ndarray, kind: str) -> np.ndarray:
    """Normalized score vector: kind 'exp' -> softmax, 'lin' -> sum-normalized."""
    if kind == "exp":
        return normalize_exp(v)
    if kind == "lin":
        return normalize_lin(v)
    raise ValueError(f"unknown kind {kind!r}")


def output(sample: ToySample, net: ToyNetwork, kind: str) -> float:
    """F = relu(sum_l relu(<f, y_l> - tau)) for f = weights(v, kind)."""
    f = weights(sample.v, kind)
    z = f @ net.y
    return float(relu(relu_shift(z, net.tau).sum()))
