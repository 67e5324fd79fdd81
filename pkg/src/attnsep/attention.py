"""Single-layer attention pipeline with exp and linear row normalization.

The pipeline computes, for head matrices A1, A2, A3 (n x d), key/query matrix
X (d x d) and value matrix V (d x d):

    S = A1 @ X @ A2.T                  (raw scores, n x n)
    F = normalize_rows(exp(S))         kind='exp'  (softmax rows)
        normalize_rows(S)              kind='lin'
    C = F @ A3 @ V                     (n x d)
    out = relu( sum_{j0,l} relu(<C[j0], y[:,l]> - tau) )

The exp/lin pair is the object of study: with the planted datasets below the
softmax rows concentrate on a single key, the linear rows do not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import kron, relu, relu_shift, vec

__all__ = [
    "AttentionInstance",
    "scores",
    "attention_rows",
    "c_matrix",
    "network_output",
    "forward",
    "tensor_trick_residual",
]


@dataclass(frozen=True)
class AttentionInstance:
    """One sampled dataset instance: head matrices plus planted indices."""

    A1: np.ndarray
    A2: np.ndarray
    A3: np.ndarray
    label: str
    j3: int | None = None  # planted key row
    j2: int | None = None  # planted query row (cross-attention only)


def scores(inst: AttentionInstance, x: np.ndarray) -> np.ndarray:
    return inst.A1 @ x @ inst.A2.T


def attention_rows(s: np.ndarray, kind: str) -> np.ndarray:
    """Row-normalize a score matrix; rows sum to one.

    'exp' applies the softmax per row (max-shifted, exact in the ratio);
    'lin' divides each row by its coordinate sum and rejects near-zero sums.
    """
    s = np.asarray(s, dtype=np.float64)
    if kind == "exp":
        w = np.exp(s - s.max(axis=1, keepdims=True))
        return w / w.sum(axis=1, keepdims=True)
    if kind == "lin":
        sums = s.sum(axis=1, keepdims=True)
        if np.min(np.abs(sums)) < 1e-300:
            raise ValueError("cannot normalize: a score row sums to zero")
        return s / sums
    raise ValueError(f"unknown kind {kind!r}")


def c_matrix(f: np.ndarray, a3: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Attended values C = F @ A3 @ V (n x d)."""
    return f @ (a3 @ v)


def network_output(c: np.ndarray, y: np.ndarray, tau: float) -> float:
    """Thresholded read-out summed over all rows and sign columns."""
    z = c @ y
    return float(relu(relu_shift(z, tau).sum()))


def forward(
    inst: AttentionInstance,
    x: np.ndarray,
    v: np.ndarray,
    y: np.ndarray,
    tau: float,
    kind: str,
) -> float:
    f = attention_rows(scores(inst, x), kind)
    return network_output(c_matrix(f, inst.A3, v), y, tau)


def tensor_trick_residual(a1: np.ndarray, a2: np.ndarray, x: np.ndarray) -> float:
    """Relative residual of exp((A1 kron A2) vec(X)) against vec(exp(A1 X A2^T)).

    Zero (to rounding) exactly when vec is row-major, which pins the
    flattening convention used throughout.
    """
    lhs = np.exp(kron(a1, a2) @ vec(x))
    rhs = vec(np.exp(a1 @ x @ a2.T))
    scale = max(float(np.max(np.abs(rhs))), 1e-300)
    return float(np.max(np.abs(lhs - rhs)) / scale)
