"""Monte-Carlo success-ratio experiments.

A trial draws a fresh read-out sign matrix y and one sample from each of D1
(planted) and D0 (null), then evaluates the exp and lin networks on both with
the *same* y.  The trial succeeds when

    F_exp(D1) > 0   and   F_lin(D1) == 0   and
    F_exp(D0) == 0  and   F_lin(D0) == 0.

The zero tests are exact: F is a sum of ReLUs, so "does not fire" is a float
zero, not a tolerance.

Sweeps evaluate a grid of values for one parameter.  Reproducibility is per
trial: trial ``k`` of point ``i`` always uses the generator
``stream_rng(seed, i, k)``, so results are byte-identical for any thread
count or execution order.  Unset ``m`` and ``tau`` are resolved per point
from the swept values (e.g. sweeping n moves m = ceil(ln n) with it).
"""

from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import toy
from .attention import attention_rows, c_matrix, network_output
from .datasets import CrossAttnConfig, SelfAttnConfig, sample_cross, sample_self
from .linalg import rademacher_matrix, stream_rng
from .toy import D0, D1

log = logging.getLogger(__name__)

FAMILIES = ("toy", "self_identity", "self_allones", "cross")

CSV_HEADER = [
    "family",
    "swept_param",
    "swept_value",
    "trials",
    "successes",
    "ratio",
    "fail_exp_d1",
    "fail_lin_d1",
    "fail_exp_d0",
    "fail_lin_d0",
    "seed",
]

__all__ = [
    "FAMILIES",
    "CSV_HEADER",
    "TrialRecord",
    "SweepSpec",
    "SweepRecord",
    "run_toy_trial",
    "run_self_trial",
    "run_cross_trial",
    "run_sweep",
    "write_csv",
    "read_csv",
]


@dataclass(frozen=True)
class TrialRecord:
    exp_on_d1_positive: bool
    lin_on_d1_zero: bool
    exp_on_d0_zero: bool
    lin_on_d0_zero: bool

    @property
    def success(self) -> bool:
        return (
            self.exp_on_d1_positive
            and self.lin_on_d1_zero
            and self.exp_on_d0_zero
            and self.lin_on_d0_zero
        )


def run_toy_trial(n: int, m: int, tau: float, rng: np.random.Generator) -> TrialRecord:
    """One toy trial.  Draw order: y (n x m), D1 sample, D0 sample."""
    net = toy.fresh_network(n, m, tau, rng)
    s1 = toy.gen_sample(n, D1, rng)
    s0 = toy.gen_sample(n, D0, rng)
    return TrialRecord(
        exp_on_d1_positive=toy.output(s1, net, "exp") > 0.0,
        lin_on_d1_zero=toy.output(s1, net, "lin") == 0.0,
        exp_on_d0_zero=toy.output(s0, net, "exp") == 0.0,
        lin_on_d0_zero=toy.output(s0, net, "lin") == 0.0,
    )


def _attention_trial(inst1, inst0, x, v, y, tau) -> TrialRecord:
    outs = {}
    for tag, inst in (("d1", inst1), ("d0", inst0)):
        s = inst.A1 @ x @ inst.A2.T
        for kind in ("exp", "lin"):
            f = attention_rows(s, kind)
            outs[tag, kind] = network_output(c_matrix(f, inst.A3, v), y, tau)
    return TrialRecord(
        exp_on_d1_positive=outs["d1", "exp"] > 0.0,
        lin_on_d1_zero=outs["d1", "lin"] == 0.0,
        exp_on_d0_zero=outs["d0", "exp"] == 0.0,
        lin_on_d0_zero=outs["d0", "lin"] == 0.0,
    )


def run_self_trial(
    cfg: SelfAttnConfig, x_mode: str, m: int, tau: float, rng: np.random.Generator
) -> TrialRecord:
    """One self-attention trial.  Draw order: y (d x m), D1 instance, D0 instance.

    ``x_mode`` picks the key/query matrix: 'identity' -> X = I_d,
    'allones' -> X = 1_{d x d}.  V = I_d.
    """
    if x_mode == "identity":
        x = np.eye(cfg.d)
    elif x_mode == "allones":
        x = np.ones((cfg.d, cfg.d))
    else:
        raise ValueError(f"unknown x_mode {x_mode!r}")
    y = rademacher_matrix(cfg.d, m, rng)
    inst1 = sample_self(cfg, D1, rng)
    inst0 = sample_self(cfg, D0, rng)
    return _attention_trial(inst1, inst0, x, np.eye(cfg.d), y, tau)


def run_cross_trial(
    cfg: CrossAttnConfig, m: int, tau: float, rng: np.random.Generator
) -> TrialRecord:
    """One cross-attention trial (X = V = I_d).  Draw order: y, D1, D0."""
    y = rademacher_matrix(cfg.d, m, rng)
    inst1 = sample_cross(cfg, D1, rng)
    inst0 = sample_cross(cfg, D0, rng)
    return _attention_trial(inst1, inst0, np.eye(cfg.d), np.eye(cfg.d), y, tau)


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepSpec:
    family: str
    swept_param: str
    values: tuple
    fixed: dict = field(default_factory=dict)
    trials_per_point: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if not self.values:
            raise ValueError("sweep needs at least one value")
        if self.trials_per_point < 1:
            raise ValueError("need at least one trial per point")


@dataclass(frozen=True)
class SweepRecord:
    swept_value: int | float
    trials: int
    successes: int
    fail_exp_d1: int
    fail_lin_d1: int
    fail_exp_d0: int
    fail_lin_d0: int

    @property
    def ratio(self) -> float:
        return self.successes / self.trials


def _as_int(params: dict, key: str) -> int:
    val = params[key]
    if val != int(val):
        raise ValueError(f"{key} must be an integer, got {val}")
    return int(val)


def _resolve_point(family: str, params: dict):
    """Turn a raw parameter dict into a no-argument trial runner.

    Raises ValueError for structurally impossible points (the sweep driver
    skips those).  Unset m/tau fall back to the per-family rules.
    """
    if family == "toy":
        n = _as_int(params, "n")
        if n < 4:
            raise ValueError(f"toy model needs n >= 4, got {n}")
        m = _as_int(params, "m") if params.get("m") is not None else math.ceil(math.log(n))
        tau = params["tau"] if params.get("tau") is not None else 0.4
        if m < 1:
            raise ValueError(f"need m >= 1, got {m}")
        return lambda rng: run_toy_trial(n, m, tau, rng)

    delta = params.get("delta", 0.01)
    if family in ("self_identity", "self_allones"):
        n, d = _as_int(params, "n"), _as_int(params, "d")
        if d < 3 or n % (d - 2) != 0:
            raise ValueError(f"self-attention needs (d-2) | n, got n={n}, d={d}")
        cfg = SelfAttnConfig(
            n=n, d=d, t=n // (d - 2),
            a0=params.get("a0", 0.01), a1=params.get("a1", 1.2),
            b=params.get("b", 0.2), c=params.get("c", 0.8),
        )
        m = (
            _as_int(params, "m")
            if params.get("m") is not None
            else max(math.ceil(math.log(n / delta)), 15)
        )
        tau = (
            params["tau"]
            if params.get("tau") is not None
            else (cfg.c + 0.1) * math.sqrt(math.log(n))
        )
        x_mode = "identity" if family == "self_identity" else "allones"
        if m < 1:
            raise ValueError(f"need m >= 1, got {m}")
        return lambda rng: run_self_trial(cfg, x_mode, m, tau, rng)

    if family == "cross":
        n, d = _as_int(params, "n"), _as_int(params, "d")
        if d < 2 or n % (d - 1) != 0:
            raise ValueError(f"cross-attention needs (d-1) | n, got n={n}, d={d}")
        cfg = CrossAttnConfig(
            n=n, d=d, t=n // (d - 1),
            a0=params.get("a0", 0.01), a1=params.get("a1", 3.0),
        )
        m = (
            _as_int(params, "m")
            if params.get("m") is not None
            else math.ceil(math.log(n / delta))
        )
        tau = params["tau"] if params.get("tau") is not None else 0.9
        if m < 1:
            raise ValueError(f"need m >= 1, got {m}")
        return lambda rng: run_cross_trial(cfg, m, tau, rng)

    raise ValueError(f"unknown family {family!r}")


def run_sweep(spec: SweepSpec, threads: int | None = None) -> list[SweepRecord]:
    """Run every sweep point; returns one record per accepted point.

    Structurally invalid points (e.g. a divisibility failure while sweeping n)
    are skipped with a warning.  Output is independent of ``threads``.
    """
    threads = threads or os.cpu_count() or 1
    records = []
    for point_index, value in enumerate(spec.values):
        params = dict(spec.fixed)
        params[spec.swept_param] = value
        try:
            trial = _resolve_point(spec.family, params)
        except ValueError as err:
            log.warning(
                "skipping %s sweep point %s=%r: %s", spec.family, spec.swept_param, value, err
            )
            continue

        def one(trial_index: int) -> TrialRecord:
            return trial(stream_rng(spec.seed, point_index, trial_index))

        indices = range(spec.trials_per_point)
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                outcomes = list(pool.map(one, indices))
        else:
            outcomes = [one(k) for k in indices]

        records.append(
            SweepRecord(
                swept_value=value,
                trials=len(outcomes),
                successes=sum(o.success for o in outcomes),
                fail_exp_d1=sum(not o.exp_on_d1_positive for o in outcomes),
                fail_lin_d1=sum(not o.lin_on_d1_zero for o in outcomes),
                fail_exp_d0=sum(not o.exp_on_d0_zero for o in outcomes),
                fail_lin_d0=sum(not o.lin_on_d0_zero for o in outcomes),
            )
        )
    return records


# ---------------------------------------------------------------------------
# CSV I/O


def _format_value(v) -> str:
    # repr round-trips floats exactly; sweep grids are rounded at parse time
    # so the common case still prints as e.g. 0.208
    return str(v) if isinstance(v, int) else repr(float(v))


def _parse_value(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def write_csv(path: str, spec: SweepSpec, records: list[SweepRecord]) -> None:
    """One row per sweep point, LF line endings, '.' decimals, UTF-8.

    An empty record list still writes the header line.
    """
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for rec in records:
                writer.writerow(
                    [
                        spec.family,
                        spec.swept_param,
                        _format_value(rec.swept_value),
                        rec.trials,
                        rec.successes,
                        f"{rec.ratio:.6f}",
                        rec.fail_exp_d1,
                        rec.fail_lin_d1,
                        rec.fail_exp_d0,
                        rec.fail_lin_d0,
                        spec.seed,
                    ]
                )
    except OSError as err:
        raise OSError(f"cannot write sweep CSV to {path!r}: {err}") from err


def read_csv(path: str) -> tuple[dict, list[SweepRecord]]:
    """Parse a sweep CSV back into (metadata, records); inverse of write_csv."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as err:
        raise OSError(f"cannot read sweep CSV from {path!r}: {err}") from err
    if not rows or rows[0] != CSV_HEADER:
        raise ValueError(f"{path!r} is not a sweep CSV (bad header)")
    meta: dict = {}
    records = []
    for row in rows[1:]:
        if len(row) != len(CSV_HEADER):
            raise ValueError(f"{path!r}: malformed row {row!r}")
        family, param, value, trials, succ, _ratio, fe1, fl1, fe0, fl0, seed = row
        if meta and (family, param, int(seed)) != (meta["family"], meta["swept_param"], meta["seed"]):
            raise ValueError(f"{path!r}: inconsistent sweep metadata in row {row!r}")
        meta = {"family": family, "swept_param": param, "seed": int(seed)}
        records.append(
            SweepRecord(
                swept_value=_parse_value(value),
                trials=int(trials),
                successes=int(succ),
                fail_exp_d1=int(fe1),
                fail_lin_d1=int(fl1),
                fail_exp_d0=int(fe0),
                fail_lin_d0=int(fl0),
            )
        )
    return meta, records
