"""End-to-end acceptance checks.

One test per target criterion; each prints a PASS/FAIL line with the measured
quantity so the whole gate is readable from the test log.  Monte-Carlo
criteria use seed 0 throughout (nothing was tuned per seed; see README for
the one criterion that is genuinely not met by this construction).
"""

import itertools
import math
import time

import numpy as np

from attnsep import toy
from attnsep.attention import attention_rows, c_matrix, tensor_trick_residual
from attnsep.datasets import SelfAttnConfig, build_self_matrix
from attnsep.experiment import SweepSpec, run_sweep, write_csv
from attnsep.linalg import rademacher_matrix, stream_rng
from attnsep.oracles import run_verification
from attnsep.toy import D1

SEED = 0


def report(name: str, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'}: {name}: {detail}")
    assert ok, f"{name}: {detail}"


def ratio_at(family: str, fixed: dict, trials: int, seed: int = SEED):
    n = fixed.pop("n")
    spec = SweepSpec(
        family=family, swept_param="n", values=(n,), fixed=fixed,
        trials_per_point=trials, seed=seed,
    )
    (rec,) = run_sweep(spec, threads=4)
    return rec


SELF_FIXED = dict(d=22, delta=0.01, a0=0.01, a1=1.2, b=0.2, c=0.8, m=15, tau=None)


def test_oracle_grid_exactness():
    start = time.perf_counter()
    rows = [r for r in run_verification(quick=False) if r.check in ("u", "f", "c")]
    elapsed = time.perf_counter() - start
    failed = [r for r in rows if not r.passed]
    detail = (
        f"{len(rows)} case groups, {sum(r.cases for r in rows)} entries, "
        f"worst deviation {max(r.worst for r in rows):.2e}, {elapsed:.1f}s"
    )
    report("oracle grid (u exact to 1e-9, f/c bounds to 1e-12)", not failed and elapsed < 10.0,
           detail + "".join(f"; {r.regime}/{r.dataset}/{r.kind}/{r.check}: {r.detail}" for r in failed))


def test_tensor_trick_residual():
    start = time.perf_counter()
    rng = stream_rng(SEED)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 7))
        d = int(rng.integers(2, 7))
        worst = max(
            worst,
            tensor_trick_residual(
                rng.normal(size=(n, d)), rng.normal(size=(n, d)), rng.normal(size=(d, d))
            ),
        )
    elapsed = time.perf_counter() - start
    report("tensor-trick residual <= 1e-9 on 100 random shapes",
           worst <= 1e-9 and elapsed < 1.0, f"worst {worst:.2e}, {elapsed:.2f}s")


def test_toy_sign_dot_exhaustive():
    start = time.perf_counter()
    rng = stream_rng(SEED)
    worst = 1.0
    for n in range(4, 9):
        signs = np.array(list(itertools.product((-1.0, 1.0), repeat=n)))
        for _ in range(25):
            f = toy.weights(toy.gen_sample(n, D1, rng).v, "exp")
            worst = min(worst, float(np.abs(signs @ f).min()))
    elapsed = time.perf_counter() - start
    report("toy planted softmax: |<f, sigma>| >= 1/4 for all sign vectors, n=4..8",
           worst >= 0.25 and elapsed < 5.0, f"min |dot| {worst:.4f}, {elapsed:.2f}s")


def test_toy_separation_ratio():
    start = time.perf_counter()
    rec = ratio_at("toy", dict(n=1000, m=7, tau=0.4), trials=1000)
    elapsed = time.perf_counter() - start
    report("toy separation at n=1000, m=7, tau=0.4 (1000 trials, >= 0.95)",
           rec.ratio >= 0.95 and elapsed < 30.0, f"ratio {rec.ratio:.3f}, {elapsed:.1f}s")


def test_self_fixed_point_identity_x():
    start = time.perf_counter()
    rec = ratio_at("self_identity", dict(n=200, **SELF_FIXED), trials=100)
    elapsed = time.perf_counter() - start
    report(
        "self-attention, X = I_d, n=200, d=22 (100 trials, >= 0.9)",
        rec.ratio >= 0.9 and elapsed < 60.0,
        f"ratio {rec.ratio:.3f} "
        f"(fails: exp/D1 {rec.fail_exp_d1}, lin/D1 {rec.fail_lin_d1}, "
        f"exp/D0 {rec.fail_exp_d0}, lin/D0 {rec.fail_lin_d0}), {elapsed:.1f}s "
        "[known shortfall: tau - c*sqrt(ln n) = 0.1*sqrt(ln n) is ~2 sigma of the "
        "read-out sign noise at d=22; see README]",
    )


def test_self_fixed_point_allones_x():
    start = time.perf_counter()
    rec = ratio_at("self_allones", dict(n=200, **SELF_FIXED), trials=100)
    elapsed = time.perf_counter() - start
    report("self-attention, X = all-ones, n=200, d=22 (100 trials, >= 0.9)",
           rec.ratio >= 0.9 and elapsed < 60.0, f"ratio {rec.ratio:.3f}, {elapsed:.1f}s")


def test_cross_fixed_point():
    start = time.perf_counter()
    rec = ratio_at("cross", dict(n=200, d=11, delta=0.01, a0=0.01, a1=3.0), trials=100)
    elapsed = time.perf_counter() - start
    report("cross-attention, n=200, d=11 (100 trials, >= 0.9)",
           rec.ratio >= 0.9 and elapsed < 60.0, f"ratio {rec.ratio:.3f}, {elapsed:.1f}s")


def test_degenerate_planted_scale_breaks_separation():
    rec = ratio_at("self_identity", dict(n=200, **{**SELF_FIXED, "a1": 0.1}), trials=100)
    report("degeneracy: a1 = 0.1 collapses the success ratio (<= 0.5)",
           rec.ratio <= 0.5, f"ratio {rec.ratio:.3f}")


def test_equal_seeds_byte_identical_csvs(tmp_path):
    specs = [
        SweepSpec(family="toy", swept_param="n", values=(100, 110, 120),
                  fixed={"m": None, "tau": None}, trials_per_point=50, seed=11),
        SweepSpec(family="self_identity", swept_param="d", values=(6, 7),
                  fixed={"n": 20, "m": 5, "tau": None, "delta": 0.01,
                         "a0": 0.01, "a1": 1.2, "b": 0.2, "c": 0.8},
                  trials_per_point=20, seed=11),
    ]
    ok = True
    for i, spec in enumerate(specs):
        payloads = []
        for threads in (1, 2, 8):
            path = tmp_path / f"{i}_{threads}.csv"
            write_csv(str(path), spec, run_sweep(spec, threads=threads))
            payloads.append(path.read_bytes())
        ok &= payloads[0] == payloads[1] == payloads[2]
    report("equal seeds give byte-identical CSVs across thread counts", ok,
           f"{len(specs)} sweeps x 3 thread counts compared")


def test_sign_vector_trigger_frequencies():
    cfg = SelfAttnConfig(n=200, d=22, t=10, a0=0.01, a1=1.2, b=0.2, c=0.8)
    tau = (cfg.c + 0.1) * math.sqrt(math.log(cfg.n))
    ok = True
    details = []
    for j3 in (0, 137):
        a = build_self_matrix(cfg, cfg.a1, j3)
        f = attention_rows(a @ np.eye(cfg.d) @ a.T, "exp")
        c = c_matrix(f, a, np.eye(cfg.d))
        sigma = rademacher_matrix(cfg.d, 10_000, stream_rng(SEED, j3))
        z = c @ sigma
        on = float((z[j3] > tau).mean())
        off = float((np.delete(z, j3, axis=0) > tau).mean(axis=1).max())
        ok &= on >= 0.10 and off <= 0.02
        details.append(f"j3={j3}: planted row {on:.3f} (>= 0.10), worst other row {off:.4f} (<= 0.02)")
    report("random sign read-out triggers on the planted row only", ok, "; ".join(details))
