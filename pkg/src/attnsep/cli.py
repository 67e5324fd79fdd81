"""Command-line front end.

Subcommands
-----------
* ``toy`` / ``self-attn`` / ``cross-attn``: run a Monte-Carlo sweep over one
  parameter and write a CSV (one row per sweep point).
* ``verify``: check the closed-form oracles against the pipeline and print a
  pass/fail table; exits nonzero on any mismatch.

A sweep is ``--sweep name=start:stop:step`` (inclusive when stop lands on the
grid) or ``--sweep name=v1,v2,...``.  Unset --m/--tau follow the per-family
rules (see --help of each subcommand) and move with the swept parameter.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from .experiment import SweepSpec, run_sweep, write_csv
from .oracles import run_verification

INT_PARAMS = {"n", "d", "m"}

SWEEPABLE = {
    "toy": {"n", "m", "tau"},
    "self_identity": {"n", "d", "m", "tau", "a0", "a1", "b", "c", "delta"},
    "self_allones": {"n", "d", "m", "tau", "a0", "a1", "b", "c", "delta"},
    "cross": {"n", "d", "m", "tau", "a0", "a1", "delta"},
}


def parse_sweep(text: str) -> tuple[str, tuple]:
    """Parse 'name=start:stop:step' or 'name=v1,v2,...' into (name, values)."""
    name, sep, rhs = text.partition("=")
    name = name.strip()
    if not sep or not name or not rhs:
        raise argparse.ArgumentTypeError(f"expected name=RANGE or name=LIST, got {text!r}")
    as_int = name in INT_PARAMS

    def scalar(tok: str):
        tok = tok.strip()
        try:
            return int(tok) if as_int else round(float(tok), 10)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad value {tok!r} for parameter {name!r}")

    if ":" in rhs:
        parts = rhs.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"range must be start:stop:step, got {rhs!r}")
        start, stop, step = (scalar(p) for p in parts)
        if step <= 0:
            raise argparse.ArgumentTypeError("range step must be positive")
        if stop < start:
            raise argparse.ArgumentTypeError("range stop must be >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        if as_int:
            values = tuple(start + i * step for i in range(count))
        else:
            values = tuple(round(start + i * step, 10) for i in range(count))
    else:
        values = tuple(scalar(tok) for tok in rhs.split(",") if tok.strip())
    if not values:
        raise argparse.ArgumentTypeError(f"sweep {text!r} produced no values")
    return name, values


def _add_common(sub: argparse.ArgumentParser, default_trials: int) -> None:
    sub.add_argument("--sweep", type=parse_sweep, required=True, metavar="NAME=RANGE",
                     help="parameter to sweep: name=start:stop:step or name=v1,v2,...")
    sub.add_argument("--trials", type=int, default=default_trials,
                     help=f"Monte-Carlo trials per sweep point (default {default_trials})")
    sub.add_argument("--seed", type=int, default=0, help="base RNG seed (default 0)")
    sub.add_argument("--out", default=None, metavar="PATH",
                     help="output CSV path (default <family>_<param>.csv)")
    sub.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                     help="worker threads; output does not depend on this")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="attnsep",
        description="Monte-Carlo separation experiments for softmax vs linear attention",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_toy = subs.add_parser("toy", help="toy softmax-regression separation sweep")
    p_toy.add_argument("--n", type=int, default=1000, help="score dimension (default 1000)")
    p_toy.add_argument("--m", type=int, default=None,
                       help="read-out columns (default ceil(ln n), tracks a swept n)")
    p_toy.add_argument("--tau", type=float, default=None, help="threshold (default 0.4)")
    _add_common(p_toy, default_trials=1000)

    p_self = subs.add_parser("self-attn", help="self-attention separation sweep")
    p_self.add_argument("--x-mode", choices=("identity", "allones"), default="identity",
                        help="key/query matrix: X=I_d or X=all-ones (default identity)")
    p_self.add_argument("--n", type=int, default=200, help="rows, must be (d-2)*t (default 200)")
    p_self.add_argument("--d", type=int, default=22, help="columns (default 22)")
    p_self.add_argument("--m", type=int, default=None,
                        help="read-out columns (default max(ceil(ln(n/delta)), 15))")
    p_self.add_argument("--tau", type=float, default=None,
                        help="threshold (default (c+0.1)*sqrt(ln n))")
    p_self.add_argument("--delta", type=float, default=0.01)
    p_self.add_argument("--a0", type=float, default=0.01, help="null spike scale")
    p_self.add_argument("--a1", type=float, default=1.2, help="planted spike scale")
    p_self.add_argument("--b", type=float, default=0.2, help="middle-column scale")
    p_self.add_argument("--c", type=float, default=0.8, help="last-column scale")
    _add_common(p_self, default_trials=100)

    p_cross = subs.add_parser("cross-attn", help="cross-attention separation sweep")
    p_cross.add_argument("--n", type=int, default=200, help="rows, must be (d-1)*t (default 200)")
    p_cross.add_argument("--d", type=int, default=11, help="columns (default 11)")
    p_cross.add_argument("--m", type=int, default=None,
                         help="read-out columns (default ceil(ln(n/delta)))")
    p_cross.add_argument("--tau", type=float, default=None, help="threshold (default 0.9)")
    p_cross.add_argument("--delta", type=float, default=0.01)
    p_cross.add_argument("--a0", type=float, default=0.01, help="null bump scale")
    p_cross.add_argument("--a1", type=float, default=3.0, help="planted bump scale")
    _add_common(p_cross, default_trials=100)

    p_verify = subs.add_parser("verify", help="check closed-form oracles against the pipeline")
    p_verify.add_argument("--quick", action="store_true", help="small grid (a few seconds)")
    return parser


def _fixed_params(args: argparse.Namespace, family: str) -> dict:
    keys = SWEEPABLE[family]
    fixed = {}
    for key in keys:
        if hasattr(args, key):
            fixed[key] = getattr(args, key)
    return fixed


def _cmd_sweep(args: argparse.Namespace, family: str) -> int:
    param, values = args.sweep
    if param not in SWEEPABLE[family]:
        print(f"error: cannot sweep {param!r} for family {family!r} "
              f"(choose from {sorted(SWEEPABLE[family])})", file=sys.stderr)
        return 2
    fixed = _fixed_params(args, family)
    fixed.pop(param, None)
    spec = SweepSpec(
        family=family,
        swept_param=param,
        values=values,
        fixed=fixed,
        trials_per_point=args.trials,
        seed=args.seed,
    )
    records = run_sweep(spec, threads=args.threads)
    out = args.out or f"{family}_{param}.csv"
    write_csv(out, spec, records)
    print(f"wrote {out}: {len(records)} points x {args.trials} trials")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    rows = run_verification(quick=args.quick)
    width = max(len(r.check) for r in rows)
    failures = 0
    for r in rows:
        status = "ok" if r.passed else "FAIL"
        print(f"{r.regime:>14} {r.dataset:>3} {r.kind:>4} {r.check:<{width}} "
              f"cases={r.cases:<6} worst={r.worst:.3e}  {status}")
        if not r.passed:
            failures += 1
            print(f"    mismatch: regime={r.regime} dataset={r.dataset} kind={r.kind}: {r.detail}")
    print(f"{len(rows) - failures}/{len(rows)} checks passed")
    return 0 if failures == 0 else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "toy":
        return _cmd_sweep(args, "toy")
    if args.command == "self-attn":
        family = "self_identity" if args.x_mode == "identity" else "self_allones"
        return _cmd_sweep(args, family)
    if args.command == "cross-attn":
        return _cmd_sweep(args, "cross")
    if args.command == "verify":
        return _cmd_verify(args)
    parser.error(f"unknown command {args.command!r}")  # pragma: no cover
    return 2


if __name__ == "__main__":
    sys.exit(main())
