"""Command-line front end.

Exit status: 0 on success, 1 on a domain error (a JSON error object is
written to stderr), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from . import catalog as cat
from .core import CoefficientMatrix, QuditError
from .engine import (
    LHV_CAP,
    SETTING_PAIRS,
    constructed_scenario,
    hardy_score,
    lhv_minimum,
    mes_nogo_check,
    sample_outcomes,
)
from .optimizer import SCAN_CAP, OptimizerConfig, maximize_hardy, scan_approx, write_scan_csv


class UsageError(Exception):
    pass


def format_matrix(arr: np.ndarray) -> str:
    arr = np.asarray(arr)
    if np.allclose(arr.imag, 0):
        rows = ["  ".join(f"{x.real:9.6f}" for x in row) for row in arr]
    else:
        rows = ["  ".join(f"{x.real:9.6f}{x.imag:+9.6f}i" for x in row) for row in arr]
    return "\n".join(rows)


def load_state(state_arg: str, d: int | None) -> CoefficientMatrix:
    if state_arg.startswith("file:"):
        path = Path(state_arg[len("file:"):])
        try:
            text = path.read_text()
        except OSError as exc:
            raise QuditError(f"cannot read state file {path}: {exc}") from exc
        try:
            state = CoefficientMatrix.from_json(text)
        except json.JSONDecodeError as exc:
            raise QuditError(f"state file {path} is not valid JSON: {exc}") from exc
        if d is not None and state.d != d:
            raise QuditError(f"state file has d = {state.d} but --d {d} was given")
        return state
    if state_arg not in cat.KINDS:
        raise UsageError(f"--state must be one of {', '.join(cat.KINDS)} or file:<path>")
    if d is None:
        raise UsageError(f"--state {state_arg} requires --d")
    return cat.state_by_kind(state_arg, d)


def _require_seed(args: argparse.Namespace, why: str) -> int:
    if args.seed is None:
        raise UsageError(f"{why} is randomized; pass an explicit --seed")
    return args.seed


def _report_human(report) -> str:
    lines = [
        f"d = {report.d}",
        f"P(A2<B2)     = {report.score:.6f}",
        "residuals    = " + ", ".join(f"{r:.3e}" for r in report.residuals),
        f"concurrence  = {report.concurrence:.6f}" if report.concurrence is not None else "concurrence  = n/a",
    ]
    if not report.converged:
        lines.append("WARNING: optimizer did not converge; best-so-far state shown")
    lines.append("H =")
    lines.append(format_matrix(report.state.entries))
    return "\n".join(lines)


def cmd_score(args, out: IO[str]) -> None:
    state = load_state(args.state, args.d)
    report = hardy_score(state)
    if args.format == "human":
        print(_report_human(report), file=out)
    else:
        print(report.to_json(include_state=args.with_state), file=out)


def cmd_optimize(args, out: IO[str]) -> None:
    if args.d is None:
        raise UsageError("optimize requires --d")
    seed = 0
    if args.restarts > 1:
        seed = _require_seed(args, "multi-start optimization")
    config = OptimizerConfig(
        d=args.d,
        symmetric=args.symmetric,
        restarts=args.restarts,
        step_tolerance=args.tol,
        seed=seed,
    )
    report = maximize_hardy(config)
    if args.format == "human":
        print(_report_human(report), file=out)
    else:
        print(report.to_json(include_state=True), file=out)


def _scan_values(args) -> list[int]:
    if args.d_values:
        return args.d_values
    if args.d is not None:
        return [args.d]
    if args.start is None or args.stop is None:
        raise UsageError("scan needs --from/--to or --d-values")
    if args.step < 1:
        raise UsageError("--step must be >= 1")
    return list(range(args.start, args.stop + 1, args.step))


def cmd_scan(args, out: IO[str]) -> None:
    cap = args.max_d_cap if args.max_d_cap is not None else SCAN_CAP
    rows = scan_approx(_scan_values(args), cap=cap)
    if args.format == "csv":
        write_scan_csv(rows, out)
    elif args.format == "json":
        payload = []
        for r in rows:
            item = {
                "d": r.d,
                "p_app": None if math.isnan(r.p_app) else r.p_app,
                "concurrence": None if math.isnan(r.concurrence_app) else r.concurrence_app,
                "wall_time_s": r.wall_time,
            }
            if r.error:
                item["error"] = r.error
            payload.append(item)
        print(json.dumps(payload), file=out)
    else:
        for r in rows:
            tail = f"  error: {r.error}" if r.error else ""
            print(f"d={r.d:6d}  P_app={r.p_app:.6f}  C_app={r.concurrence_app:.6f}  ({r.wall_time:.2f}s){tail}", file=out)
    failed = [r for r in rows if r.error]
    if failed:
        raise QuditError(f"{len(failed)} scan point(s) failed; first: d = {failed[0].d}: {failed[0].error}")


def cmd_lhv(args, out: IO[str]) -> None:
    if args.d is None:
        raise UsageError("lhv requires --d")
    cap = args.max_d_cap if args.max_d_cap is not None else LHV_CAP
    result = lhv_minimum(args.d, cap=cap)
    if args.format == "human":
        print(
            f"d = {result.d}: minimum {result.minimum:g} over {result.n_strategies} strategies, "
            f"{len(result.minimizers)} minimizers",
            file=out,
        )
    else:
        print(json.dumps(result.to_dict()), file=out)


def cmd_sample(args, out: IO[str]) -> None:
    seed = _require_seed(args, "sampling")
    state = load_state(args.state, args.d)
    counts = sample_outcomes(state, constructed_scenario(state), args.pair, args.samples, seed)
    if args.format == "human":
        print(f"pair {args.pair}, {args.samples} samples, seed {seed} (rows: Alice outcome)", file=out)
        for row in counts:
            print(" ".join(f"{c:8d}" for c in row), file=out)
    elif args.format == "csv":
        for row in counts:
            print(",".join(str(int(c)) for c in row), file=out)
    else:
        payload = {
            "d": state.d,
            "pair": args.pair,
            "n_samples": args.samples,
            "seed": seed,
            "counts": counts.astype(int).tolist(),
        }
        print(json.dumps(payload), file=out)


def cmd_catalog(args, out: IO[str]) -> None:
    if args.state.startswith("file:"):
        raise UsageError("catalog exports named states only")
    state = load_state(args.state, args.d)
    if args.format == "human":
        print(format_matrix(state.entries), file=out)
    else:
        print(state.to_json(), file=out)


def cmd_nogo(args, out: IO[str]) -> None:
    if args.d is None:
        raise UsageError("nogo requires --d")
    seed = _require_seed(args, "the no-go check")
    report = mes_nogo_check(args.d, trials=args.trials, seed=seed)
    if args.format == "human":
        verdict = "holds" if report.passed else "FAILS"
        print(
            f"d = {report.d}: max P(A2<B2) over {report.trials} trials = {report.max_score:.3e}, "
            f"max constraint residual {report.max_residual:.3e}, constructed score "
            f"{report.constructed_score:.3e}; no-go {verdict}",
            file=out,
        )
    else:
        print(json.dumps(report.to_dict()), file=out)
    if not report.passed:
        raise QuditError("maximally entangled state produced a nonzero Hardy probability")


COMMANDS = {
    "score": (cmd_score, ("json", "human")),
    "optimize": (cmd_optimize, ("json", "human")),
    "scan": (cmd_scan, ("csv", "json", "human")),
    "lhv": (cmd_lhv, ("json", "human")),
    "sample": (cmd_sample, ("json", "csv", "human")),
    "catalog": (cmd_catalog, ("json", "human")),
    "nogo": (cmd_nogo, ("json", "human")),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qudit-hardy", description="Generalized Hardy paradox for two qudits.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_format):
        p.add_argument("--d", type=int, help="local dimension")
        p.add_argument("--format", choices=COMMANDS[p.prog.split()[-1]][1], default=default_format)
        p.add_argument("--output", type=Path, help="write output to this file instead of stdout")
        p.add_argument("--seed", type=int, help="seed for randomized paths")

    p = sub.add_parser("score", help="Hardy probability with constraint-built measurements")
    common(p, "json")
    p.add_argument("--state", default="approx", help="optimal | approx | mes | file:<path>")
    p.add_argument("--with-state", action="store_true", help="embed the state in the JSON report")

    p = sub.add_parser("optimize", help="maximize P(A2<B2) over triangular states")
    common(p, "json")
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--tol", type=float, default=1e-10, help="step tolerance of the local search")
    p.add_argument("--symmetric", action="store_true", help="restrict to anti-diagonal symmetric states")

    p = sub.add_parser("scan", help="approximate-family scan over d (plot-ready CSV)")
    common(p, "csv")
    p.add_argument("--from", dest="start", type=int)
    p.add_argument("--to", dest="stop", type=int)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--d-values", type=int, nargs="+")
    p.add_argument("--max-d-cap", type=int)

    p = sub.add_parser("lhv", help="minimum of the Bell functional over deterministic strategies")
    common(p, "json")
    p.add_argument("--max-d-cap", type=int)

    p = sub.add_parser("sample", help="sample outcome counts for one setting pair")
    common(p, "json")
    p.add_argument("--state", default="optimal")
    p.add_argument("--pair", choices=SETTING_PAIRS, default="22")
    p.add_argument("--samples", type=int, default=10**6)

    p = sub.add_parser("catalog", help="export a named state in the JSON state format")
    common(p, "json")
    p.add_argument("--state", default="optimal")

    p = sub.add_parser("nogo", help="maximally-entangled-state no-go check")
    common(p, "json")
    p.add_argument("--trials", type=int, default=100)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = COMMANDS[args.command][0]
    out: IO[str]
    close = False
    if args.output is not None:
        out = open(args.output, "w")
        close = True
    else:
        out = sys.stdout
    try:
        handler(args, out)
    except UsageError as exc:
        parser.error(str(exc))
    except QuditError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    finally:
        if close:
            out.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
