"""Command-line surface: experiments, single evaluations, and replay.

Exit codes: 0 all requested computations completed; 1 an --assert mode
statistical expectation or a replay digest comparison failed; 2 usage error;
3 domain/precondition error; 4 I/O error.  Statistical outcomes are reported,
never enforced, unless --assert is given.

Every run that writes data writes its manifest first, then the CSVs, then
finalizes the manifest with their digests; all file writes go to a temp name
and are renamed into place.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__, dirichlet, mellin
from .errors import DomainError
from .experiments import (
    ExperimentConfig,
    assert_outcome,
    replay_experiment,
    run_experiment,
    write_experiment,
)
from .output import atomic_write, fmt_float, sha256_text
from .primes import build_spf_sieve
from .series import Model, compute_series, detect_sign_changes, series_csv, sign_changes_csv
from .signs import MultiplicativeEvaluator, SignAssignment, SignMode, load_explicit_signs


def _add_assignment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="seed for the iid sign assignment")
    parser.add_argument(
        "--minus-one",
        action="store_true",
        help="use the deterministic all-minus-one assignment (Moebius/Liouville mode)",
    )
    parser.add_argument(
        "--signs-file",
        type=str,
        default=None,
        help="two-column 'p sign' text file for an explicit assignment",
    )


def _assignment_from_args(args) -> SignAssignment:
    if args.signs_file:
        return SignAssignment.explicit(load_explicit_signs(args.signs_file))
    if args.minus_one:
        return SignAssignment.all_minus_one()
    return SignAssignment.iid(args.seed)


def _add_experiment_flags(parser: argparse.ArgumentParser, model: bool = True) -> None:
    if model:
        parser.add_argument("--model", choices=["f", "fstar"], default="f")
        parser.add_argument("--alpha", type=float, default=0.0)
    parser.add_argument("--limit", type=int, default=10**6, help="partial-sum cutoff N")
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--seed", type=int, default=42, help="experiment base seed")
    parser.add_argument(
        "--minus-one",
        action="store_true",
        help="deterministic all-minus-one signs in every trial",
    )
    parser.add_argument("--threads", type=int, default=None, help="worker count (default: all cores, or RMF_LAB_THREADS)")
    parser.add_argument("--out", type=str, required=True, help="output directory")
    parser.add_argument(
        "--assert",
        dest="assert_mode",
        action="store_true",
        help="fail (exit 1) if the statistical expectation does not hold",
    )


def _sigma_grid(text: str | None):
    if text is None:
        return None
    return tuple(float(x) for x in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmflab",
        description="Numerical experiments on random multiplicative functions",
    )
    parser.add_argument("--version", action="version", version=f"rmflab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("series", help="one weighted partial-sum series plus its sign changes")
    p.add_argument("--model", choices=["f", "fstar"], default="f")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--limit", type=int, required=True)
    _add_assignment_flags(p)
    p.add_argument("--out", type=str, required=True)

    p = sub.add_parser("sign-changes", help="sign-change census across trials")
    _add_experiment_flags(p)

    p = sub.add_parser("positivity", help="positivity probability of harmonic fstar sums")
    _add_experiment_flags(p, model=False)

    p = sub.add_parser("harper", help="sup scan of the prime cosine sum across trials")
    _add_experiment_flags(p, model=False)
    p.add_argument("--sigma-grid", type=str, default=None, help="comma-separated, strictly decreasing")
    p.add_argument("--prime-limit", type=int, default=10**6)
    p.add_argument("--grid-step", type=float, default=None)

    p = sub.add_parser("divergence", help="signed vs absolute Mellin integral comparison")
    _add_experiment_flags(p)
    p.add_argument("--sigma-grid", type=str, default=None)
    p.add_argument("--prime-limit", type=int, default=10**6)
    p.add_argument("--grid-step", type=float, default=None)

    p = sub.add_parser("growth", help="growth-envelope statistics (reporting only)")
    _add_experiment_flags(p, model=False)

    p = sub.add_parser("euler", help="evaluate a truncated Euler product at one point")
    p.add_argument("--model", choices=["f", "fstar"], default="f")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--prime-limit", type=int, default=10**5)
    _add_assignment_flags(p)

    p = sub.add_parser("mellin-check", help="residual of the truncated partial-summation identity")
    p.add_argument("--model", choices=["f", "fstar"], default="f")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--limit", type=int, required=True)
    _add_assignment_flags(p)

    p = sub.add_parser("replay", help="re-run a manifest and compare CSV digests")
    p.add_argument("--manifest", type=str, required=True)

    return parser


def _run_series(args) -> int:
    assignment = _assignment_from_args(args)
    start = time.monotonic()
    series = compute_series(assignment, args.model, args.alpha, args.limit)
    log = detect_sign_changes(series)
    outdir = os.path.abspath(args.out)
    manifest_path = os.path.join(outdir, "manifest.json")
    manifest = {
        "command": "series",
        "model": args.model,
        "alpha": args.alpha,
        "limit": args.limit,
        "sign_mode": assignment.mode.value,
        "seed": args.seed,
        "signs_file": args.signs_file,
        "tool_version": __version__,
        "csv_sha256": None,
        "wall_time_seconds": None,
    }
    atomic_write(manifest_path, json.dumps(manifest, indent=2) + "\n")
    series_text = series_csv(series)
    changes_text = sign_changes_csv(log)
    atomic_write(os.path.join(outdir, "series.csv"), series_text)
    atomic_write(os.path.join(outdir, "sign_changes.csv"), changes_text)
    manifest["csv_sha256"] = {
        "series.csv": sha256_text(series_text),
        "sign_changes.csv": sha256_text(changes_text),
    }
    manifest["wall_time_seconds"] = time.monotonic() - start
    atomic_write(manifest_path, json.dumps(manifest, indent=2) + "\n")
    print(
        f"series model={args.model} alpha={args.alpha} N={args.limit}: "
        f"M(N)={fmt_float(series.values[args.limit])} max|M|={fmt_float(series.max_abs)} "
        f"at x={series.argmax}, {log.count} sign changes -> {outdir}"
    )
    return 0


def _replay_series(manifest: dict) -> tuple[bool, str]:
    mode = SignMode(manifest["sign_mode"])
    if mode is SignMode.IID_RADEMACHER:
        assignment = SignAssignment.iid(int(manifest["seed"]))
    elif mode is SignMode.ALL_MINUS_ONE:
        assignment = SignAssignment.all_minus_one()
    else:
        assignment = SignAssignment.explicit(load_explicit_signs(manifest["signs_file"]))
    series = compute_series(assignment, manifest["model"], float(manifest["alpha"]), int(manifest["limit"]))
    log = detect_sign_changes(series)
    recomputed = {
        "series.csv": sha256_text(series_csv(series)),
        "sign_changes.csv": sha256_text(sign_changes_csv(log)),
    }
    recorded = manifest.get("csv_sha256") or {}
    ok = recomputed == recorded
    return ok, f"recorded={recorded} recomputed={recomputed}"


def _run_experiment_command(args) -> int:
    sigma_grid = _sigma_grid(getattr(args, "sigma_grid", None))
    model = getattr(args, "model", None)
    alpha = getattr(args, "alpha", None)
    if args.command == "positivity":
        model, alpha = "fstar", 1.0
    elif args.command in ("growth", "harper"):
        model, alpha = "f", 0.0
    config = ExperimentConfig(
        experiment=args.command,
        model=Model(model),
        alpha=float(alpha),
        limit=args.limit,
        trials=args.trials,
        base_seed=args.seed,
        sign_mode=SignMode.ALL_MINUS_ONE if args.minus_one else SignMode.IID_RADEMACHER,
        sigma_grid=sigma_grid,
        prime_limit=getattr(args, "prime_limit", None),
        grid_step=getattr(args, "grid_step", None),
        threads=args.threads,
        output_path=args.out,
    )
    start = time.monotonic()
    stats = run_experiment(config)
    manifest_path, csv_path = write_experiment(stats, wall_time=time.monotonic() - start)
    print(f"{args.command}: {config.trials} trials -> {csv_path}")
    print(f"summary: {json.dumps(stats.summary)}")
    if args.assert_mode:
        ok, message = assert_outcome(stats)
        print(f"assert: {'PASS' if ok else 'FAIL'} ({message})")
        return 0 if ok else 1
    return 0


def _run_euler(args) -> int:
    assignment = _assignment_from_args(args)
    s = complex(args.sigma, args.t)
    if args.model == "f":
        result = dirichlet.euler_product_F(assignment, s, args.prime_limit)
    else:
        result = dirichlet.euler_product_F_star(assignment, s, args.prime_limit)
    print(
        f"model={args.model} s={fmt_float(args.sigma)}+{fmt_float(args.t)}i "
        f"prime_limit={args.prime_limit}"
    )
    print(
        f"value={fmt_float(result.value.real)}{'+' if result.value.imag >= 0 else '-'}"
        f"{fmt_float(abs(result.value.imag))}i abs={fmt_float(abs(result.value))} "
        f"last_factor_deviation={fmt_float(result.last_factor_deviation)}"
    )
    return 0


def _run_mellin_check(args) -> int:
    assignment = _assignment_from_args(args)
    s = complex(args.sigma, args.t)
    residual = mellin.truncated_identity_residual(
        assignment, args.model, args.alpha, s, args.limit
    )
    table = build_spf_sieve(max(args.limit, 2))
    evaluator = MultiplicativeEvaluator(assignment, table)
    g = evaluator.values_up_to(args.limit, args.model).astype(np.float64)[1:]
    n = np.arange(1, args.limit + 1, dtype=np.float64)
    scale = abs(complex(np.sum(g * n ** (-s)))) + 1.0
    print(
        f"model={args.model} alpha={fmt_float(args.alpha)} s={fmt_float(args.sigma)}"
        f"+{fmt_float(args.t)}i N={args.limit}"
    )
    print(f"residual={fmt_float(residual)} relative={fmt_float(residual / scale)}")
    return 0


def _run_replay(args) -> int:
    with open(args.manifest, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    if "experiment" in manifest:
        ok, recorded, recomputed = replay_experiment(args.manifest)
        detail = f"recorded={recorded} recomputed={recomputed}"
    elif manifest.get("command") == "series":
        ok, detail = _replay_series(manifest)
    else:
        raise DomainError(f"{args.manifest}: not a replayable manifest")
    print(f"replay: {'MATCH' if ok else 'MISMATCH'} ({detail})")
    return 0 if ok else 1


def parse_and_dispatch(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        if args.command == "series":
            return _run_series(args)
        if args.command in ("sign-changes", "positivity", "harper", "divergence", "growth"):
            return _run_experiment_command(args)
        if args.command == "euler":
            return _run_euler(args)
        if args.command == "mellin-check":
            return _run_mellin_check(args)
        if args.command == "replay":
            return _run_replay(args)
        parser.error(f"unknown command {args.command!r}")
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4


def main() -> None:
    sys.exit(parse_and_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
