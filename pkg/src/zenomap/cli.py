"""Command-line entry points.

Exit codes: 0 success, 2 configuration error, 3 numerical failure
(probability reached the window edge), 4 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from typing import Optional, Sequence

from .classical import ClassicalEnsemble, ensemble_diffusion
from .errors import ConfigError, TruncationOverflowError
from .runner import (
    emit_chart,
    parse_config,
    render_csv,
    run_experiment,
    write_csv,
)
from .two_level import monte_carlo_measured_evolve, zeno_survival, ProbabilityPair

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zenomap",
        description=(
            "Kicked-rotator quantum maps under repeated measurement, "
            "two-level survival experiments, and a classical ensemble baseline."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a config-driven experiment")
    run.add_argument("config", help="path to a 'key = value' run document")
    run.add_argument("--preset", choices=("a", "b", "c", "d"),
                     help="measurement scenario preset")
    run.add_argument("--seed", type=int, help="override the config seed")
    run.add_argument("--out", help="CSV output path (default: config output_path, else stdout)")
    run.add_argument("--svg", action="store_true", help="also write an SVG chart next to the CSV")
    run.set_defaults(func=_cmd_run)

    zeno = sub.add_parser("zeno", help="two-level survival under n measured segments")
    zeno.add_argument("--n", type=int, required=True, help="number of drive segments")
    zeno.add_argument("--trials", type=int, default=100_000, help="Monte-Carlo trials")
    zeno.add_argument("--seed", type=int, default=0)
    zeno.add_argument("--out", help="write results as CSV instead of a text summary")
    zeno.set_defaults(func=_cmd_zeno)

    classical = sub.add_parser("classical", help="standard-map ensemble diffusion")
    classical.add_argument("--particles", type=int, default=10_000)
    classical.add_argument("--steps", type=int, default=200)
    classical.add_argument("--k", type=float, default=10.0)
    classical.add_argument("--tau", type=float, default=1.0)
    classical.add_argument("--i0", type=float, default=500.0)
    classical.add_argument("--seed", type=int, default=0)
    classical.set_defaults(func=_cmd_classical)
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    with open(args.config, "r", encoding="utf-8") as handle:
        text = handle.read()
    config = parse_config(text)
    if args.preset:
        config = config.with_preset(args.preset)
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    if args.out:
        config = dataclasses.replace(config, output_path=args.out)
    if args.svg:
        config = dataclasses.replace(config, emit_svg=True)
    if config.emit_svg and config.output_path is None:
        raise ConfigError("an SVG chart needs an output path; pass --out")
    record = run_experiment(config)
    out = config.output_path
    if out is None:
        sys.stdout.write(render_csv(record.aggregate))
        return EXIT_OK
    write_csv(record, out)
    print(f"wrote {out} ({config.realizations} realization(s), "
          f"{record.wall_time:.2f}s)")
    if config.emit_svg:
        svg_path = _with_suffix(out, ".svg")
        emit_chart([record], svg_path)
        print(f"wrote {svg_path}")
    return EXIT_OK


def _with_suffix(path: str, suffix: str) -> str:
    root = path[:-4] if path.lower().endswith(".csv") else path
    return root + suffix


def _cmd_zeno(args: argparse.Namespace) -> int:
    n = args.n
    if n < 1:
        raise ConfigError(f"--n must be >= 1, got {n}")
    closed = zeno_survival(n)
    exp_approx = 0.5 * (1.0 - math.exp(-math.pi**2 / (2.0 * n)))
    leading = math.pi**2 / (4.0 * n)
    phi = math.pi / (2.0 * n)
    mc = monte_carlo_measured_evolve(ProbabilityPair(1.0, 0.0), phi, n, args.trials, args.seed)
    stderr = math.sqrt(max(closed.p2 * (1.0 - closed.p2), 1e-300) / args.trials)
    if args.out:
        lines = [
            "n,p1_closed,p2_closed,p2_exponential,p2_leading,p1_mc,p2_mc,mc_se",
            f"{n},{closed.p1!r},{closed.p2!r},{exp_approx!r},{leading!r},"
            f"{mc.p1!r},{mc.p2!r},{stderr!r}",
        ]
        with open(args.out, "w", encoding="utf-8", newline="\n") as handle:
            handle.write("\n".join(lines) + "\n")
        print(f"wrote {args.out}")
        return EXIT_OK
    print(f"segments:              n = {n}")
    print(f"closed form:           p1 = {closed.p1:.6f}  p2 = {closed.p2:.6f}")
    print(f"exponential estimate:  p2 ~ {exp_approx:.6f}")
    print(f"leading order:         p2 ~ {leading:.6f}")
    print(f"monte carlo ({args.trials} trials): p1 = {mc.p1:.6f}  p2 = {mc.p2:.6f}"
          f"  (se ~ {stderr:.2e})")
    return EXIT_OK


def _cmd_classical(args: argparse.Namespace) -> int:
    ensemble = ClassicalEnsemble.prepared(args.particles, args.i0, args.tau, args.k)
    estimate = ensemble_diffusion(ensemble, args.steps, args.seed)
    quasilinear = args.k**2 / (4.0 * args.tau)
    print(f"K = tau*k = {ensemble.K:g}  (chaotic: {ensemble.chaotic})")
    print(f"diffusion estimate:   B = {estimate:.4f}  "
          f"({args.particles} particles, {args.steps} steps)")
    print(f"quasilinear value:    k^2/(4 tau) = {quasilinear:.4f}")
    if quasilinear > 0:
        print(f"ratio:                {estimate / quasilinear:.4f}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except TruncationOverflowError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_IO
    except ValueError as err:
        print(f"invalid arguments: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
