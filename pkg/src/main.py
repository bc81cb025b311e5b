#!/usr/bin/env python3
"""
tickbound - Quantum Ticking Clock Simulator
Command-line entry point

Usage:
    python src/main.py build --builder exponential --gamma 1 --out exp.json
    python src/main.py simulate --model exp.json --out runs/exp
    python src/main.py stats --model exp.json
    python src/main.py sweep --builder ladder --d-values 2 3 4 5 6 --out ladder.csv
    python src/main.py verify --seed 7 --n-models 200 --workers 4
    python src/main.py trajectories --model exp.json --n-traj 100000 --seed 42 --out runs/exp_mc

Exit codes: 0 success, 1 usage or parse error, 2 not converged, 3 invariant-suite failure.
"""

import argparse
import logging
import os
import sys

# Add current directory to Python path so `modules` and `config` import from anywhere
current_dir = os.path.dirname(os.path.abspath(__file__))
if current_dir not in sys.path:
    sys.path.insert(0, current_dir)

from modules.cli import (  # noqa: E402
    EXIT_USAGE,
    cmd_build,
    cmd_simulate,
    cmd_stats,
    cmd_sweep,
    cmd_trajectories,
    cmd_verify,
    run_command,
)

logger = logging.getLogger("tickbound")


class TickboundArgumentParser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; 2 means "not converged" here"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_integration_flags(parser):
    group = parser.add_argument_group("integration")
    group.add_argument("--abs-tol", type=float, help="Absolute integrator tolerance (default 1e-10)")
    group.add_argument("--rel-tol", type=float, help="Relative integrator tolerance (default 1e-8)")
    group.add_argument("--survival-cutoff", type=float, help="Stop once survival drops to this value (default 1e-9)")
    group.add_argument("--max-horizon", type=float, help="Absolute time horizon (default 1e4 / Gamma)")


def _add_ladder_flags(parser):
    group = parser.add_argument_group("ladder clock")
    group.add_argument("--g", type=float, help="Machine-ladder interaction strength")
    group.add_argument("--beta-c", type=float, help="Cold bath inverse temperature (inf allowed)")
    group.add_argument("--beta-h", type=float, help="Hot bath inverse temperature")
    group.add_argument("--omega-c", type=float, help="Cold qubit splitting")
    group.add_argument("--omega-h", type=float, help="Hot qubit splitting")
    group.add_argument("--omega-l", type=float, help="Ladder spacing")
    group.add_argument("--gamma-c", type=float, help="Cold bath coupling rate")
    group.add_argument("--gamma-h", type=float, help="Hot bath coupling rate")
    group.add_argument("--gamma-tick", type=float, help="Ladder decay (tick) rate")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = TickboundArgumentParser(description="Quantum ticking clock simulator and trade-off verifier")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    subparsers = parser.add_subparsers(dest="command", help="Available commands", parser_class=TickboundArgumentParser)

    simulate = subparsers.add_parser("simulate", help="Write the no-tick time series of a model")
    simulate.add_argument("--model", required=True, help="Model or oracle document")
    simulate.add_argument("--out", required=True, help="Output prefix")
    _add_integration_flags(simulate)
    simulate.set_defaults(handler=cmd_simulate)

    stats = subparsers.add_parser("stats", help="Print tick statistics as JSON")
    stats.add_argument("--model", required=True, help="Model or oracle document")
    stats.add_argument("--out", help="Output prefix for the manifest (embedded in stdout otherwise)")
    stats.add_argument("--n-ticks", type=_positive_int, default=1, help="Per-tick statistics of ticks 1..N")
    stats.add_argument("--reset-policy", choices=["jump_conditioned", "fixed_state"], default="jump_conditioned")
    _add_integration_flags(stats)
    stats.set_defaults(handler=cmd_stats)

    sweep = subparsers.add_parser("sweep", help="Accuracy against resolution over a parameter grid")
    sweep.add_argument("--builder", choices=["ladder", "erlang", "heaviside"], required=True)
    sweep.add_argument("--out", required=True, help="Output CSV path")
    sweep.add_argument("--d-values", "--d", dest="d_values", type=int, nargs="+", help="Ladder dimensions (default 2..6)")
    sweep.add_argument("--m-values", "--m", dest="m_values", type=int, nargs="+", help="Erlang orders (default 1..64)")
    sweep.add_argument("--t0-values", "--t0", dest="t0_values", type=float, nargs="+", help="Heaviside onsets (default 0..10)")
    sweep.add_argument("--gamma", type=float, default=1.0, help="Oracle rate")
    sweep.add_argument("--workers", type=_positive_int, help="Worker processes for ladder points")
    _add_ladder_flags(sweep)
    _add_integration_flags(sweep)
    sweep.set_defaults(handler=cmd_sweep)

    verify = subparsers.add_parser("verify", help="Run the randomized invariant suite")
    verify.add_argument("--seed", type=int, default=7)
    verify.add_argument("--n-models", type=int, default=200)
    verify.add_argument("--workers", type=_positive_int, help="Worker processes")
    verify.add_argument("--inject-bug", action="store_true", help="Flip the tick anticommutator sign (harness self-test)")
    verify.add_argument("--out", help="Output prefix for the report and manifest")
    _add_integration_flags(verify)
    verify.set_defaults(handler=cmd_verify)

    trajectories = subparsers.add_parser("trajectories", help="Sample tick times by quantum-jump Monte Carlo")
    trajectories.add_argument("--model", required=True, help="Model document")
    trajectories.add_argument("--n-traj", type=_positive_int, default=100000)
    trajectories.add_argument("--seed", type=int, default=42)
    trajectories.add_argument("--max-ticks", type=_positive_int, default=1)
    trajectories.add_argument("--out", required=True, help="Output prefix")
    trajectories.add_argument("--workers", type=_positive_int, help="Sampler processes")
    _add_integration_flags(trajectories)
    trajectories.set_defaults(handler=cmd_trajectories)

    build = subparsers.add_parser("build", help="Write a model or oracle document")
    build.add_argument(
        "--builder",
        choices=["exponential", "rabi", "cascade", "ladder", "random", "erlang", "heaviside"],
        required=True,
    )
    build.add_argument("--out", required=True, help="Output JSON path")
    build.add_argument("--gamma", type=float, default=1.0, help="Tick rate")
    build.add_argument("--omega", type=float, default=5.0, help="Rabi frequency")
    build.add_argument("--m", type=_positive_int, default=4, help="Cascade or Erlang order")
    build.add_argument("--t0", type=float, default=0.0, help="Heaviside onset")
    build.add_argument("--d", type=int, default=3, help="Ladder dimension")
    build.add_argument("--seed", type=int, default=0, help="Random clock seed")
    _add_ladder_flags(build)
    build.set_defaults(handler=cmd_build)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )

    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    try:
        return run_command(args.handler, args)
    except KeyboardInterrupt:
        logger.error("❌ Cancelled by user")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
