import argparse
import logging
import sys
from typing import List, Optional

from trasonet.constants import LOG_FORMAT, LOG_LEVEL
from trasonet.harness.commands import cmd_ahp, cmd_estimate, cmd_recommend, cmd_simulate
from trasonet.models import Mode


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trasonet",
        description="Traffic-dependent vehicular networking: sensing, recommendation and access simulation",
    )
    parser.add_argument("--log-level", default=LOG_LEVEL, choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="Run the end-to-end simulation")
    simulate.add_argument("--config", required=True, help="Scenario config JSON")
    simulate.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.TrasoNET.value)
    simulate.add_argument("--seed", type=int, default=None, help="Override the config seed")
    simulate.add_argument("--out", default=None, help="Output directory, relative to TRASONET_OUTPUT_ROOT")
    simulate.add_argument("--replicas", type=int, default=1, help="Seeds to run concurrently, from --seed on")

    estimate = sub.add_parser("estimate", help="Complete a traffic matrix")
    estimate.add_argument("--reports", default=None, help="GPS reports CSV")
    estimate.add_argument("--config", default=None, help="Scenario config JSON giving the road network")
    estimate.add_argument("--synthetic", action="store_true", help="Use a synthetic low-rank matrix")
    estimate.add_argument("--rows", type=int, default=100)
    estimate.add_argument("--cols", type=int, default=96)
    estimate.add_argument("--rank", type=int, default=4)
    estimate.add_argument("--sample-rate", type=float, default=0.3)
    estimate.add_argument("--noise", type=float, default=0.0, help="Observation noise in km/h")
    estimate.add_argument("--seed", type=int, default=2013)
    estimate.add_argument("--seeds", type=int, default=1, help="Seeds per sweep rate")
    estimate.add_argument("--sweep", default=None, help="e.g. sample_rate=0.1,0.2,0.3,0.4,0.5")
    estimate.add_argument("--max-iterations", type=int, default=None)
    estimate.add_argument("--tol", type=float, default=None)
    estimate.add_argument("--out", default=None)

    recommend = sub.add_parser("recommend", help="Write the per-cell network recommendation map")
    recommend.add_argument("--config", required=True)
    recommend.add_argument("--estimate", default=None, help="estimate.csv written by `estimate`")
    recommend.add_argument("--fresh", action="store_true", help="Sense and complete the traffic first")
    recommend.add_argument("--out", default=None)

    ahp = sub.add_parser("ahp", help="Priority vector and consistency of a comparison matrix")
    ahp.add_argument("matrix", help="Comparison matrix CSV, cells like 3, 0.2 or 1/5")
    return parser


def configure_logging(level: str):
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=LOG_FORMAT, stream=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)

    if args.command == "simulate":
        return cmd_simulate(args.config, mode=args.mode, seed=args.seed, out=args.out, replicas=args.replicas)
    if args.command == "estimate":
        return cmd_estimate(
            out=args.out,
            reports_path=args.reports,
            config_path=args.config,
            synthetic=args.synthetic,
            n_rows=args.rows,
            n_cols=args.cols,
            rank=args.rank,
            sample_rate=args.sample_rate,
            noise_kmh=args.noise,
            seed=args.seed,
            n_seeds=args.seeds,
            sweep=args.sweep,
            max_iterations=args.max_iterations,
            tol=args.tol,
        )
    if args.command == "recommend":
        return cmd_recommend(args.config, estimate_path=args.estimate, fresh=args.fresh, out=args.out)
    return cmd_ahp(args.matrix)


if __name__ == "__main__":
    sys.exit(main())
