"""Command-line workbench.

Exit status: 0 success, 2 configuration error, 3 solver degeneracy,
4 reproduction check failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import commands
from .config import ScenarioConfig
from .distributions import distribution_from_config
from .exceptions import BracketError, DegenerateDenominatorError, InvalidInputError
from .model import Classifier
from .presets import PRESETS, reproduce

EXIT_OK, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_REPRODUCTION = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage mistakes count as configuration errors
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="write the full-precision report as JSON")
    common.add_argument("--csv", metavar="PATH", help="write a CSV trace where the command has one")
    common.add_argument("--oracle", action="store_true", help="append brute-force cross-checks")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--grid", type=int, default=401, help="oracle lattice resolution (default 401)")

    with_config = argparse.ArgumentParser(add_help=False, parents=[common])
    with_config.add_argument("--config", metavar="PATH", required=True, help="scenario JSON file")

    p = _Parser(prog="algostakes", description="Classifier design with democratically chosen rewards.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("designer", parents=[with_config], help="designer best response at a reward")
    d.add_argument("--reward", type=float, help="reward level (default: config options.reward)")

    r = sub.add_parser("rewards", parents=[with_config], help="voters' preferred thresholds and rewards")
    r.add_argument("--classifier", type=float, nargs=2, metavar=("D1", "D0"))

    sub.add_parser("equilibria", parents=[with_config], help="enumerate and verify equilibria")

    c = sub.add_parser("compare", parents=[with_config], help="equilibrium vs an exogenous reward")
    c.add_argument("--reward", type=float, required=True)

    rp = sub.add_parser("reproduce", parents=[common], help="run a bundled reference scenario")
    rp.add_argument("example", choices=sorted(PRESETS))

    s = sub.add_parser("simulate", parents=[with_config], help="finite-population Monte Carlo")
    s.add_argument("--classifier", type=float, nargs=2, metavar=("D1", "D0"), required=True)
    s.add_argument("--reward", type=float, required=True)
    s.add_argument("--agents", type=int, default=100_000)
    s.add_argument("--workers", type=int, default=1)

    k = sub.add_parser("check-dist", parents=[common], help="check log-concavity on a grid")
    k.add_argument("--config", metavar="PATH", help="take the distribution from a scenario file")
    k.add_argument("--family", default="normal")
    k.add_argument("--location", type=float, default=0.0)
    k.add_argument("--scale", type=float, default=1.0)
    k.add_argument("--range", type=float, nargs=2, default=(-8.0, 8.0), metavar=("LO", "HI"))
    k.add_argument("--points", type=int, default=1601)
    return p


def _run(args: argparse.Namespace) -> tuple[commands.RunReport, int]:
    status = EXIT_OK
    if args.command == "reproduce":
        out = reproduce(args.example, csv_path=args.csv)
        return out.report, (EXIT_OK if out.ok else EXIT_REPRODUCTION)
    if args.command == "check-dist":
        if args.config:
            dist = distribution_from_config(ScenarioConfig.load(args.config).distribution)
        else:
            dist = distribution_from_config(
                {"family": args.family, "location": args.location, "scale": args.scale}
            )
        return commands.check_dist_report(dist, args.range[0], args.range[1], args.points), status

    cfg = ScenarioConfig.load(args.config)
    scen = cfg.to_scenario()
    if args.command == "designer":
        reward = args.reward if args.reward is not None else cfg.options.get("reward")
        if reward is None:
            raise InvalidInputError("designer needs --reward or options.reward in the config")
        rep = commands.designer_report(scen, float(reward), args.oracle, args.grid)
    elif args.command == "rewards":
        c = Classifier(*args.classifier) if args.classifier else None
        rep = commands.rewards_report(scen, c)
    elif args.command == "equilibria":
        rep = commands.equilibria_report(scen, args.oracle, args.grid)
    elif args.command == "compare":
        rep = commands.compare_report(scen, args.reward)
    else:
        rep = commands.simulate_report(
            scen, Classifier(*args.classifier), args.reward, args.agents, args.seed,
            workers=args.workers, csv_path=args.csv,
        )
    return rep, status


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rep, status = _run(args)
    except InvalidInputError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DegenerateDenominatorError, BracketError) as exc:
        print(f"solver degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    print(rep.render())
    if args.json:
        rep.write_json(args.json)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
