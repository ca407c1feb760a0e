import argparse
import sys
from pathlib import Path

from .modules import config
from .modules.capture import Capture
from .modules.enumeration import global_optimum
from .modules.errors import OpisdError
from .modules.harness import (
    ExperimentConfig,
    RunArchive,
    compare,
    emit_cdf_data,
    load_comparison,
    run_experiment,
    write_report,
)
from .modules.network import count_radial_configs, load_network
from .modules.utils.log import configure_logging, log_error


def cmd_count(args):
    print(count_radial_configs(load_network(args.network)))


def cmd_enumerate(args):
    net = load_network(args.network)
    result = global_optimum(net, budget=args.budget, progress=not args.quiet)
    print(f"y_g = {result.y_g!r}")
    print(f"feasible = {result.enumerated}, infeasible = {result.infeasible}, optimal = {len(result.optimal_configs)}")
    for cfg in result.optimal_configs:
        print("open: " + " ".join(net.ordered(cfg.open_ids)))


def cmd_solve(args):
    cfg = ExperimentConfig.load(args.experiment)
    if args.workers is not None:
        cfg = ExperimentConfig.from_mapping({**cfg.to_document(), "workers": args.workers})
    archive = run_experiment(cfg, progress=not args.quiet)
    print(archive.directory)


def cmd_compare(args):
    archive = RunArchive.load(args.archive)
    report = compare(archive, args.mode, args.y_g, args.eps, args.budget, progress=not args.quiet)
    out = write_report(report, args.out or args.archive, Capture.solution_sets(archive.frame))
    for record in report.records:
        perc = "" if record.perc is None else f"  PERC {record.perc:6.2f}%"
        print(f"{record.rank:3d}  {record.label:<20} OPISD {record.opisd:.4f}  area {record.area:.6g}{perc}")
    print(out / config.REPORT_JSON_FILE)


def cmd_emit_cdf(args):
    archive = RunArchive.load(args.archive)
    report = load_comparison(archive, args.comparison)
    for path in emit_cdf_data(report, args.out or Path(args.comparison).parent):
        print(path)


def _add_count(parser):
    parser.add_argument("network", help="network JSON document")


def _add_enumerate(parser):
    parser.add_argument("network", help="network JSON document")
    parser.add_argument("--budget", type=int, default=config.DEFAULT_ENUMERATION_BUDGET,
                        help="abort when the network has more radial configurations")


def _add_solve(parser):
    parser.add_argument("experiment", help="experiment JSON document")
    parser.add_argument("--workers", type=int, default=None, help="override the number of worker processes")


def _add_compare(parser):
    parser.add_argument("archive", help="archive directory written by solve")
    parser.add_argument("--mode", choices=["G", "R"], required=True)
    parser.add_argument("--y-g", dest="y_g", type=float, default=None, help="declared global optimum (mode G)")
    parser.add_argument("--eps", type=float, default=0.0, help="match tolerance for PERC")
    parser.add_argument("--budget", type=int, default=None, help="enumeration budget when y_g is resolved")
    parser.add_argument("--out", default=None, help="report directory (default: the archive)")


def _add_emit_cdf(parser):
    parser.add_argument("archive", help="archive directory written by solve")
    parser.add_argument("comparison", help="report.json written by compare")
    parser.add_argument("--out", default=None, help="output directory (default: next to the report)")


# (name, handler, add_arguments, help)
command_definitions = [
    ("count", cmd_count, _add_count, "print the number of radial configurations"),
    ("enumerate", cmd_enumerate, _add_enumerate, "enumerate all radial configurations and print the global optimum"),
    ("solve", cmd_solve, _add_solve, "run an experiment and write its archive"),
    ("compare", cmd_compare, _add_compare, "rank the archived solvers"),
    ("emit-cdf", cmd_emit_cdf, _add_emit_cdf, "write plot-ready CDF breakpoints"),
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opisd", description="Stochastic-dominance ranking of network reconfiguration solvers")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging")
    parser.add_argument("-q", "--quiet", action="count", default=0, help="less logging, no progress bars")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, handler, add_arguments, help_text in command_definitions:
        sub = subparsers.add_parser(name, help=help_text)
        add_arguments(sub)
        sub.set_defaults(handler=handler)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose - args.quiet)
    try:
        args.handler(args)
    except (OpisdError, OSError) as e:
        log_error(str(e))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
