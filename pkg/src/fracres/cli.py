"""``fracres`` command line.

Exit codes: 0 success, 1 usage or parse error, 2 numerical abort.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

from .basis import Sector, dimension_count, enumerate_basis
from .evolution import IntegrationError
from .resonance import free_transitions, resonance_table
from .runner import (compare_table, csv_columns, format_summary, run_pair, run_scenario,
                     series_table, summarize, write_csv)
from .scenario import ScenarioError, defaults_help, parse_scenario, shipped_scenarios
from .svgplot import PlotError, plot_csv

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_out(scenario: str, suffix: str) -> Path:
    return Path(Path(scenario).stem + suffix)


def cmd_simulate(args) -> int:
    config = parse_scenario(args.scenario)
    series = run_scenario(config)
    out = Path(args.out) if args.out else _default_out(args.scenario, ".csv")
    write_csv(out, csv_columns(series), series_table(series))
    print(f"wrote {out}")
    print(format_summary(summarize(config, series, config.open_system)))
    return EXIT_OK


def cmd_compare(args) -> int:
    config = parse_scenario(args.scenario)
    closed, opened = run_pair(config)
    columns, table, deviations = compare_table(closed, opened)
    out = Path(args.out) if args.out else _default_out(args.scenario, "_compare.csv")
    write_csv(out, columns, table)
    print(f"wrote {out}")
    for name, dev in deviations.items():
        print(f"max |{name} - {name}^D| = {dev:.6g}")
    return EXIT_OK


def resonance_report(config) -> dict:
    initial = config.initial_config
    rows = resonance_table(initial, config.m_max, config.drive_ratio)
    free = [{"from_site": e.from_site, "to_site": e.to_site} for e in free_transitions(initial)]
    return {"initial": list(initial), "m_max": config.m_max, "drive_over_U": config.drive_ratio,
            "resonances": rows, "free_transitions": free}


def cmd_resonances(args) -> int:
    config = parse_scenario(args.scenario)
    if args.m_max is not None:
        if args.m_max < 1:
            raise UsageError("--m-max must be >= 1")
        config = replace(config, m_max=args.m_max)
    report = resonance_report(config)
    if args.json:
        print(json.dumps(report, indent=2))
        return EXIT_OK
    print(f"initial {tuple(report['initial'])}, m_max = {report['m_max']}, "
          f"drive Omega/U = {report['drive_over_U']:g}")
    if not report["resonances"]:
        print("no resonances")
    for row in report["resonances"]:
        flag = "  <- configured drive" if row.get("matches_drive") else ""
        print(f"  Omega/U = {row['fraction']:<6} {row['kind']:<10} order {row['order']}  "
              f"multiplicity {row['multiplicity']}{flag}")
    if report["free_transitions"]:
        moves = ", ".join(f"{f['from_site']}->{f['to_site']}" for f in report["free_transitions"])
        print(f"zero-energy moves: {moves}")
    return EXIT_OK


def dims_report(L: int, n_max: int) -> dict:
    full = enumerate_basis(L, n_max, Sector.full())
    sectors = {N: enumerate_basis(L, n_max, Sector.fixed_n(N)).size for N in range(L * n_max + 1)}
    unrestricted = {N: dimension_count(N, L) for N in range(L * n_max + 1)}
    return {"L": L, "n_max": n_max, "full": full.size, "sectors": sectors,
            "unrestricted": unrestricted}


def cmd_dims(args) -> int:
    if args.L < 1 or args.n_max < 0:
        raise UsageError("need L >= 1 and n_max >= 0")
    report = dims_report(args.L, args.n_max)
    print(f"L = {args.L}, n_max = {args.n_max}: full dimension {report['full']}")
    for N, size in report["sectors"].items():
        print(f"  N = {N:<3} {size:>8}   (D_N,L without cutoff: {report['unrestricted'][N]})")
    return EXIT_OK


def cmd_plot(args) -> int:
    names = [c.strip() for c in args.cols.split(",") if c.strip()]
    out = plot_csv(args.csv, names, args.out)
    print(f"wrote {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fracres", description="Driven Bose-Hubbard chains, closed and open.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    scenario_help = "scenario file, or a bundled name: " + ", ".join(shipped_scenarios())

    p = sub.add_parser("simulate", help="run one scenario and write a CSV time series",
                       epilog=defaults_help(), formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("scenario", help=scenario_help)
    p.add_argument("--out", help="CSV path (default: <scenario>.csv)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="closed and open runs side by side",
                       epilog=defaults_help(), formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("scenario", help=scenario_help)
    p.add_argument("--out", help="CSV path (default: <scenario>_compare.csv)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("resonances", help="resonant drive frequencies for the initial state",
                       epilog=defaults_help(), formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("scenario", help=scenario_help)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--m-max", type=int, default=None, help="override the scenario's m_max")
    p.set_defaults(func=cmd_resonances)

    p = sub.add_parser("dims", help="Hilbert-space sizes")
    p.add_argument("L", type=int)
    p.add_argument("n_max", type=int)
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("plot", help="render CSV columns as an SVG line plot")
    p.add_argument("csv")
    p.add_argument("--cols", required=True, help="comma-separated column names, e.g. P0,P3")
    p.add_argument("--out", required=True, help="SVG path")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help exits 0, usage errors exit 1
        return int(exc.code or 0)
    try:
        return args.func(args)
    except IntegrationError as exc:
        print(f"fracres: numerical abort: {exc}", file=sys.stderr)
        for key, value in exc.diagnostics.items():
            print(f"  {key} = {value!r}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ScenarioError, PlotError, UsageError, FileNotFoundError) as exc:
        print(f"fracres: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
