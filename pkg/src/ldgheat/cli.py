"""Command-line interface.

Subcommands: `run` a convergence study from a preset or JSON config, `show`
a saved record as a table, `check` the acceptance presets and report one
pass/fail line per criterion.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .study import PRESETS, StudyConfig, StudyRecord, _format_table, emit, preset_config, run_study


def _cmd_run(args) -> int:
    if (args.config is None) == (args.preset is None):
        print("error: give exactly one of --config and --preset", file=sys.stderr)
        return 2
    if args.preset is not None:
        cfg = preset_config(args.preset, max_n=args.max_n)
        stem = args.preset
    else:
        cfg = StudyConfig.from_json_file(args.config)
        if args.max_n is not None:
            ns = [cfg.n_list[0]]
            while 2 * ns[-1] <= args.max_n:
                ns.append(2 * ns[-1])
            cfg = StudyConfig.from_dict({**cfg.to_dict(), "n_list": ns})
        stem = Path(args.config).stem

    def progress(n, report):
        print(f"  N={n:>4}  e_u_n={report.e_u_n:.3e}  xi_u_L2={report.xi_u_L2:.3e}")

    print(f"running study '{stem}' (N = {', '.join(str(n) for n in cfg.n_list)})")
    record = run_study(cfg, progress=progress)
    paths = emit(record, args.format, args.out, stem=stem)
    print(_format_table(record))
    for p in paths:
        print(f"wrote {p}")
    return 0


def _cmd_show(args) -> int:
    with open(args.record, "r", encoding="utf-8") as fh:
        record = StudyRecord.from_dict(json.load(fh))
    print(_format_table(record))
    return 0


def _cmd_check(args) -> int:
    from .acceptance import run_acceptance

    results = run_acceptance(full=args.full, out_dir=args.out)
    for res in results:
        print(res.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ldgheat",
        description="LDG heat-equation solver and superconvergence study harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a convergence study")
    run_p.add_argument("--config", type=Path, help="JSON study configuration")
    run_p.add_argument("--preset", choices=sorted(PRESETS), help="built-in study")
    run_p.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    run_p.add_argument(
        "--format", choices=["csv", "json", "table", "plot", "all"], default="all"
    )
    run_p.add_argument(
        "--max-n", type=int, default=None,
        help="rebuild the mesh family by doubling up to this N (larger runs are slow)",
    )
    run_p.set_defaults(func=_cmd_run)

    show_p = sub.add_parser("show", help="pretty-print a saved record")
    show_p.add_argument("record", type=Path)
    show_p.set_defaults(func=_cmd_show)

    check_p = sub.add_parser("check", help="run the acceptance suite presets")
    check_p.add_argument("--full", action="store_true", help="include the long k=4 runs")
    check_p.add_argument("--out", type=Path, default=None, help="write study artifacts here")
    check_p.set_defaults(func=_cmd_check)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
