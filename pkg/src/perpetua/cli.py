"""Command line entry points.

    perpetua verdict  --config FILE [--format json|csv]
    perpetua classify --config FILE [--format json|csv]
    perpetua simulate --config FILE --out DIR [--seed U64] [--threads N]
    perpetua verify   --config FILE [--out DIR] [--seed U64] [--threads N]

Exit codes: 0 pass, 1 check failure (or an analysis error), 2 bad config.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .analysis import local_time_criterion, perpetual_verdict
from .config import load_config
from .errors import ConfigError, PerpetuaError
from .runner import run_experiment, simulate_paths

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perpetua",
        description="Almost-sure finiteness of perpetual integrals: "
                    "analytic verdicts and Monte Carlo checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, out_required: bool = False) -> None:
        p.add_argument("--config", required=True, help="experiment JSON file")
        p.add_argument("--out", required=out_required, default=None,
                       help="output directory for reports and CSV artifacts")
        p.add_argument("--seed", type=int, default=None,
                       help="override the master seed from the config")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads (results are identical for any value)")
        p.add_argument("--format", choices=("json", "csv"), default="json",
                       help="stdout format for analysis commands")

    common(sub.add_parser("verdict", help="analytic finiteness verdict for (triplet, f)"))
    common(sub.add_parser("classify", help="structural classification of the triplet"))
    common(sub.add_parser("simulate", help="sample paths and dump CSVs"), out_required=True)
    common(sub.add_parser("verify", help="run the statistical check suite"))
    return parser


def _flatten(prefix: str, obj, rows: list) -> None:
    if isinstance(obj, dict):
        for key in sorted(obj):
            _flatten(f"{prefix}.{key}" if prefix else str(key), obj[key], rows)
    elif isinstance(obj, (list, tuple)):
        for i, item in enumerate(obj):
            _flatten(f"{prefix}[{i}]", item, rows)
    else:
        rows.append((prefix, obj))


def _emit(payload: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        rows: list = []
        _flatten("", payload, rows)
        print("key,value")
        for key, val in rows:
            print(f"{key},{val}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        config = dataclasses.replace(config, master_seed=args.seed)

    try:
        if args.command == "verdict":
            report = perpetual_verdict(config.triplet, config.f)
            _emit(report.to_dict(), args.format)
            return 0

        if args.command == "classify":
            flags = config.triplet.classify()
            payload = {
                "classification": flags.to_dict(),
                "local_time": local_time_criterion(config.triplet).value,
                "mean": config.triplet.mean().describe(),
            }
            _emit(payload, args.format)
            return 0

        if args.command == "simulate":
            written = simulate_paths(config, args.out, threads=args.threads)
            print(f"wrote {len(written)} files to {args.out}")
            return 0

        # verify
        report, exit_code = run_experiment(
            config, out_dir=args.out, threads=args.threads
        )
        for entry in report["checks"]:
            tag = "[PASS]" if entry["passed"] else "[FAIL]"
            stat = entry["statistic"]
            stat_s = "n/a" if stat is None else f"{stat:.6g}"
            thr = entry["threshold"]
            thr_s = "n/a" if thr is None else f"{thr:.6g}"
            print(f"{tag} {entry['name']}: statistic={stat_s} threshold={thr_s}")
        verdict = "meets expectations" if exit_code == 0 else "FAILED"
        print(f"suite: {verdict} ({len(report['checks'])} checks)")
        return exit_code

    except PerpetuaError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
