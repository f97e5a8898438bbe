"""Command-line front door: experiments, word tools, and moment oracles.

Exit codes: 0 success, 1 a check failed, 2 configuration or usage error,
3 capacity/budget exceeded.  Experiment outputs are a line-delimited record
file (header object, then one JSON object per replica) plus a CSV summary
with the fixed columns check,n,statistic,value,tolerance,stderr,pass.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .checks import SummaryRow, run_checks, validate_check_requirements
from .ensemble import DISTRIBUTIONS, get_distribution
from .errors import CapacityError
from .harness import ExperimentConfig, FunctionSpec, RunRecord, run_monte_carlo
from .merge import merge_report
from .moments import moment_table, trace_moment_by_classes, trace_moment_direct
from .words import (
    Word,
    WordClass,
    class_counts,
    classify,
    enumerate_closed_classes,
    enumerate_dyck,
    word,
)

OUTPUT_DIR_ENV = "WIGNERLAB_OUTPUT_DIR"
RECORDS_FORMAT = "wignerlab.records.v1"


class ConfigError(ValueError):
    """Invalid config file or CLI arguments; maps to exit code 2."""


_CONFIG_KEYS = {
    "ensemble",
    "dimensions",
    "replicas",
    "seed",
    "functions",
    "powers",
    "edge_times",
    "edge_count",
    "checks",
    "compare_ensemble",
    "output",
}
_FUNCTION_KEYS = {"name", "coeffs", "analytic", "orders"}
_OUTPUT_KEYS = {"records", "summary"}


def _reject_unknown(mapping: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(unknown)}")


def load_config(path: str) -> tuple[ExperimentConfig, dict]:
    """Parse and fully validate a JSON config; returns (config, output paths)."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be an object")
    _reject_unknown(raw, _CONFIG_KEYS, "config")

    for key in ("ensemble", "dimensions", "replicas", "seed"):
        if key not in raw:
            raise ConfigError(f"config: missing required key '{key}'")

    functions = []
    for i, item in enumerate(raw.get("functions", [])):
        if not isinstance(item, dict):
            raise ConfigError(f"functions[{i}]: must be an object")
        _reject_unknown(item, _FUNCTION_KEYS, f"functions[{i}]")
        try:
            functions.append(
                FunctionSpec(
                    name=item.get("name", ""),
                    coeffs=tuple(float(c) for c in item["coeffs"]) if "coeffs" in item else None,
                    analytic=item.get("analytic"),
                    orders=tuple(int(o) for o in item.get("orders", [])),
                )
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    output = raw.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError("output: must be an object")
    _reject_unknown(output, _OUTPUT_KEYS, "output")
    paths = {
        "records": output.get("records", "records.jsonl"),
        "summary": output.get("summary", "summary.csv"),
    }

    try:
        config = ExperimentConfig(
            ensemble=raw["ensemble"],
            dimensions=tuple(int(n) for n in raw["dimensions"]),
            replicas=int(raw["replicas"]),
            seed=raw["seed"],
            functions=tuple(functions),
            powers=tuple(int(m) for m in raw.get("powers", [])),
            edge_times=tuple(float(t) for t in raw.get("edge_times", [])),
            edge_count=int(raw.get("edge_count", 1)),
            checks=tuple(str(c) for c in raw.get("checks", [])),
            compare_ensemble=raw.get("compare_ensemble"),
        )
        validate_check_requirements(config)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return config, paths


def write_records(path: Path, config: ExperimentConfig, records: Sequence[RunRecord]) -> None:
    header = {
        "kind": "header",
        "format": RECORDS_FORMAT,
        "version": __version__,
        "config_digest": config.digest(),
        "config": config.to_dict(),
    }
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(json.dumps(header, sort_keys=True, separators=(",", ":")) + "\n")
        for record in records:
            handle.write(record.to_json() + "\n")


def write_summary(path: Path, rows: Sequence[SummaryRow]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["check", "n", "statistic", "value", "tolerance", "stderr", "pass"])
        for row in rows:
            writer.writerow(
                [
                    row.check,
                    "" if row.n is None else row.n,
                    row.statistic,
                    repr(row.value),
                    repr(row.tolerance),
                    "" if row.stderr is None else repr(row.stderr),
                    "pass" if row.passed else "fail",
                ]
            )


def cmd_run(args) -> int:
    config, paths = load_config(args.config)
    out_dir = Path(args.output_dir or os.environ.get(OUTPUT_DIR_ENV) or ".")
    out_dir.mkdir(parents=True, exist_ok=True)

    records = run_monte_carlo(config, workers=args.workers)
    write_records(out_dir / paths["records"], config, records)
    rows = run_checks(config, records, workers=args.workers)
    write_summary(out_dir / paths["summary"], rows)

    failed = [row for row in rows if not row.passed]
    for row in rows:
        where = f" n={row.n}" if row.n is not None else ""
        print(
            f"{row.check}{where} {row.statistic}: value={row.value:.6g} "
            f"tolerance={row.tolerance:.6g} {'pass' if row.passed else 'FAIL'}"
        )
    print(f"records: {out_dir / paths['records']}")
    print(f"summary: {out_dir / paths['summary']}")
    return 0 if not failed else 1


def _parse_word(text: str) -> Word:
    try:
        return word(int(part) for part in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"malformed word literal {text!r}: {exc}") from exc


def cmd_words(args) -> int:
    if args.words_command == "enumerate":
        if args.summary:
            print("length,total,wigner,critical_weak_wigner,weak_wigner,general")
            for length in range(1, args.length + 1):
                counts = class_counts(length)
                print(
                    f"{length},{sum(counts.values())},{counts[WordClass.WIGNER]},"
                    f"{counts[WordClass.CRITICAL_WEAK_WIGNER]},{counts[WordClass.WEAK_WIGNER]},"
                    f"{counts[WordClass.GENERAL]}"
                )
            return 0
        print("word,class")
        for w in enumerate_closed_classes(args.length):
            cls = classify(w)
            if args.filter and cls.value != args.filter:
                continue
            print(f"{w},{cls}")
        return 0
    if args.words_command == "classify":
        print(classify(_parse_word(args.word)))
        return 0
    if args.words_command == "merge":
        report = merge_report(_parse_word(args.w1), _parse_word(args.w2))
        print(report["merged"])
        for key in ("closed", "length", "multiset", "support"):
            print(f"{key}: {'ok' if report[f'{key}_ok'] else 'VIOLATED'}")
        return 0
    if args.words_command == "dyck":
        paths = enumerate_dyck(args.k)
        for p in paths:
            print(p if len(p) else "(empty)")
        print(f"count: {len(paths)}")
        return 0
    raise ConfigError(f"unknown words subcommand {args.words_command!r}")


def cmd_oracle(args) -> int:
    dist = get_distribution(args.dist)
    table = moment_table(dist)
    values = {}
    print("n,k,method,value")
    if args.method in ("direct", "both"):
        values["direct"] = trace_moment_direct(args.n, args.k, table)
        print(f"{args.n},{args.k},direct,{values['direct']!r}")
    if args.method in ("classes", "both"):
        values["classes"] = trace_moment_by_classes(args.n, args.k, table)
        print(f"{args.n},{args.k},classes,{values['classes']!r}")
    if args.method == "both":
        print(f"{args.n},{args.k},difference,{values['direct'] - values['classes']!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wignerlab",
        description="Wigner-matrix spectral statistics laboratory",
    )
    parser.add_argument("--version", action="version", version=f"wignerlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run an experiment from a JSON config")
    run_parser.add_argument("--config", required=True, help="path to the JSON config file")
    run_parser.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    run_parser.add_argument(
        "--output-dir",
        default=None,
        help=f"output directory (default: ${OUTPUT_DIR_ENV} or current directory)",
    )
    run_parser.set_defaults(handler=cmd_run)

    words_parser = sub.add_parser("words", help="word combinatorics tools")
    words_sub = words_parser.add_subparsers(dest="words_command", required=True)

    enum_parser = words_sub.add_parser("enumerate", help="canonical closed words of one length")
    enum_parser.add_argument("--length", type=int, required=True)
    enum_parser.add_argument(
        "--filter", choices=[c.value for c in WordClass], default=None
    )
    enum_parser.add_argument(
        "--summary", action="store_true", help="emit class counts per length up to --length"
    )
    classify_parser = words_sub.add_parser("classify", help="classify one word")
    classify_parser.add_argument("word", help="comma-separated letters, e.g. 1,2,1,2,1")
    merge_parser = words_sub.add_parser("merge", help="merge two closed words sharing an edge")
    merge_parser.add_argument("w1", help="inner word, comma-separated letters")
    merge_parser.add_argument("w2", help="frame word, comma-separated letters")
    dyck_parser = words_sub.add_parser("dyck", help="enumerate Dyck paths of length 2k")
    dyck_parser.add_argument("--k", type=int, required=True)
    words_parser.set_defaults(handler=cmd_words)

    oracle_parser = sub.add_parser("oracle", help="exact trace-moment oracles at tiny n")
    oracle_parser.add_argument("--n", type=int, required=True)
    oracle_parser.add_argument("--k", type=int, required=True)
    oracle_parser.add_argument("--dist", default="gaussian", choices=sorted(DISTRIBUTIONS))
    oracle_parser.add_argument("--method", default="both", choices=["direct", "classes", "both"])
    oracle_parser.set_defaults(handler=cmd_oracle)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; keep its codes.
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
