"""Command-line entry point.

Exit codes: 0 success, 2 usage or validation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from importlib import resources
from pathlib import Path

from . import __version__, data, replication, stats
from .coding import complexity_class
from .config import canonical_json, config_hash, load_config
from .simulation import run_experiment, summarize

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
SEED_ENV = "FORMICODE_SEED"
PLOT_KINDS = ("time_vs_index", "time_vs_distance", "complexity_vs_time")
TABLE_SOURCES = ("table2", "table3", "table5")


class UsageError(Exception):
    pass


def _write_json(path: Path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


def _manifest(path: Path, command: str, hashed: dict, seed, outputs):
    _write_json(path, {
        "command": command,
        "config_hash": config_hash(hashed),
        "seed": seed,
        "tool_version": __version__,
        "outputs": sorted(outputs),
    })


def _parse_seed(value: str) -> int:
    try:
        seed = int(value, 0)
    except ValueError:
        raise UsageError(f"seed must be an unsigned 64-bit integer, got {value!r}") from None
    if not 0 <= seed < 2**64:
        raise UsageError(f"seed {seed} outside the unsigned 64-bit range")
    return seed


def _resolve_config(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    bundled = resources.files("formicode") / "configs" / p.name
    if bundled.is_file():
        return Path(str(bundled))
    return p


def cmd_simulate(args) -> int:
    seed = None
    if args.seed is not None:
        seed = _parse_seed(args.seed)
    elif os.environ.get(SEED_ENV):
        seed = _parse_seed(os.environ[SEED_ENV])
    raw, config = load_config(_resolve_config(args.config), seed_override=seed)
    records = run_experiment(config)
    summary = summarize(records)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    data.emit_csv(records, out / "trials.csv")
    _write_json(out / "summary.json", {"seed": config.seed, "stages": summary})
    _manifest(out / "manifest.json", "simulate", raw, config.seed,
              ["trials.csv", "summary.json", "manifest.json"])
    if args.json:
        print(canonical_json({"seed": config.seed, "stages": summary}))
    else:
        for stage, entry in summary.items():
            print(f"stage {stage}: {entry['trials']} trials, "
                  f"mean contact {entry['mean_contact_duration_s']:.1f} s, "
                  f"success {entry['success_rate']:.3f}")
    return EXIT_OK


def cmd_replicate(args) -> int:
    try:
        results = replication.replicate(args.table)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "replication_report.json", {"selector": args.table, "results": results})
    _manifest(out / "manifest.json", "replicate", {"table": args.table}, None,
              ["replication_report.json", "manifest.json"])
    if args.json:
        print(canonical_json(results))
    else:
        for r in results:
            print(f"{r['name']:<20} {'PASS' if r['pass'] else 'FAIL'}  recomputed={r['recomputed']}")
    return EXIT_OK


def _fit_dataset(args) -> data.Dataset:
    with open(args.csv, encoding="utf-8", newline="") as fh:
        header = next(csv.reader(fh), [])
    if tuple(h.strip() for h in header) == data.TRIAL_COLUMNS:
        return data.trials_to_dataset(data.ingest_csv(args.csv), args.x, args.y)
    return data.read_xy_csv(args.csv, args.x, args.y)


def cmd_fit(args) -> int:
    try:
        ds = _fit_dataset(args)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    try:
        fit = stats.linear_fit(ds.xs, ds.ts)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = {"a": fit.a, "b": fit.b, "r": fit.r, "n": fit.n, "degenerate": fit.degenerate}
    if args.bits and fit.a > 0:
        result["bits_per_minute"] = 60.0 / fit.a
    if fit.degenerate:
        print(f"warning: degenerate fit, {args.y} has zero variance", file=sys.stderr)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_json(out / "fit.json", result)
        _manifest(out / "manifest.json", "fit",
                  {"csv": os.path.basename(args.csv), "x": args.x, "y": args.y}, None,
                  ["fit.json", "manifest.json"])
    if args.json:
        print(canonical_json(result))
    else:
        line = f"t = {fit.a:.4g} * x + {fit.b:.4g}   r = {fit.r:.4f}   n = {fit.n}"
        if "bits_per_minute" in result:
            line += f"   rate = {result['bits_per_minute']:.4g} bits/min"
        print(line)
    return EXIT_OK


def _plot_series(source: str, kind: str, anchors) -> list:
    """Return ``(series, x, y)`` rows."""
    if source in TABLE_SOURCES:
        if source == "table2":
            if kind != "complexity_vs_time":
                raise UsageError("table2 supports only complexity_vs_time")
            return [("table2", complexity_class(seq), mean_s)
                    for _, seq, mean_s, _ in data.load_table(2).rows]
        if source == "table3":
            if kind != "time_vs_index":
                raise UsageError("table3 supports only time_vs_index")
            return [("table3", b, t) for _, b, t, _ in data.load_table(3).rows]
        if kind != "time_vs_distance":
            raise UsageError("table5 supports only time_vs_distance")
        return [("table5", stats.distance_to_nearest_anchor(b, anchors), t)
                for b, t in replication.table5_records()]

    records = data.ingest_csv(source)
    rows = []
    for r in records:
        series = f"stage{r.stage}"
        if kind == "time_vs_index":
            rows.append((series, r.goal, r.contact_duration))
        elif kind == "time_vs_distance":
            rows.append((series, stats.distance_to_nearest_anchor(r.goal, anchors),
                         r.contact_duration))
        else:
            rows.append((series, r.code_length, r.contact_duration))
    return rows


def cmd_plotdata(args) -> int:
    if args.kind not in PLOT_KINDS:
        raise UsageError(f"unknown kind {args.kind!r}; expected one of {PLOT_KINDS}")
    anchors = tuple(int(a) for a in args.anchors.split(","))
    rows = _plot_series(args.source, args.kind, anchors)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("series", "x", "y"))
        writer.writerows(rows)
    manifest = out.with_name(out.name + ".manifest.json")
    _manifest(manifest, "plotdata",
              {"source": os.path.basename(args.source), "kind": args.kind, "anchors": list(anchors)},
              None, [out.name, manifest.name])
    print(f"wrote {len(rows)} points to {out}")
    return EXIT_OK


def cmd_export_tables(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    names = []
    for tid in data.table_ids():
        name = f"table{tid}.csv"
        with open(out / name, "w", encoding="utf-8", newline="") as fh:
            data.export_table_csv(data.load_table(tid), fh)
        names.append(name)
    _manifest(out / "manifest.json", "export-tables", {"tables": data.table_ids()}, None,
              names + ["manifest.json"])
    print(f"wrote {len(names)} tables to {out}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="formicode", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run a simulated experiment from a JSON config")
    p.add_argument("--config", required=True, help="config path or bundled config name")
    p.add_argument("--seed", help=f"override the config seed (fallback: ${SEED_ENV})")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--json", action="store_true", help="print the summary as JSON")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("replicate", help="recompute published values from embedded tables")
    p.add_argument("--table", default="all",
                   help=f"all or one of {', '.join(replication.CHECKS)}")
    p.add_argument("--out", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_replicate)

    p = sub.add_parser("fit", help="least-squares fit of two CSV columns")
    p.add_argument("csv")
    p.add_argument("--x", required=True, help="x column")
    p.add_argument("--y", required=True, help="time column (seconds)")
    p.add_argument("--bits", action="store_true", help="x is in bits; report bits per minute")
    p.add_argument("--out", help="optional directory for fit.json and manifest.json")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("plotdata", help="emit (series, x, y) points for plotting")
    p.add_argument("--source", required=True, help=f"trials.csv path or one of {TABLE_SOURCES}")
    p.add_argument("--kind", required=True, help=f"one of {PLOT_KINDS}")
    p.add_argument("--anchors", default="10,20", help="anchor branches for distances")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_plotdata)

    p = sub.add_parser("export-tables", help="write the embedded tables as CSV")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_tables)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
