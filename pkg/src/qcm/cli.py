"""``qcm`` command-line tool.

Exit codes: 0 success, 1 validation or analysis failure, 2 usage error
(bad arguments, unreadable input, invalid config, bind failure).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import signal
import sys
import threading
from pathlib import Path
from typing import Sequence
from urllib.parse import quote

from . import __version__
from .analytics import (
    ReportBundle,
    ReportError,
    bonus_capture_rate,
    card_error_rates,
    chi_squared_2x2,
    cohort_totals,
    emit_reports,
    read_group_map,
    read_paper_records,
    read_tallies,
    reconstruct_sessions,
    student_reports,
    success_vs_time,
    table_from_tallies,
    write_group_map,
)
from .analytics.reports import DIGITAL, PAPER, EmptyContextError
from .metrics import LOG_SUFFIX, LogStore, dumps_log, read_log_file
from .metrics.server import make_server
from .metrics.store import LOG_DIR_ENV
from .sim import ConfigError, load_config, simulate_cohort, write_activity, write_paper_records

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

LOG_REPORTS = ("students", "cards", "sessions", "scatter", "totals", "bonus")

log = logging.getLogger("qcm")


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"qcm: {msg}", file=sys.stderr)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# simulate -------------------------------------------------------------------


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        config = load_config(args.config, seed_override=args.seed)
    except FileNotFoundError:
        raise UsageError(f"config not found: {args.config}") from None
    except OSError as exc:
        raise UsageError(f"cannot read config {args.config}: {exc.strerror}") from None
    except ConfigError as exc:
        raise UsageError(f"invalid config: {exc}") from None
    run = simulate_cohort(config)
    out = Path(args.out)
    players_dir = out / "players"
    players_dir.mkdir(parents=True, exist_ok=True)
    # the merged log is the per-player logs concatenated in player order
    texts = {pid: dumps_log(events) for pid, events in sorted(run.per_player.items())}
    for pid, text in texts.items():
        (players_dir / f"{quote(pid, safe='')}{LOG_SUFFIX}").write_bytes(text.encode("utf-8"))
    merged = "".join(texts.values())
    (out / f"merged{LOG_SUFFIX}").write_bytes(merged.encode("utf-8"))
    lines = merged.count("\n")
    write_group_map(run.group_map, out / "groups.csv")
    write_paper_records(run.paper_records, out / "paper_records.csv")
    write_activity(run.activity, out / "activity.csv")
    files = sorted(p for p in out.rglob("*") if p.is_file() and p.name != "manifest.json")
    manifest = {
        "seed": config.master_seed,
        "config_sha256": _sha256(Path(args.config)),
        "players": len(run.per_player),
        "lines": lines,
        "paper_records": len(run.paper_records),
        "files": {p.relative_to(out).as_posix(): _sha256(p) for p in files},
        "version": __version__,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"{lines} lines for {len(run.per_player)} players, seed {config.master_seed}, written to {out}")
    return EXIT_OK


# validate -------------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        doc = read_log_file(args.log)
    except OSError as exc:
        raise UsageError(f"cannot read {args.log}: {exc.strerror}") from None
    for d in doc.diagnostics:
        print(f"{args.log}:{d.line_no}: byte {d.position}: {d.reason}: {d.message}", file=sys.stderr)
    print(f"{len(doc)} events, {len(doc.diagnostics)} errors")
    return EXIT_FAILURE if doc.diagnostics else EXIT_OK


# report ---------------------------------------------------------------------


def _parse_counts(text: str) -> list[list[int]]:
    parts = text.replace(" ", "").split(",")
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise UsageError(f"--chi2 expects four integers a,b,c,d; got {text!r}") from None
    if len(values) != 4 or any(v < 0 for v in values):
        raise UsageError(f"--chi2 expects four non-negative integers a,b,c,d; got {text!r}")
    return [values[:2], values[2:]]


def _chi2_table(args: argparse.Namespace) -> list[list[int]]:
    if args.chi2:
        return _parse_counts(args.chi2)
    if args.activity:
        try:
            rows, cols, table = table_from_tallies(read_tallies(args.activity))
        except (OSError, KeyError, ValueError) as exc:
            raise UsageError(f"cannot build a 2x2 table from {args.activity}: {exc}") from None
        print(f"rows {rows} x columns {cols}")
        return table
    raise UsageError("--chi2 needs counts (a,b,c,d) or --activity FILE")


def cmd_report(args: argparse.Namespace) -> int:
    which = {name for name in LOG_REPORTS if getattr(args, name)}
    want_chi2 = args.chi2 is not None
    if not which and not want_chi2:
        which = set(LOG_REPORTS)
    bundle = ReportBundle()
    status = EXIT_OK
    if want_chi2:
        table = _chi2_table(args)
        try:
            result = chi_squared_2x2(table)
        except ValueError as exc:
            _err(f"chi2: {exc}")
            return EXIT_FAILURE
        bundle.chi2 = (result, table)
        print(f"chi2 statistic {result.statistic:.6f}, df {result.degrees_of_freedom}, p {result.p_value:.6f}")
    if which:
        if args.log is None:
            raise UsageError(f"a LOG file is required for {', '.join(sorted(which))}")
        try:
            doc = read_log_file(args.log)
            group_map = read_group_map(args.groups) if args.groups else {}
            paper = read_paper_records(args.paper_records) if args.paper_records else None
        except (OSError, KeyError, ValueError) as exc:
            raise UsageError(f"cannot read input: {exc}") from None
        if doc.diagnostics:
            _err(f"{args.log}: {len(doc.diagnostics)} lines rejected (see 'qcm validate')")
        if "students" in which:
            bundle.students = student_reports(doc)
        if "cards" in which:
            bundle.cards = card_error_rates(doc)
        if "sessions" in which:
            bundle.sessions = reconstruct_sessions(doc)
        if "scatter" in which:
            notes: list[str] = []
            bundle.points = success_vs_time(doc, group_map, notes)
            for note in notes:
                _err(note)
        if "totals" in which:
            try:
                totals = cohort_totals(doc, paper, group_map)
            except EmptyContextError as exc:
                _err(f"totals: {exc}")
                status = EXIT_FAILURE
            else:
                bundle.totals = totals
                for ctx, t in sorted(totals.contexts.items()):
                    print(f"{ctx}: {t.unique_cards_correct} unique cards correct, error rate {t.error_rate:.4f}")
                diff = totals.relative_difference
                if diff is not None:
                    print(f"{DIGITAL} vs {PAPER}: {diff} ({float(diff):+.4f})")
        if "bonus" in which:
            bonus = bonus_capture_rate(doc)
            bundle.bonus = bonus
            if bonus.available == 0:
                print("bonus: no spawns in log, capture rate undefined")
            else:
                print(f"bonus: {bonus.captured}/{bonus.available} captured, rate {bonus.rate:.4f}")
    try:
        paths = emit_reports(bundle, args.out)
    except ReportError as exc:
        raise UsageError(str(exc)) from None
    for p in paths:
        log.info("wrote %s", p)
    return status


# serve ----------------------------------------------------------------------


def _parse_listen(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit() or int(port) > 65535:
        raise UsageError(f"--listen expects HOST:PORT, got {text!r}")
    return host or "127.0.0.1", int(port)


def cmd_serve(args: argparse.Namespace) -> int:
    host, port = _parse_listen(args.listen)
    log_dir = args.log_dir or os.environ.get(LOG_DIR_ENV)
    if not log_dir:
        raise UsageError(f"no log directory: pass --log-dir or set {LOG_DIR_ENV}")
    try:
        store = LogStore(log_dir)
    except OSError as exc:
        raise UsageError(f"cannot use log directory {log_dir}: {exc.strerror}") from None
    try:
        server = make_server(host, port, store)
    except OSError as exc:
        raise UsageError(f"cannot listen on {host}:{port}: {exc.strerror}") from None

    def stop(signum, frame):  # noqa: ARG001
        threading.Thread(target=server.shutdown, daemon=True).start()

    previous = {s: signal.signal(s, stop) for s in (signal.SIGINT, signal.SIGTERM)}
    bound_host, bound_port = server.server_address[:2]
    print(f"listening on {bound_host}:{bound_port}, logs in {store.root}", file=sys.stderr, flush=True)
    try:
        server.serve_forever()
    finally:
        server.server_close()
        for s, handler in previous.items():
            signal.signal(s, handler)
    print("stopped", file=sys.stderr)
    return EXIT_OK


# entry point ----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        _err(message)
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qcm", description="Simulate, validate and analyse reading-card game logs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="simulate a cohort from a JSON config")
    p.add_argument("config")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="override the config's master seed")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="check a log file line by line")
    p.add_argument("log")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("report", help="compute CSV/SVG reports from a log")
    p.add_argument("log", nargs="?")
    p.add_argument("--out", default="reports", help="output directory (default: reports)")
    p.add_argument("--groups", help="CSV player_id,group")
    p.add_argument("--paper-records", help="CSV player_id,card_id,correct[,session_index]")
    for name in LOG_REPORTS:
        p.add_argument(f"--{name}", action="store_true")
    p.add_argument("--chi2", nargs="?", const="", metavar="A,B,C,D", help="2x2 counts, row-major")
    p.add_argument("--activity", help="CSV group,period,count used when --chi2 has no counts")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the log ingestion endpoint")
    p.add_argument("--listen", default="127.0.0.1:8080", metavar="HOST:PORT")
    p.add_argument("--log-dir", help=f"store directory (default: ${LOG_DIR_ENV})")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        _err(str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
