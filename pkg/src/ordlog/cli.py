"""Command-line interface.

Subcommands: ``inspect`` (counts, consistency, precision histogram),
``variants`` (grouping at a granularity, optional tiebreaker, JSON export),
``sequentialize`` (k runs per case to XES/CSV), ``serve`` (HTTP service) and
``synth`` (synthetic logs).  Exit codes: 1 parse error, 2 inconsistent log,
3 tiebreaker conflict, 4 resource limit.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from pathlib import Path

from .errors import (
    CyclicOrder,
    InconsistentLog,
    OrdlogError,
    ParseError,
    ResourceLimit,
    TiebreakerConflict,
)
from .export import write_csv, write_simplified_csv, write_simplified_xes
from .ingest import ColumnMap, IngestConfig, parse_log
from .model import EventLog, Granularity, check_consistency, utc_datetime
from .preprocess import TimeAggregator, Tiebreaker
from .preprocess import apply as apply_preprocessing
from .sequentialize import SamplerConfig, k_sequentialize_runs
from .variants import group_variants, variant_to_json

EXIT_PARSE = 1
EXIT_INCONSISTENT = 2
EXIT_TIEBREAKER = 3
EXIT_RESOURCE = 4


def _ingest_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("log", help="path to the event log (CSV or XES)")
    p.add_argument("--format", choices=("csv", "xes"), default=None, help="default: by file suffix")
    p.add_argument(
        "--order",
        choices=("none", "rows-per-case", "rows-global", "edges"),
        default="none",
        help="source of the explicit order",
    )
    p.add_argument("--edges", metavar="FILE", help="edge list file (event_id_1,event_id_2 per line)")
    p.add_argument("--case-col", default="case_id")
    p.add_argument("--activity-col", default="activity")
    p.add_argument("--time-col", default="timestamp")
    p.add_argument("--id-col", default=None, help="event-id column; synthesized when omitted")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--timezone", default="UTC")


_ORDER_SOURCES = {
    "none": "none",
    "rows-per-case": "row_order_per_case",
    "rows-global": "row_order_global",
    "edges": "edge_list_file",
}


def _load_log(args) -> EventLog:
    path = Path(args.log)
    fmt = args.format or ("xes" if path.suffix.lower() == ".xes" else "csv")
    edge_list = None
    if args.order == "edges":
        if not args.edges:
            raise ParseError("--order edges requires --edges FILE")
        edge_list = Path(args.edges).read_text()
    cfg = IngestConfig(
        format=fmt,
        column_map=ColumnMap(
            case=args.case_col,
            activity=args.activity_col,
            timestamp=args.time_col,
            id=args.id_col,
        ),
        explicit_order_source=_ORDER_SOURCES[args.order],
        edge_list=edge_list,
        timezone=args.timezone,
        delimiter=args.delimiter,
    )
    return parse_log(path.read_bytes(), cfg)


def _load_tiebreaker(path: str | None) -> Tiebreaker | None:
    if path is None:
        return None
    return Tiebreaker.from_text(Path(path).read_text())


def _preprocessed(args, log: EventLog) -> EventLog:
    gran = getattr(args, "granularity", None)
    tb = _load_tiebreaker(getattr(args, "tiebreaker", None))
    if gran is None and tb is None:
        return log
    ta = TimeAggregator(
        Granularity.from_name(gran) if gran else Granularity.MILLISECOND,
        args.timezone,
    )
    return apply_preprocessing(log, ta, tb)


def cmd_inspect(args) -> int:
    log = _load_log(args)
    report = check_consistency(log, max_violations=50)
    print(f"Events:       {len(log)}")
    print(f"Cases:        {len(log.case_table) if len(log) else 0}")
    print(f"Activities:   {len(set(log.acts.tolist()))}")
    print(f"Order pairs:  {len(log.order_pairs)} (source: {args.order})")
    print(f"Consistent:        {'yes' if report.consistent else 'NO'}")
    print(f"Time-constrained:  {'yes' if report.time_constrained else 'no'}")
    print(f"Order-constrained: {'yes' if report.order_constrained else 'no'}")
    precisions = log.attr_columns.get("orig_precision")
    if precisions is not None and len(log):
        hist = Counter(precisions.tolist())
        print("Precision histogram:")
        for g in Granularity:
            if str(g) in hist:
                print(f"  {str(g):<12} {hist[str(g)]}")
    suspects = log.attr_columns.get("suspect_midnight")
    if suspects is not None:
        count = sum(1 for v in suspects if v)
        print(f"Suspect midnight timestamps: {count}")
    if not report.consistent:
        shown = "all" if not report.violations_truncated else f"first {len(report.violations)}"
        print(f"Violations ({shown}):")
        for v in report.violations:
            print(
                f"  {v.first_id} before {v.second_id} but "
                f"{utc_datetime(v.first_time):%Y-%m-%d %H:%M:%S} > "
                f"{utc_datetime(v.second_time):%Y-%m-%d %H:%M:%S}"
            )
        return EXIT_INCONSISTENT
    return 0


def cmd_variants(args) -> int:
    log = _load_log(args)
    pre = _preprocessed(args, log)
    variants = group_variants(pre)
    print(f"{len(variants)} variant(s) over {len(log.case_table) if len(log) else 0} case(s)")
    for v in variants[: args.top]:
        print(f"  freq={v.frequency:<6} key={v.canonical_key[:12]}  {' | '.join(v.activities)}")
    if args.json:
        doc = {"schema_version": 1, "granularity": args.granularity, "variants": [variant_to_json(v) for v in variants]}
        Path(args.json).write_text(json.dumps(doc, indent=2))
        print(f"wrote {args.json}")
    return 0


def cmd_sequentialize(args) -> int:
    log = _load_log(args)
    pre = _preprocessed(args, log)
    runs = k_sequentialize_runs(pre, args.k, SamplerConfig(seed=args.seed))
    triples = [(r.case_id, i % args.k + 1, r.event_indices) for i, r in enumerate(runs)]
    fmt = args.out_format or ("csv" if args.output.endswith(".csv") else "xes")
    if fmt == "xes":
        payload = write_simplified_xes(pre, triples)
    else:
        payload = write_simplified_csv(pre, triples)
    Path(args.output).write_bytes(payload)
    approx = any(r.approximate for r in runs)
    print(
        f"wrote {args.output}: {len(runs)} trace(s) = {args.k} x {len(pre.case_table)} case(s)"
        + (" [approximate sampling]" if approx else "")
    )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.data_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_synth(args) -> int:
    from . import synth

    if args.kind == "p2p":
        payload = write_csv(synth.synth_p2p(seed=args.seed))
    else:
        payload = synth.synth_roadfines_csv(seed=args.seed)
    Path(args.output).write_bytes(payload)
    print(f"wrote {args.output} ({len(payload)} bytes)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ordlog",
        description="Partially ordered event logs: consistency, variants, k-sequentialization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", help="counts, consistency report, precision histogram")
    _ingest_args(p)
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("variants", help="group cases into partial-order variants")
    _ingest_args(p)
    p.add_argument("--granularity", required=True, help="millisecond..year")
    p.add_argument("--tiebreaker", metavar="FILE", help="lines 'activityA -> activityB'")
    p.add_argument("--json", metavar="OUT", help="write full variant list as JSON")
    p.add_argument("--top", type=int, default=20, help="variants to print")
    p.set_defaults(func=cmd_variants)

    p = sub.add_parser("sequentialize", help="emit a k-sequentialized log")
    _ingest_args(p)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--granularity", default=None)
    p.add_argument("--tiebreaker", metavar="FILE")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--out-format", choices=("xes", "csv"), default=None)
    p.set_defaults(func=cmd_sequentialize)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--port", type=int, default=8640)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", default=None, help="defaults to ORDLOG_DATA_DIR")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("synth", help="generate synthetic logs")
    p.add_argument("kind", choices=("p2p", "roadfines"))
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, CyclicOrder, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InconsistentLog as exc:
        print(f"error: {exc}", file=sys.stderr)
        for v in exc.report.violations[:50]:
            print(f"  {v.first_id} before {v.second_id} but timestamps disagree", file=sys.stderr)
        return EXIT_INCONSISTENT
    except TiebreakerConflict as exc:
        print(f"error: {exc}", file=sys.stderr)
        for c in exc.conflicts[:50]:
            print(
                f"  {c.first_activity} -> {c.second_activity} contradicts {c.contradicts} "
                f"(events {c.first_id}, {c.second_id})",
                file=sys.stderr,
            )
        return EXIT_TIEBREAKER
    except ResourceLimit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OrdlogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
