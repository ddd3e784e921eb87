"""Event-log ingestion from CSV and XES.

Timestamps are tried against an ordered list of patterns (strptime syntax
plus the special token ``iso8601``); the first full match wins and also
determines the recorded original precision.  Values equal to midnight that
claim sub-day precision are tagged ``suspect_midnight`` so downstream views
can surface likely day-rounded times; nothing is reinterpreted.

The explicit order can come from per-case or global row order (consecutive
row pairs, whose closure is the corresponding total order) or from an edge
list of ``event_id_1,event_id_2`` lines.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field, replace
from datetime import datetime
from xml.etree import ElementTree

import numpy as np
import pandas as pd

from .errors import ParseError, TimestampError
from .model import EventLog, Granularity

__all__ = [
    "ColumnMap",
    "IngestConfig",
    "DEFAULT_TIMESTAMP_PATTERNS",
    "parse_log",
    "detect_precision",
    "pattern_precision",
]

# Table-style day-first shapes first, ISO last as catch-all.
DEFAULT_TIMESTAMP_PATTERNS = (
    "%d-%m-%Y:%H.%M.%S",
    "%d-%m-%Y:%H.%M",
    "%d-%m-%Y",
    "iso8601",
)

ORDER_SOURCES = ("none", "row_order_per_case", "row_order_global", "edge_list_file")


@dataclass(frozen=True)
class ColumnMap:
    case: str = "case_id"
    activity: str = "activity"
    timestamp: str = "timestamp"
    id: str | None = None


@dataclass(frozen=True)
class IngestConfig:
    format: str = "csv"  # "csv" | "xes"
    column_map: ColumnMap | None = field(default_factory=ColumnMap)
    timestamp_patterns: tuple[str, ...] = DEFAULT_TIMESTAMP_PATTERNS
    explicit_order_source: str = "none"
    edge_list: str | None = None  # content of the edge-list file
    timezone: str = "UTC"
    delimiter: str = ","

    def __post_init__(self):
        if self.format not in ("csv", "xes"):
            raise ValueError(f"unknown log format {self.format!r}")
        if not self.timestamp_patterns:
            raise ValueError("timestamp_patterns must be non-empty")
        if self.format == "csv" and self.column_map is None:
            raise ValueError("column_map is required for CSV input")
        if self.explicit_order_source not in ORDER_SOURCES:
            raise ValueError(
                f"explicit_order_source must be one of {ORDER_SOURCES}, "
                f"got {self.explicit_order_source!r}"
            )
        if self.explicit_order_source == "edge_list_file" and self.edge_list is None:
            raise ValueError("edge_list content required for edge_list_file order source")

    @classmethod
    def from_dict(cls, d: dict) -> "IngestConfig":
        d = dict(d)
        if "column_map" in d and isinstance(d["column_map"], dict):
            d["column_map"] = ColumnMap(**d["column_map"])
        if "timestamp_patterns" in d:
            d["timestamp_patterns"] = tuple(d["timestamp_patterns"])
        return cls(**d)


def pattern_precision(pattern: str) -> Granularity:
    """Coarsest granularity a strptime pattern can express."""
    if pattern == "iso8601":
        return Granularity.SECOND  # refined per value
    if "%f" in pattern:
        return Granularity.MILLISECOND
    if "%S" in pattern:
        return Granularity.SECOND
    if "%M" in pattern:
        return Granularity.MINUTE
    if "%H" in pattern:
        return Granularity.HOUR
    if "%d" in pattern or "%j" in pattern:
        return Granularity.DAY
    if "%m" in pattern or "%b" in pattern or "%B" in pattern:
        return Granularity.MONTH
    return Granularity.YEAR


_ISO_FRACTION = re.compile(r"[.,]\d+")
_ISO_HAS_SECONDS = re.compile(r"[T ]\d{2}:\d{2}:\d{2}")
_ISO_HAS_TIME = re.compile(r"[T ]\d{2}:\d{2}")


def _iso_precision(raw: str) -> Granularity:
    if _ISO_FRACTION.search(raw):
        return Granularity.MILLISECOND
    if _ISO_HAS_SECONDS.search(raw):
        return Granularity.SECOND
    if _ISO_HAS_TIME.search(raw):
        return Granularity.MINUTE
    return Granularity.DAY


def _parse_iso_scalar(raw: str) -> datetime | None:
    try:
        return datetime.fromisoformat(raw.replace("Z", "+00:00"))
    except ValueError:
        return None


def detect_precision(
    raw: str, patterns: tuple[str, ...] = DEFAULT_TIMESTAMP_PATTERNS
) -> Granularity:
    """Granularity of the first pattern that fully matches ``raw``."""
    for pat in patterns:
        if pat == "iso8601":
            if _parse_iso_scalar(raw) is not None:
                return _iso_precision(raw)
            continue
        try:
            datetime.strptime(raw, pat)
        except ValueError:
            continue
        return pattern_precision(pat)
    raise TimestampError(raw, patterns)


def parse_log(source: bytes | str | io.IOBase, cfg: IngestConfig) -> EventLog:
    """Parse a CSV or XES byte stream into an :class:`EventLog` per ``cfg``."""
    data = _read_all(source)
    if cfg.format == "csv":
        return _parse_csv(data, cfg)
    return _parse_xes(data, cfg)


def _read_all(source) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, str):
        return source.encode("utf-8")
    return source.read()


# -- timestamp columns ---------------------------------------------------------


def _parse_timestamp_column(raw: pd.Series, cfg: IngestConfig, where: str):
    """Vectorized first-match parsing; returns (epoch_ms, precision, suspect)."""
    n = len(raw)
    parsed_utc = np.full(n, np.datetime64("NaT"), dtype="datetime64[ns]")
    wall_midnight = np.zeros(n, dtype=bool)
    precision = np.full(n, -1, dtype=np.int8)
    pending = np.ones(n, dtype=bool)
    for pat in cfg.timestamp_patterns:
        if not pending.any():
            break
        subset = raw[pending]
        if pat == "iso8601":
            got = _parse_iso_series(subset, cfg.timezone)
            if got is None:
                continue
            ok, utc_vals, naive_wall, prec = got
        else:
            vals = pd.to_datetime(subset, format=pat, errors="coerce", exact=True)
            ok = vals.notna().to_numpy()
            if not ok.any():
                continue
            naive = vals[ok]
            utc_vals = _localize(naive, cfg.timezone, where)
            naive_np = naive.to_numpy()
            naive_wall = naive_np == naive_np.astype("datetime64[D]").astype("datetime64[ns]")
            prec = np.full(len(naive), int(pattern_precision(pat)), dtype=np.int8)
        positions = subset.index.to_numpy()[ok]
        parsed_utc[positions] = utc_vals
        wall_midnight[positions] = naive_wall
        precision[positions] = prec
        pending[positions] = False
    if pending.any():
        row = int(np.flatnonzero(pending)[0])
        raise TimestampError(str(raw.iloc[row]), cfg.timestamp_patterns, f"{where} row {row}")
    millis = parsed_utc.astype("datetime64[ms]").astype(np.int64)
    suspect = wall_midnight & (precision < int(Granularity.DAY))
    return millis, precision, suspect


def _parse_iso_series(subset: pd.Series, tz: str):
    try:
        vals = pd.to_datetime(subset, format="ISO8601", errors="coerce")
    except ValueError:
        # mixed offsets: fall back to UTC-normalized parsing
        vals = pd.to_datetime(subset, format="ISO8601", errors="coerce", utc=True)
    ok = vals.notna().to_numpy()
    if not ok.any():
        return None
    good = vals[ok]
    if good.dt.tz is None:
        naive_np = good.to_numpy()
        utc_vals = _localize(good, tz, "iso8601")
        naive_wall = naive_np == naive_np.astype("datetime64[D]").astype("datetime64[ns]")
    else:
        utc = good.dt.tz_convert("UTC")
        utc_vals = utc.dt.tz_localize(None).to_numpy()
        wall = good.dt.tz_localize(None).to_numpy()
        naive_wall = wall == wall.astype("datetime64[D]").astype("datetime64[ns]")
    texts = subset[ok].astype(str)
    prec = np.array([int(_iso_precision(s)) for s in texts], dtype=np.int8)
    return ok, utc_vals, naive_wall, prec


def _localize(naive: pd.Series, tz: str, where: str) -> np.ndarray:
    if tz == "UTC":
        return naive.to_numpy()
    try:
        aware = naive.dt.tz_localize(tz, ambiguous="raise", nonexistent="raise")
    except Exception as exc:
        raise ParseError(f"cannot localize timestamps to {tz}: {exc}", where) from exc
    return aware.dt.tz_convert("UTC").dt.tz_localize(None).to_numpy()


# -- CSV -----------------------------------------------------------------------


def _parse_csv(data: bytes, cfg: IngestConfig) -> EventLog:
    cm = cfg.column_map
    try:
        df = pd.read_csv(
            io.BytesIO(data),
            sep=cfg.delimiter,
            dtype=str,
            keep_default_na=False,
            engine="c",
        )
    except Exception as exc:
        raise ParseError(f"CSV parsing failed: {exc}") from exc
    for col in (cm.case, cm.activity, cm.timestamp):
        if col not in df.columns:
            raise ParseError(f"missing required column {col!r}; header has {list(df.columns)}")
    if cm.id is not None and cm.id not in df.columns:
        raise ParseError(f"configured id column {cm.id!r} not in header")
    n = len(df)
    if cm.id is not None:
        ids = df[cm.id].to_numpy(dtype=object)
    else:
        ids = np.array([f"e{i}" for i in range(n)], dtype=object)
    case_ids = df[cm.case].to_numpy(dtype=object)
    acts = df[cm.activity].to_numpy(dtype=object)
    raw_times = df[cm.timestamp].to_numpy(dtype=object)
    if n:
        times, precision, suspect = _parse_timestamp_column(
            df[cm.timestamp].reset_index(drop=True), cfg, "csv"
        )
    else:
        times = np.zeros(0, dtype=np.int64)
        precision = np.zeros(0, dtype=np.int8)
        suspect = np.zeros(0, dtype=bool)

    attr_columns: dict[str, np.ndarray] = {}
    mapped = {cm.case, cm.activity, cm.timestamp} | ({cm.id} if cm.id else set())
    for col in df.columns:
        if col not in mapped:
            attr_columns[col] = df[col].to_numpy(dtype=object)
    attr_columns["orig_precision"] = np.array(
        [str(Granularity(int(p))) for p in precision], dtype=object
    )
    if suspect.any():
        col = np.empty(n, dtype=object)
        col[suspect] = True
        attr_columns["suspect_midnight"] = col

    log = EventLog(
        ids,
        case_ids,
        acts,
        times,
        attr_columns=attr_columns,
        raw_times=raw_times,
        provenance="csv",
        source_meta={
            "format": "csv",
            "delimiter": cfg.delimiter,
            "columns": list(df.columns),
            "column_map": {
                "case": cm.case,
                "activity": cm.activity,
                "timestamp": cm.timestamp,
                "id": cm.id,
            },
        },
        validate=False,
    )
    pairs = _order_pairs(log, cfg)
    return EventLog(
        log.ids,
        log.case_ids,
        log.acts,
        log.times,
        order_pairs=pairs,
        attr_columns=log.attr_columns,
        raw_times=log.raw_times,
        provenance=log.provenance,
        source_meta=log.source_meta,
    )


def _order_pairs(log: EventLog, cfg: IngestConfig) -> np.ndarray:
    n = len(log)
    source = cfg.explicit_order_source
    if source == "none" or n < 2:
        return np.zeros((0, 2), dtype=np.int64)
    if source == "row_order_global":
        idx = np.arange(n, dtype=np.int64)
        return np.column_stack([idx[:-1], idx[1:]])
    if source == "row_order_per_case":
        codes = log.case_codes
        order = np.argsort(codes, kind="stable")
        same = codes[order][:-1] == codes[order][1:]
        return np.column_stack([order[:-1][same], order[1:][same]]).astype(np.int64)
    # edge_list_file
    pairs = []
    for lineno, raw in enumerate(cfg.edge_list.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2 or not all(parts):
            raise ParseError(f"expected 'event_id_1,event_id_2', got {raw!r}", f"edge list line {lineno}")
        try:
            a = log.index_of_id(parts[0])
            b = log.index_of_id(parts[1])
        except KeyError as exc:
            raise ParseError(f"unknown event id {exc.args[0]!r}", f"edge list line {lineno}") from exc
        pairs.append((a, b))
    if not pairs:
        return np.zeros((0, 2), dtype=np.int64)
    return np.array(pairs, dtype=np.int64)


# -- XES -----------------------------------------------------------------------

_XES_TYPED = {"string", "date", "int", "float", "boolean", "id"}


def _parse_xes(data: bytes, cfg: IngestConfig) -> EventLog:
    try:
        root = ElementTree.fromstring(data)
    except ElementTree.ParseError as exc:
        raise ParseError(f"XES is not well-formed XML: {exc}") from exc
    if _local(root.tag) != "log":
        raise ParseError(f"expected <log> root element, got <{root.tag}>")

    rows: list[dict] = []
    warned: set[str] = set()
    trace_no = 0
    for trace in root:
        if _local(trace.tag) != "trace":
            continue
        trace_attrs = _attrs_of(trace, warned)
        case_id = str(trace_attrs.get("concept:name", f"trace{trace_no}"))
        event_no = 0
        for ev in trace:
            if _local(ev.tag) != "event":
                continue
            attrs = _attrs_of(ev, warned)
            if "concept:name" not in attrs:
                raise ParseError(f"event without concept:name in trace {case_id!r}")
            if "time:timestamp" not in attrs:
                raise ParseError(f"event without time:timestamp in trace {case_id!r}")
            rows.append(
                {
                    "case": case_id,
                    "attrs": attrs,
                    "trace_no": trace_no,
                    "event_no": event_no,
                }
            )
            event_no += 1
        trace_no += 1

    n = len(rows)
    ids = np.empty(n, dtype=object)
    case_ids = np.empty(n, dtype=object)
    acts = np.empty(n, dtype=object)
    times = np.zeros(n, dtype=np.int64)
    raw_times = np.empty(n, dtype=object)
    extra_keys: list[str] = []
    for r in rows:
        for k in r["attrs"]:
            if k in ("concept:name", "time:timestamp", "event_id"):
                continue
            if k not in extra_keys:
                extra_keys.append(k)
    attr_columns = {k: np.full(n, None, dtype=object) for k in extra_keys}

    for i, r in enumerate(rows):
        attrs = r["attrs"]
        ids[i] = str(attrs.get("event_id", f"e{i}"))
        case_ids[i] = r["case"]
        acts[i] = str(attrs["concept:name"])
        raw = str(attrs["time:timestamp"])
        raw_times[i] = raw
        dt = _parse_iso_scalar(raw)
        if dt is None:
            raise TimestampError(raw, ("iso8601",), f"trace {r['case']} event {r['event_no']}")
        if dt.tzinfo is None:
            times[i] = int(
                pd.Timestamp(dt).tz_localize(cfg.timezone).tz_convert("UTC").value // 10**6
            )
        else:
            times[i] = int(pd.Timestamp(dt).tz_convert("UTC").value // 10**6)
        for k in extra_keys:
            if k in attrs:
                attr_columns[k][i] = attrs[k]

    if "orig_precision" not in attr_columns:
        attr_columns["orig_precision"] = np.array(
            [str(_iso_precision(raw_times[i])) for i in range(n)], dtype=object
        )

    log = EventLog(
        ids,
        case_ids,
        acts,
        times,
        attr_columns=attr_columns,
        raw_times=raw_times,
        provenance="xes",
        source_meta={"format": "xes"},
        validate=False,
    )
    pairs = _order_pairs(log, cfg)
    return EventLog(
        ids,
        case_ids,
        acts,
        times,
        order_pairs=pairs,
        attr_columns=attr_columns,
        raw_times=raw_times,
        provenance="xes",
        source_meta={"format": "xes"},
    )


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _attrs_of(element, warned: set[str]) -> dict[str, object]:
    out: dict[str, object] = {}
    for child in element:
        tag = _local(child.tag)
        if tag in ("trace", "event"):
            continue
        key = child.get("key")
        if key is None:
            continue
        value = child.get("value", "")
        if tag not in _XES_TYPED:
            if tag not in warned:
                warned.add(tag)
                import warnings

                warnings.warn(f"ignoring unsupported XES attribute type <{tag}>", stacklevel=2)
            continue
        if tag == "int":
            out[key] = int(value)
        elif tag == "float":
            out[key] = float(value)
        elif tag == "boolean":
            out[key] = value.strip().lower() == "true"
        else:
            out[key] = value
    return out
