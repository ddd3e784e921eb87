"""Writers: event logs back to CSV/XES, and sequentialized logs for miners.

CSV export reproduces the source byte-for-byte for logs that came from CSV
(original header order, original timestamp text).  XES export emits one trace
per case with ISO timestamps; derived attributes travel along as plain string
attributes so a re-parse reconstructs the identical log.
"""

from __future__ import annotations

import csv
import io
from xml.etree import ElementTree
import numpy as np

from .model import EventLog, utc_datetime

__all__ = [
    "write_csv",
    "write_xes",
    "write_simplified_csv",
    "write_simplified_xes",
]

_INTERNAL_ATTRS = ("orig_precision", "suspect_midnight")


def _iso_ms(ms: int) -> str:
    dt = utc_datetime(ms)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.") + f"{dt.microsecond // 1000:03d}+00:00"


def _timestamp_text(log: EventLog, i: int) -> str:
    if log.raw_times is not None and log.raw_times[i] is not None:
        return str(log.raw_times[i])
    return _iso_ms(int(log.times[i]))


def write_csv(log: EventLog) -> bytes:
    """Render the log as CSV; source-derived logs keep their original layout."""
    meta = log.source_meta if log.source_meta.get("format") == "csv" else None
    if meta:
        columns = meta["columns"]
        cm = meta["column_map"]
        delimiter = meta.get("delimiter", ",")
    else:
        extra = [k for k in log.attr_columns if k not in _INTERNAL_ATTRS]
        columns = ["event_id", "case_id", "activity", "timestamp", *extra]
        cm = {"case": "case_id", "activity": "activity", "timestamp": "timestamp", "id": "event_id"}
        delimiter = ","
    role_of = {cm["case"]: "case", cm["activity"]: "activity", cm["timestamp"]: "timestamp"}
    if cm.get("id"):
        role_of[cm["id"]] = "id"

    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    writer.writerow(columns)
    for i in range(len(log)):
        row = []
        for col in columns:
            role = role_of.get(col)
            if role == "case":
                row.append(log.case_ids[i])
            elif role == "activity":
                row.append(log.acts[i])
            elif role == "timestamp":
                row.append(_timestamp_text(log, i))
            elif role == "id":
                row.append(log.ids[i])
            else:
                v = log.attr_columns.get(col)
                row.append("" if v is None or v[i] is None else v[i])
        writer.writerow(row)
    return buf.getvalue().encode("utf-8")


def _xes_attr(parent, key: str, value) -> None:
    if isinstance(value, bool):
        ElementTree.SubElement(parent, "boolean", key=key, value="true" if value else "false")
    elif isinstance(value, (int, np.integer)):
        ElementTree.SubElement(parent, "int", key=key, value=str(int(value)))
    elif isinstance(value, (float, np.floating)):
        ElementTree.SubElement(parent, "float", key=key, value=repr(float(value)))
    else:
        ElementTree.SubElement(parent, "string", key=key, value=str(value))


def write_xes(log: EventLog) -> bytes:
    """One trace per case (first-appearance order), events in log order."""
    root = ElementTree.Element("log", {"xes.version": "1.0", "xes.features": ""})
    ElementTree.SubElement(
        root,
        "extension",
        name="Concept",
        prefix="concept",
        uri="http://www.xes-standard.org/concept.xesext",
    )
    ElementTree.SubElement(
        root,
        "extension",
        name="Time",
        prefix="time",
        uri="http://www.xes-standard.org/time.xesext",
    )
    order, starts, lengths = log.case_slices()
    for k in range(len(starts)):
        idx = np.sort(order[starts[k] : starts[k] + lengths[k]])
        trace = ElementTree.SubElement(root, "trace")
        _xes_attr(trace, "concept:name", log.case_ids[idx[0]])
        for i in idx:
            ev = ElementTree.SubElement(trace, "event")
            _xes_attr(ev, "concept:name", log.acts[i])
            ElementTree.SubElement(
                ev, "date", key="time:timestamp", value=_iso_ms(int(log.times[i]))
            )
            _xes_attr(ev, "event_id", log.ids[i])
            for key, col in log.attr_columns.items():
                if col[i] is not None:
                    _xes_attr(ev, key, col[i])
    return _tostring(root)


def _tostring(root) -> bytes:
    ElementTree.indent(root)
    return ElementTree.tostring(root, encoding="utf-8", xml_declaration=True)


# -- sequentialized (simplified) logs -----------------------------------------


def _strictly_increasing_times(times: list[int]) -> list[int]:
    """Bump repeated bucket timestamps by 1 ms so downstream total orders match
    the sampled order; bucket starts are preserved for first events."""
    out = []
    prev = None
    for t in times:
        t2 = t if prev is None else max(t, prev + 1)
        out.append(t2)
        prev = t2
    return out


def write_simplified_xes(log: EventLog, runs) -> bytes:
    """XES for sampled runs: ``runs`` yields (case_id, replica_no, event_indices).

    Trace names are suffixed ``#<replica>``; within-trace timestamps are made
    strictly increasing with millisecond bumps (recorded in the log metadata).
    """
    root = ElementTree.Element("log", {"xes.version": "1.0", "xes.features": ""})
    ElementTree.SubElement(
        root,
        "extension",
        name="Concept",
        prefix="concept",
        uri="http://www.xes-standard.org/concept.xesext",
    )
    ElementTree.SubElement(
        root,
        "extension",
        name="Time",
        prefix="time",
        uri="http://www.xes-standard.org/time.xesext",
    )
    _xes_attr(
        root,
        "sequentialization:note",
        "within-trace timestamps bumped by 1ms where buckets tie, preserving sampled order",
    )
    for case_id, replica, event_indices in runs:
        trace = ElementTree.SubElement(root, "trace")
        _xes_attr(trace, "concept:name", f"{case_id}#{replica}")
        times = _strictly_increasing_times([int(log.times[i]) for i in event_indices])
        for i, t in zip(event_indices, times):
            ev = ElementTree.SubElement(trace, "event")
            _xes_attr(ev, "concept:name", log.acts[i])
            ElementTree.SubElement(ev, "date", key="time:timestamp", value=_iso_ms(t))
            _xes_attr(ev, "event_id", f"{log.ids[i]}#{replica}")
    return _tostring(root)


def write_simplified_csv(log: EventLog, runs) -> bytes:
    """CSV (case, activity, position, timestamp) for sampled runs."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["case", "activity", "position", "timestamp"])
    for case_id, replica, event_indices in runs:
        times = _strictly_increasing_times([int(log.times[i]) for i in event_indices])
        for pos, (i, t) in enumerate(zip(event_indices, times)):
            writer.writerow([f"{case_id}#{replica}", log.acts[i], pos, _iso_ms(t)])
    return buf.getvalue().encode("utf-8")
