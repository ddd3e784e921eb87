"""Timestamp coarsening and domain-knowledge tiebreakers.

A time aggregator truncates timestamps to the start of their granularity
bucket (a monotone, idempotent map); a tiebreaker is a strict partial order
over activity names used to order same-case events that share an aggregated
timestamp.  ``apply`` performs both transformations and returns a new,
still-consistent event log.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta
from zoneinfo import ZoneInfo

import numpy as np

from .errors import CyclicOrder, InconsistentLog, TiebreakerConflict
from .model import EventLog, Granularity, check_consistency

__all__ = [
    "TimeAggregator",
    "Tiebreaker",
    "TiebreakerConflictItem",
    "aggregate_time",
    "validate_tiebreaker",
    "apply",
]

_MS = {
    Granularity.SECOND: 1000,
    Granularity.MINUTE: 60_000,
    Granularity.HOUR: 3_600_000,
    Granularity.DAY: 86_400_000,
}
_DAY_MS = 86_400_000
_EPOCH_WEEKDAY = 3  # 1970-01-01 was a Thursday (ISO Monday == 0)


class TimeAggregator:
    """Monotone truncation of timestamps to granularity-bucket starts.

    Buckets follow the calendar of ``timezone`` (IANA name); weeks are
    ISO-8601 weeks starting Monday.  The bucket representative is the bucket
    start instant, so aggregation is idempotent.
    """

    def __init__(self, granularity: Granularity, timezone: str = "UTC"):
        self.granularity = Granularity(granularity)
        self.timezone = timezone
        self._tz = ZoneInfo(timezone)

    def __repr__(self):
        return f"TimeAggregator({self.granularity}, {self.timezone!r})"

    def __call__(self, t: int) -> int:
        return int(self.apply_array(np.array([t], dtype=np.int64))[0])

    def apply_array(self, times: np.ndarray) -> np.ndarray:
        times = np.asarray(times, dtype=np.int64)
        g = self.granularity
        if g == Granularity.MILLISECOND or times.size == 0:
            return times.copy()
        # second/minute boundaries agree across (minute-aligned) zones
        if g in (Granularity.SECOND, Granularity.MINUTE):
            step = _MS[g]
            return times - times % step
        if self.timezone == "UTC":
            if g in (Granularity.HOUR, Granularity.DAY):
                step = _MS[g]
                return times - times % step
            if g == Granularity.WEEK:
                days = times // _DAY_MS
                monday = days - (days + _EPOCH_WEEKDAY) % 7
                return monday * _DAY_MS
            unit = "M" if g == Granularity.MONTH else "Y"
            dt = times.astype("datetime64[ms]")
            return dt.astype(f"datetime64[{unit}]").astype("datetime64[ms]").astype(np.int64)
        return self._apply_zoned(times)

    def _apply_zoned(self, times: np.ndarray) -> np.ndarray:
        # local-calendar truncation; computed per unique second, mapped back
        secs = times // 1000
        uniq, inverse = np.unique(secs, return_inverse=True)
        out = np.empty(len(uniq), dtype=np.int64)
        for i, s in enumerate(uniq):
            out[i] = self._truncate_local(int(s))
        return out[inverse]

    def _truncate_local(self, sec: int) -> int:
        dt = datetime.fromtimestamp(sec, self._tz)
        g = self.granularity
        if g == Granularity.HOUR:
            dt = dt.replace(minute=0, second=0, microsecond=0)
        elif g == Granularity.DAY:
            dt = dt.replace(hour=0, minute=0, second=0, microsecond=0)
        elif g == Granularity.WEEK:
            monday = dt.date() - timedelta(days=dt.weekday())
            dt = dt.replace(
                year=monday.year, month=monday.month, day=monday.day,
                hour=0, minute=0, second=0, microsecond=0,
            )
        elif g == Granularity.MONTH:
            dt = dt.replace(day=1, hour=0, minute=0, second=0, microsecond=0)
        elif g == Granularity.YEAR:
            dt = dt.replace(month=1, day=1, hour=0, minute=0, second=0, microsecond=0)
        return int(dt.timestamp()) * 1000


def aggregate_time(t: int, ta: TimeAggregator) -> int:
    """Bucket-start timestamp of ``t`` under aggregator ``ta``."""
    return ta(t)


class Tiebreaker:
    """Strict partial order over activity names.

    Construction transitively closes the given pairs and rejects inputs whose
    closure is cyclic (which would break irreflexivity/asymmetry).
    """

    def __init__(self, pairs=()):
        self.pairs = frozenset((str(a), str(b)) for a, b in pairs)
        self.closed = self._close(self.pairs)

    @staticmethod
    def _close(pairs: frozenset) -> frozenset:
        succ: dict[str, set[str]] = {}
        for a, b in pairs:
            if a == b:
                raise CyclicOrder(f"tiebreaker orders activity {a!r} before itself", [a, a])
            succ.setdefault(a, set()).add(b)
        closed: set[tuple[str, str]] = set()
        for start in succ:
            seen: set[str] = set()
            stack = list(succ[start])
            while stack:
                x = stack.pop()
                if x in seen:
                    continue
                seen.add(x)
                stack.extend(succ.get(x, ()))
            if start in seen:
                raise CyclicOrder(
                    f"tiebreaker contains a cycle through activity {start!r}", [start]
                )
            closed.update((start, x) for x in seen)
        return frozenset(closed)

    @classmethod
    def from_text(cls, text: str) -> "Tiebreaker":
        """Parse lines of the form ``activityA -> activityB``; ``#`` comments."""
        pairs = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "->" not in line:
                raise ValueError(f"tiebreaker line {lineno}: expected 'a -> b', got {raw!r}")
            a, b = (part.strip() for part in line.split("->", 1))
            if not a or not b:
                raise ValueError(f"tiebreaker line {lineno}: empty activity name")
            pairs.append((a, b))
        return cls(pairs)

    def __bool__(self):
        return bool(self.pairs)

    def __eq__(self, other):
        if not isinstance(other, Tiebreaker):
            return NotImplemented
        return self.closed == other.closed

    def __hash__(self):
        return hash(self.closed)

    def __repr__(self):
        return f"Tiebreaker({sorted(self.pairs)})"


EMPTY_TIEBREAKER = Tiebreaker()


@dataclass(frozen=True)
class TiebreakerConflictItem:
    """A tiebreaker-induced event pair that would close into a cycle."""

    first_id: str
    second_id: str
    first_activity: str
    second_activity: str
    contradicts: str  # "explicit-order" or "tiebreaker-chain"


def _induced_pairs(tb: Tiebreaker, log: EventLog) -> np.ndarray:
    """Event pairs added by Def.-style tiebreaking: same case, equal (already
    aggregated) timestamp, and comparable activities."""
    if not tb or len(log) == 0:
        return np.zeros((0, 2), dtype=np.int64)
    closed = tb.closed
    t = log.times
    order, starts, lengths = log.case_slices()
    out: list[tuple[int, int]] = []
    for k in range(len(starts)):
        idx = order[starts[k] : starts[k] + lengths[k]]
        if len(idx) < 2:
            continue
        buckets: dict[int, list[int]] = {}
        for i in idx:
            buckets.setdefault(int(t[i]), []).append(int(i))
        for members in buckets.values():
            if len(members) < 2:
                continue
            for u in members:
                for v in members:
                    if u != v and (log.acts[u], log.acts[v]) in closed:
                        out.append((u, v))
    if not out:
        return np.zeros((0, 2), dtype=np.int64)
    return np.array(out, dtype=np.int64)


def _is_acyclic(n: int, pairs: np.ndarray) -> bool:
    indeg: dict[int, int] = {}
    succ: dict[int, list[int]] = {}
    for a, b in pairs:
        a, b = int(a), int(b)
        succ.setdefault(a, []).append(b)
        indeg[b] = indeg.get(b, 0) + 1
        indeg.setdefault(a, 0)
    queue = [v for v, d in indeg.items() if d == 0]
    seen = 0
    while queue:
        u = queue.pop()
        seen += 1
        for v in succ.get(u, ()):
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    return seen == len(indeg)


def _reaches(succ: dict[int, list[int]], start: int, goal: int) -> bool:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in succ.get(u, ()):
            if v == goal:
                return True
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return False


def validate_tiebreaker(tb: Tiebreaker, log: EventLog) -> list[TiebreakerConflictItem]:
    """Conflicts that adding the tiebreaker-induced pairs would create.

    Equal-timestamp grouping uses the log's current timestamps, so callers
    aggregate first and validate against the aggregated log.
    """
    induced = _induced_pairs(tb, log)
    if len(induced) == 0:
        return []
    combined = np.concatenate([log.order_pairs, induced])
    if _is_acyclic(len(log), combined):
        return []
    gens_succ: dict[int, list[int]] = {}
    for a, b in log.order_pairs:
        gens_succ.setdefault(int(a), []).append(int(b))
    all_succ: dict[int, list[int]] = {}
    for a, b in combined:
        all_succ.setdefault(int(a), []).append(int(b))
    conflicts = []
    for u, v in induced:
        u, v = int(u), int(v)
        if _reaches(gens_succ, v, u):
            source = "explicit-order"
        elif _reaches(all_succ, v, u):
            source = "tiebreaker-chain"
        else:
            continue
        conflicts.append(
            TiebreakerConflictItem(
                log.ids[u], log.ids[v], log.acts[u], log.acts[v], source
            )
        )
    return conflicts


def apply(
    log: EventLog, ta: TimeAggregator, tb: Tiebreaker | None = None
) -> EventLog:
    """Aggregate timestamps and add tiebreaker-induced explicit-order pairs.

    The returned log keeps every event and non-time attribute; its explicit
    order is the old one plus pairs between same-case events that share an
    aggregated timestamp and whose activities the tiebreaker orders.  The
    union is transitively closed on demand (the raw union need not be
    transitive) and the result is verified to still be consistent.
    """
    tb = tb or EMPTY_TIEBREAKER
    report = check_consistency(log)
    if not report.consistent:
        raise InconsistentLog(report)
    agg_times = ta.apply_array(log.times)
    interim = log.replace(times=agg_times, validate_order=False)
    conflicts = validate_tiebreaker(tb, interim)
    if conflicts:
        raise TiebreakerConflict(conflicts)
    induced = _induced_pairs(tb, interim)
    if len(induced):
        pairs = np.unique(np.concatenate([log.order_pairs, induced]), axis=0)
    else:
        pairs = log.order_pairs
    out = log.replace(
        times=agg_times,
        order_pairs=pairs,
        provenance=f"{log.provenance} | ta={ta.granularity} tz={ta.timezone}"
        + (f" tb={len(tb.pairs)} pair(s)" if tb else ""),
    )
    final = check_consistency(out)
    if not final.consistent:  # cannot happen for monotone aggregators
        raise InconsistentLog(final)
    return out
