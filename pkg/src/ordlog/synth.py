"""Seeded synthetic event logs.

The proprietary datasets behind the published figures are reproduced here
only as scale-faithful analogues: a purchase-to-pay-like log (2,654 cases /
16,226 events, activities clustering within the hour) and a road-fines-scale
log (150,000 cases / 560,000 events) used by the performance suite and the
benchmarks.  Everything is deterministic in the seed.
"""

from __future__ import annotations

import io

import numpy as np
import pandas as pd

from .model import EventLog

__all__ = [
    "synth_p2p",
    "synth_roadfines_csv",
    "random_consistent_log",
]

_P2P_BASE = (
    "Create Purchase Requisition",
    "Create Purchase Order Item",
    "Print and Send Purchase Order",
    "Receive Goods",
    "Scan Invoice",
    "Book Invoice",
)
_P2P_EXTRA = ("Change Price", "Remove Payment Block")

_FINE_ACTS = (
    "Create Fine",
    "Send Fine",
    "Insert Fine Notification",
    "Add penalty",
    "Payment",
    "Send for Credit Collection",
    "Insert Date Appeal to Prefecture",
    "Send Appeal to Prefecture",
    "Receive Result Appeal from Prefecture",
    "Notify Result Appeal to Offender",
)

_MINUTE = 60_000
_HOUR = 3_600_000
_DAY = 86_400_000


def synth_p2p(seed: int = 7, cases: int = 2654, events: int = 16226) -> EventLog:
    """P2P-like log; gaps are often sub-hour so coarsening to hours creates ties."""
    base_len = len(_P2P_BASE)
    extra_cases = events - cases * base_len
    if extra_cases < 0 or extra_cases > cases:
        raise ValueError("events must lie in [cases*6, cases*7] for this generator")
    rng = np.random.default_rng(seed)
    ids, case_ids, acts, times = [], [], [], []
    # all activity within one calendar year so the coarsest bucket merges everything
    year_start = 1_640_995_200_000  # 2022-01-01T00:00:00Z
    starts = year_start + rng.integers(0, 300 * _DAY, size=cases)
    eid = 0
    for c in range(cases):
        sequence = list(_P2P_BASE)
        if c < extra_cases:
            extra = _P2P_EXTRA[int(rng.integers(len(_P2P_EXTRA)))]
            sequence.insert(int(rng.integers(1, base_len)), extra)
        t = int(starts[c])
        for a in sequence:
            ids.append(f"p{eid}")
            case_ids.append(f"po-{c:05d}")
            acts.append(a)
            times.append(t)
            if rng.random() < 0.55:
                t += int(rng.integers(1, 50)) * _MINUTE
            else:
                t += int(rng.integers(1, 40)) * _HOUR
            eid += 1
    return EventLog(
        np.array(ids, dtype=object),
        np.array(case_ids, dtype=object),
        np.array(acts, dtype=object),
        np.array(times, dtype=np.int64),
        provenance=f"synthetic p2p analogue (seed={seed})",
    )


def synth_roadfines_csv(
    seed: int = 11, cases: int = 150_000, events: int = 560_000
) -> bytes:
    """Road-fines-scale CSV (event_id,case_id,activity,timestamp) of exact size."""
    rng = np.random.default_rng(seed)
    lengths = rng.integers(2, 8, size=cases)
    # nudge lengths until the total hits the requested event count exactly
    diff = int(events - lengths.sum())
    while diff != 0:
        idx = rng.integers(0, cases, size=min(abs(diff), cases))
        if diff > 0:
            room = lengths[idx] < 12
            lengths[idx[room]] += 1
            diff = int(events - lengths.sum())
        else:
            room = lengths[idx] > 1
            lengths[idx[room]] -= 1
            diff = int(events - lengths.sum())
    n = int(lengths.sum())
    case_of = np.repeat(np.arange(cases, dtype=np.int64), lengths)
    pos = np.arange(n, dtype=np.int64)
    starts_flat = np.zeros(cases, dtype=np.int64)
    starts_flat[1:] = np.cumsum(lengths)[:-1]
    pos -= np.repeat(starts_flat, lengths)

    base = 1_546_300_800_000  # 2019-01-01T00:00:00Z
    case_start = base + rng.integers(0, 3 * 365 * _DAY // _MINUTE, size=cases) * _MINUTE
    gap_kind = rng.random(n)
    gaps = np.where(
        gap_kind < 0.4,
        rng.integers(1, 120, size=n) * _MINUTE,
        np.where(
            gap_kind < 0.8,
            rng.integers(1, 48, size=n) * _HOUR,
            rng.integers(1, 60, size=n) * _DAY,
        ),
    ).astype(np.int64)
    gaps[pos == 0] = 0
    offsets = np.cumsum(gaps)
    offsets -= np.repeat(offsets[starts_flat], lengths)
    times = case_start[case_of] + offsets

    act_idx = np.where(
        pos == 0,
        0,
        np.where(pos == 1, 1, rng.integers(2, len(_FINE_ACTS), size=n)),
    )
    acts = np.array(_FINE_ACTS, dtype=object)[act_idx]

    df = pd.DataFrame(
        {
            "event_id": [f"f{i}" for i in range(n)],
            "case_id": np.char.add("fine-", case_of.astype(str)),
            "activity": acts,
            "timestamp": pd.to_datetime(times, unit="ms", utc=True)
            .strftime("%d-%m-%Y:%H.%M.%S")
            .to_numpy(),
        }
    )
    buf = io.StringIO()
    df.to_csv(buf, index=False, lineterminator="\n")
    return buf.getvalue().encode("utf-8")


def random_consistent_log(
    rng: np.random.Generator,
    *,
    max_cases: int = 4,
    max_events: int = 10,
    time_pool: int = 5,
    edge_prob: float = 0.3,
) -> EventLog:
    """Small random log whose explicit order respects the timestamps.

    Edges are drawn forward along a random permutation, restricted to pairs
    with non-decreasing times, which keeps the generators acyclic and the log
    consistent by construction; the small time pool forces equal-timestamp
    collisions so negative-transitivity cases get exercised.
    """
    n = int(rng.integers(1, max_events + 1))
    n_cases = int(rng.integers(1, max_cases + 1))
    case_ids = [f"c{rng.integers(n_cases)}" for _ in range(n)]
    acts = [f"act{rng.integers(1, 6)}" for _ in range(n)]
    times = rng.integers(0, time_pool, size=n).astype(np.int64) * _HOUR
    perm = rng.permutation(n)
    rank = np.empty(n, dtype=np.int64)
    rank[perm] = np.arange(n)
    pairs = []
    for i in range(n):
        for j in range(n):
            if rank[i] < rank[j] and times[i] <= times[j] and rng.random() < edge_prob:
                pairs.append((i, j))
    return EventLog(
        np.array([f"e{i}" for i in range(n)], dtype=object),
        np.array(case_ids, dtype=object),
        np.array(acts, dtype=object),
        times,
        order_pairs=np.array(pairs, dtype=np.int64) if pairs else None,
        provenance="random consistent log",
    )
