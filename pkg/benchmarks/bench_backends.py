"""Compare the numba and pure-numpy kernel backends.

Times the two jitted kernels in isolation and the end-to-end variant
grouping they feed.  The current process keeps its backend; the other one
runs in a subprocess with ORDLOG_BACKEND forced, so both measurements use a
fully warmed interpreter.

    python3 benchmarks/bench_backends.py [--cases 150000] [--events 560000]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _build_inputs(cases: int, events: int, seed: int = 3):
    rng = np.random.default_rng(seed)
    lengths = np.maximum(1, rng.poisson(events / cases, size=cases)).astype(np.int64)
    starts = np.zeros(cases, dtype=np.int64)
    starts[1:] = np.cumsum(lengths)[:-1]
    total = int(lengths.sum())
    tiers = rng.integers(0, 5, size=total).astype(np.int64)
    acts = rng.integers(0, 11, size=total).astype(np.int64)
    return starts, lengths, tiers, acts


def _bench_kernels(cases: int, events: int, repeats: int = 5) -> dict:
    from ordlog import _kernels

    _kernels.warm_up()
    starts, lengths, tiers, acts = _build_inputs(cases, events)

    best_hash = min(
        _timed(lambda: _kernels.case_signature_hashes(starts, lengths, tiers, acts))
        for _ in range(repeats)
    )

    rng = np.random.default_rng(0)
    mats = []
    for _ in range(200):
        n = int(rng.integers(4, 40))
        rel = np.triu(rng.random((n, n)) < 0.15, 1)
        mats.append(rel)
    best_closure = min(
        _timed(lambda: [_kernels.close_bool_matrix(m) for m in mats])
        for _ in range(repeats)
    )

    from ordlog.model import EventLog
    from ordlog.variants import group_variants

    n_events = int(lengths.sum())
    log = EventLog(
        np.array([f"e{i}" for i in range(n_events)], dtype=object),
        np.char.add("c", np.repeat(np.arange(cases), lengths).astype(str)).astype(object),
        np.array([f"act{a}" for a in acts.tolist()], dtype=object),
        tiers * 3_600_000 + np.repeat(np.arange(cases, dtype=np.int64), lengths) * 86_400_000,
    )
    best_group = min(_timed(lambda: group_variants(log)) for _ in range(3))

    return {
        "backend": _kernels.BACKEND,
        "signature_hash_s": best_hash,
        "closure_batch_s": best_closure,
        "group_variants_s": best_group,
        "events": n_events,
        "cases": cases,
    }


def _timed(fn) -> float:
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cases", type=int, default=150_000)
    parser.add_argument("--events", type=int, default=560_000)
    parser.add_argument("--json-only", action="store_true", help="emit one JSON line (subprocess mode)")
    args = parser.parse_args()

    mine = _bench_kernels(args.cases, args.events)
    if args.json_only:
        print(json.dumps(mine))
        return 0

    other_backend = "numpy" if mine["backend"] == "numba" else "numba"
    env = dict(os.environ, ORDLOG_BACKEND=other_backend)
    proc = subprocess.run(
        [sys.executable, __file__, "--cases", str(args.cases), "--events", str(args.events), "--json-only"],
        env=env,
        capture_output=True,
        text=True,
    )
    rows = [mine]
    if proc.returncode == 0:
        rows.append(json.loads(proc.stdout.strip().splitlines()[-1]))
    else:
        print(f"(skipping {other_backend} backend: {proc.stderr.strip().splitlines()[-1]})")

    print(f"\n{mine['events']} events / {mine['cases']} cases")
    header = f"{'backend':<8} {'sig-hash':>10} {'closure x200':>13} {'group_variants':>15}"
    print(header)
    print("-" * len(header))
    for r in rows:
        print(
            f"{r['backend']:<8} {r['signature_hash_s']*1000:>8.1f}ms "
            f"{r['closure_batch_s']*1000:>11.1f}ms {r['group_variants_s']:>13.2f}s"
        )
    if len(rows) == 2:
        for key, label in [
            ("signature_hash_s", "signature hash"),
            ("closure_batch_s", "closure batch"),
            ("group_variants_s", "variant grouping"),
        ]:
            a, b = rows[0][key], rows[1][key]
            slow, fast = (rows[0], rows[1]) if a > b else (rows[1], rows[0])
            ratio = slow[key] / fast[key] if fast[key] > 0 else float("inf")
            print(f"{label}: {fast['backend']} is {ratio:.1f}x faster")
    return 0


if __name__ == "__main__":
    sys.exit(main())
