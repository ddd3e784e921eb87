"""Linear-extension machinery: exact counting, enumeration, uniform sampling,
and k-sequentialization of a consistent log into a multiset of traces.

Counting and exact-uniform sampling share one dynamic program over downsets
(order ideals): the number of extensions from a downset onward is the sum
over its currently-minimal continuations.  Exact uniformity is guaranteed
within the configured size thresholds; beyond them sampling falls back to
unweighted random minimal-element selection and marks results approximate.

Randomness comes from the stdlib Mersenne Twister (``random.Random``), seeded
per case from blake2b(seed, case id), so draws are reproducible across
platforms and independent of case scheduling.
"""

from __future__ import annotations

import hashlib
import random
from collections import Counter
from dataclasses import dataclass, field

from .errors import InconsistentLog, ResourceLimit
from .model import EventLog, check_consistency
from .order import Poset
from .variants import CasePoset, case_poset

__all__ = [
    "SamplerConfig",
    "SimplifiedLog",
    "SampledRun",
    "count_linear_extensions",
    "enumerate_sequential_runs",
    "sample_sequential_run",
    "k_sequentialize",
    "k_sequentialize_runs",
]


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    exact_uniform_max_elements: int = 20
    exact_uniform_max_downsets: int = 5_000_000

    def __post_init__(self):
        if self.exact_uniform_max_elements <= 0 or self.exact_uniform_max_downsets <= 0:
            raise ValueError("sampler thresholds must be positive")


@dataclass
class SimplifiedLog:
    """Multiset of activity traces; duplicates keep their multiplicity."""

    traces: list[tuple[str, ...]] = field(default_factory=list)
    approximate: bool = False

    def counter(self) -> Counter:
        return Counter(self.traces)

    def __len__(self) -> int:
        return len(self.traces)

    def __iter__(self):
        return iter(self.traces)


@dataclass(frozen=True)
class SampledRun:
    case_id: str
    trace: tuple[str, ...]
    event_indices: tuple[int, ...]  # log indices, in sampled order
    approximate: bool


def _pred_masks(p: Poset) -> list[int]:
    n = p.n
    masks = [0] * n
    for i in range(n):
        m = 0
        for q in p.predecessors(i):
            m |= 1 << int(q)
        masks[i] = m
    return masks


def _downset_layers(pred_masks: list[int], max_downsets: int):
    """All downsets grouped by size, smallest first; capped by ``max_downsets``."""
    n = len(pred_masks)
    layers = [{0}]
    total = 1
    for _ in range(n):
        nxt = set()
        for d in layers[-1]:
            for e in range(n):
                bit = 1 << e
                if not d & bit and (pred_masks[e] & d) == pred_masks[e]:
                    nxt.add(d | bit)
        total += len(nxt)
        if total > max_downsets:
            raise ResourceLimit(
                f"poset has more than {max_downsets} downsets; "
                "raise exact_uniform_max_downsets or use the fallback sampler"
            )
        layers.append(nxt)
    return layers


def _extension_counts(pred_masks: list[int], max_downsets: int) -> dict[int, int]:
    """counts[D] = number of linear extensions of the elements outside downset D."""
    n = len(pred_masks)
    layers = _downset_layers(pred_masks, max_downsets)
    counts: dict[int, int] = {(1 << n) - 1: 1}
    for layer in reversed(layers[:-1]):
        for d in layer:
            acc = 0
            for e in range(n):
                bit = 1 << e
                if not d & bit and (pred_masks[e] & d) == pred_masks[e]:
                    acc += counts[d | bit]
            counts[d] = acc
    return counts


def count_linear_extensions(p: Poset, *, max_downsets: int = 5_000_000) -> int:
    """Exact number of total orders extending ``p`` (downset dynamic program)."""
    if p.n == 0:
        return 1
    return _extension_counts(_pred_masks(p), max_downsets)[0]


def _labels_for(p: CasePoset | Poset) -> tuple[Poset, list[str]]:
    poset = p.poset if isinstance(p, CasePoset) else p
    labels = list(poset.labels) if poset.labels is not None else [str(i) for i in range(poset.n)]
    return poset, labels


def enumerate_sequential_runs(
    p: CasePoset | Poset, limit: int = 10_000
) -> tuple[list[tuple[str, ...]], bool]:
    """Linear extensions mapped through labels, in lexicographic order of the
    underlying element sequences; returns (traces, truncated).

    Distinct extensions can repeat a trace when labels repeat; one trace is
    returned per extension.
    """
    poset, labels = _labels_for(p)
    n = poset.n
    pred_masks = _pred_masks(poset)
    out: list[tuple[str, ...]] = []
    truncated = False
    seq: list[int] = []

    def dfs(done: int) -> bool:
        nonlocal truncated
        if len(seq) == n:
            out.append(tuple(labels[i] for i in seq))
            if len(out) >= limit:
                truncated = True
                return False
            return True
        for e in range(n):
            bit = 1 << e
            if not done & bit and (pred_masks[e] & done) == pred_masks[e]:
                seq.append(e)
                keep_going = dfs(done | bit)
                seq.pop()
                if not keep_going:
                    return False
        return True

    if n == 0:
        return [()], False
    dfs(0)
    return out, truncated


def _sample_order_exact(
    pred_masks: list[int], counts: dict[int, int], rng: random.Random
) -> list[int]:
    n = len(pred_masks)
    order = []
    d = 0
    for _ in range(n):
        r = rng.randrange(counts[d])
        for e in range(n):
            bit = 1 << e
            if not d & bit and (pred_masks[e] & d) == pred_masks[e]:
                w = counts[d | bit]
                if r < w:
                    order.append(e)
                    d |= bit
                    break
                r -= w
        else:
            raise AssertionError("no available element; counts table corrupt")
    return order


def _sample_order_fallback(pred_masks: list[int], rng: random.Random) -> list[int]:
    n = len(pred_masks)
    order = []
    d = 0
    for _ in range(n):
        avail = [
            e
            for e in range(n)
            if not d & (1 << e) and (pred_masks[e] & d) == pred_masks[e]
        ]
        e = avail[rng.randrange(len(avail))]
        order.append(e)
        d |= 1 << e
    return order


class _CaseSampler:
    """Per-poset sampling state so repeated draws reuse the DP table."""

    def __init__(self, poset: Poset, cfg: SamplerConfig):
        self.pred_masks = _pred_masks(poset)
        self.approximate = False
        self.counts: dict[int, int] | None = None
        if poset.n <= cfg.exact_uniform_max_elements:
            try:
                self.counts = _extension_counts(
                    self.pred_masks, cfg.exact_uniform_max_downsets
                )
            except ResourceLimit:
                self.counts = None
        if self.counts is None:
            self.approximate = True

    def draw(self, rng: random.Random) -> list[int]:
        if self.counts is not None:
            return _sample_order_exact(self.pred_masks, self.counts, rng)
        return _sample_order_fallback(self.pred_masks, rng)


def sample_sequential_run(
    p: CasePoset | Poset,
    cfg: SamplerConfig = SamplerConfig(),
    rng: random.Random | None = None,
) -> SampledRun:
    """One linear extension; exactly uniform within the configured thresholds,
    otherwise a random-minimal-element draw marked ``approximate``."""
    poset, labels = _labels_for(p)
    if rng is None:
        rng = random.Random(cfg.seed)
    sampler = _CaseSampler(poset, cfg)
    order = sampler.draw(rng)
    case_id = p.case_id if isinstance(p, CasePoset) else ""
    indices = (
        tuple(p.event_indices[i] for i in order)
        if isinstance(p, CasePoset)
        else tuple(order)
    )
    return SampledRun(
        case_id=case_id,
        trace=tuple(labels[i] for i in order),
        event_indices=indices,
        approximate=sampler.approximate,
    )


def _case_rng(seed: int, case_id: str) -> random.Random:
    digest = hashlib.blake2b(
        f"{seed}:{case_id}".encode("utf-8"), digest_size=8
    ).digest()
    return random.Random(int.from_bytes(digest, "big"))


def k_sequentialize_runs(
    log: EventLog, k: int, cfg: SamplerConfig = SamplerConfig()
) -> list[SampledRun]:
    """k independent sampled runs per case, cases in first-appearance order.

    Each case draws from its own RNG stream derived from (seed, case id), so
    output is identical regardless of evaluation order.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    report = check_consistency(log)
    if not report.consistent:
        raise InconsistentLog(report)
    runs: list[SampledRun] = []
    for case_id in log.case_table:
        cp = case_poset(log, case_id)
        sampler = _CaseSampler(cp.poset, cfg)
        rng = _case_rng(cfg.seed, case_id)
        for replica in range(1, k + 1):
            order = sampler.draw(rng)
            runs.append(
                SampledRun(
                    case_id=case_id,
                    trace=tuple(cp.poset.labels[i] for i in order),
                    event_indices=tuple(cp.event_indices[i] for i in order),
                    approximate=sampler.approximate,
                )
            )
    return runs


def k_sequentialize(
    log: EventLog, k: int, cfg: SamplerConfig = SamplerConfig()
) -> SimplifiedLog:
    """Simplified log with exactly ``k`` traces per case (k * |cases| total)."""
    runs = k_sequentialize_runs(log, k, cfg)
    return SimplifiedLog(
        traces=[r.trace for r in runs],
        approximate=any(r.approximate for r in runs),
    )
