"""Partial-order variants: cases grouped by label-preserving poset isomorphism.

Each case induces a labeled poset (the combined explicit+time order restricted
to its events).  Two cases belong to the same variant exactly when their
posets are isomorphic respecting activity labels.  Keys come from an exact
canonical form: iterative refinement guides a backtracking search for the
lexicographically least linear-extension encoding, with structural twins
pruned (swapping two elements with equal labels and identical relation rows
is an automorphism, so one branch suffices).

Grouping has a vectorized path for cases untouched by the explicit order:
their posets are strict weak orders, where isomorphism degenerates to
equality of the per-tier activity multiset sequence.  That pre-grouping is
hash-assisted but never trusted: groups are merged by exact canonical key at
the end, so a hash collision costs time, not correctness.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InconsistentLog
from .model import EventLog, check_consistency
from .order import Poset, transitive_reduction

__all__ = [
    "CasePoset",
    "PartialOrderVariant",
    "case_poset",
    "canonical_form",
    "canonical_key",
    "group_variants",
    "variant_to_json",
]


@dataclass(frozen=True)
class CasePoset:
    """Labeled poset of one case; elements follow log order of its events."""

    case_id: str
    poset: Poset
    event_ids: tuple[str, ...]
    event_indices: tuple[int, ...]


@dataclass(frozen=True)
class PartialOrderVariant:
    canonical_key: str
    activities: tuple[str, ...]  # node labels in canonical order
    hasse_edges: tuple[tuple[int, int], ...]
    case_ids: tuple[str, ...]
    frequency: int


def _ensure_consistent(log: EventLog) -> None:
    if log.has_order:
        t = log.times
        ok = t[log.order_pairs[:, 0]] <= t[log.order_pairs[:, 1]]
        if not bool(ok.all()):
            raise InconsistentLog(check_consistency(log))


def case_poset(log: EventLog, case_id: str) -> CasePoset:
    """Combined order restricted to the events of ``case_id``."""
    _ensure_consistent(log)
    idx = log.case_indices(case_id)
    if len(idx) == 0:
        raise KeyError(f"unknown case id {case_id!r}")
    t = log.times[idx]
    rel = t[:, None] < t[None, :]
    if log.has_order:
        rel = rel | log.explicit_matrix_for(idx)
    labels = [log.acts[i] for i in idx]
    return CasePoset(
        case_id=case_id,
        poset=Poset(rel, labels),
        event_ids=tuple(log.ids[i] for i in idx),
        event_indices=tuple(int(i) for i in idx),
    )


# -- canonical form ------------------------------------------------------------


def _refine_colors(lrank: list[int], preds: list[np.ndarray], succs: list[np.ndarray]) -> list[int]:
    colors = list(lrank)
    n = len(colors)
    classes = len(set(colors))
    while True:
        sigs = [
            (
                colors[i],
                tuple(sorted(colors[int(q)] for q in preds[i])),
                tuple(sorted(colors[int(q)] for q in succs[i])),
            )
            for i in range(n)
        ]
        ranking = {s: r for r, s in enumerate(sorted(set(sigs)))}
        colors = [ranking[s] for s in sigs]
        new_classes = len(set(colors))
        if new_classes == classes:
            return colors
        classes = new_classes


def canonical_form(p: Poset) -> tuple[bytes, tuple[int, ...]]:
    """Exact canonical encoding and the element placement that realizes it.

    The encoding is the minimum, over all linear extensions, of the sequence
    of per-position keys (label rank, positions of all predecessors); equal
    encodings characterize label-preserving isomorphism because the keys
    reconstruct both labels and the full relation.
    """
    if p.labels is None:
        raise ValueError("canonical form needs element labels")
    n = p.n
    label_table = sorted(set(p.labels))
    if n == 0:
        return b"poset:0||", ()
    lrank_of = {a: r for r, a in enumerate(label_table)}
    lrank = [lrank_of[a] for a in p.labels]
    rel = p.rel
    preds = [np.flatnonzero(rel[:, j]) for j in range(n)]
    succs = [np.flatnonzero(rel[i, :]) for i in range(n)]
    colors = _refine_colors(lrank, preds, succs)
    twin_class: dict[tuple, int] = {}
    twin_of = []
    for i in range(n):
        key = (lrank[i], rel[i].tobytes(), rel[:, i].tobytes())
        twin_of.append(twin_class.setdefault(key, len(twin_class)))

    pred_count = [len(preds[i]) for i in range(n)]
    pos = [-1] * n
    placed: list[int] = []
    cur_keys: list[tuple] = []

    def key_of(e: int) -> tuple:
        return (lrank[e], tuple(sorted(pos[int(q)] for q in preds[e])))

    def candidates() -> list[int]:
        """Min-key available elements, one per twin class.

        The subtree minimum always starts with a minimal position key, so
        larger-keyed candidates can never contribute the canonical form.
        """
        avail = [e for e in range(n) if pos[e] < 0 and pred_count[e] == 0]
        keyed = [(key_of(e), e) for e in avail]
        min_key = min(k for k, _ in keyed)
        mins = [(k, e) for k, e in keyed if k == min_key]
        seen_twins = set()
        out = []
        for _, e in sorted(mins, key=lambda ke: (colors[ke[1]], ke[1])):
            if twin_of[e] not in seen_twins:
                seen_twins.add(twin_of[e])
                out.append(e)
        return out

    def place(e: int) -> None:
        pos[e] = len(placed)
        placed.append(e)
        for q in succs[e]:
            pred_count[int(q)] -= 1

    def unplace(e: int) -> None:
        for q in succs[e]:
            pred_count[int(q)] += 1
        placed.pop()
        pos[e] = -1

    # greedy leftmost completion seeds the incumbent
    while len(placed) < n:
        e = candidates()[0]
        cur_keys.append(key_of(e))
        place(e)
    best_keys = list(cur_keys)
    best_perm = tuple(placed)
    while placed:
        unplace(placed[-1])
    cur_keys.clear()

    def dfs(tight: bool) -> None:
        """Exhaust min-key branches; ``tight`` tracks prefix equality with the
        incumbent so strictly larger keys prune.  Leaves re-compare in full,
        which keeps replacement sound even after mid-search improvements."""
        nonlocal best_keys, best_perm
        depth = len(placed)
        if depth == n:
            if cur_keys < best_keys:
                best_keys = list(cur_keys)
                best_perm = tuple(placed)
            return
        for e in candidates():
            key = key_of(e)
            if tight and key > best_keys[depth]:
                continue
            cur_keys.append(key)
            place(e)
            dfs(tight and key == best_keys[depth])
            unplace(e)
            cur_keys.pop()

    dfs(tight=True)
    body = ";".join(f"{k[0]}:{','.join(map(str, k[1]))}" for k in best_keys)
    table = "\x1f".join(label_table)
    form = f"poset:{n}|{table}|{body}".encode("utf-8")
    return form, best_perm


def canonical_key(p: CasePoset | Poset) -> str:
    """Opaque, platform-stable key; equal exactly for isomorphic labeled posets."""
    poset = p.poset if isinstance(p, CasePoset) else p
    form, _ = canonical_form(poset)
    return hashlib.sha256(form).hexdigest()


def _representative_layout(poset: Poset) -> tuple[tuple[str, ...], tuple[tuple[int, int], ...]]:
    form, perm = canonical_form(poset)
    inv = {orig: c for c, orig in enumerate(perm)}
    labels = tuple(poset.labels[orig] for orig in perm)
    edges = tuple(
        sorted((inv[i], inv[j]) for i, j in transitive_reduction(poset))
    )
    return labels, edges


# -- grouping ------------------------------------------------------------------


def _cumsum0(lengths: np.ndarray) -> np.ndarray:
    out = np.zeros(len(lengths) + 1, dtype=np.int64)
    np.cumsum(lengths, out=out[1:])
    return out


def swo_canonical(labels, tiers) -> tuple[bytes, tuple[str, ...], tuple[tuple[int, int], ...]]:
    """Closed-form canonical data for a strict-weak-order poset.

    ``labels[i]`` sits in tier ``tiers[i]`` (0-based, dense).  In an SWO every
    earlier-tier element precedes every later-tier one, so only the current
    tier is ever available during the canonical search and all its elements
    share the predecessor key; the minimal encoding is therefore tier by tier
    with labels sorted ascending.  Produces byte-identical forms to
    :func:`canonical_form` (property-tested) at a fraction of the cost.
    """
    n = len(labels)
    label_table = sorted(set(labels))
    if n == 0:
        return b"poset:0||", (), ()
    lrank = {a: r for r, a in enumerate(label_table)}
    order = sorted(range(n), key=lambda i: (tiers[i], lrank[labels[i]]))
    body_parts = []
    canonical_labels = []
    tier_of_pos = []
    start = 0
    prev_tier = None
    preds_csv = ""
    for p, i in enumerate(order):
        tier = tiers[i]
        if tier != prev_tier:
            start = p
            preds_csv = ",".join(map(str, range(start)))
            prev_tier = tier
        body_parts.append(f"{lrank[labels[i]]}:{preds_csv}")
        canonical_labels.append(labels[i])
        tier_of_pos.append(tier)
    table = "\x1f".join(label_table)
    form = f"poset:{n}|{table}|{';'.join(body_parts)}".encode("utf-8")
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            if tier_of_pos[b] == tier_of_pos[a] + 1:
                edges.append((a, b))
            elif tier_of_pos[b] > tier_of_pos[a] + 1:
                break
    return form, tuple(canonical_labels), tuple(edges)


def _fast_path_groups(log: EventLog, fast_case_codes: np.ndarray):
    """Group explicit-order-free cases by their tier signature.

    Events are sorted (case, time, activity); the per-case sequence of
    (tier rank, activity code) pairs characterizes the strict-weak-order
    poset up to label-preserving isomorphism.  Cases are hash-sorted and
    exact-compared against their neighbor, so each resulting group holds
    identical signatures.  Yields (case_id array, rep tiers, rep act codes).
    """
    codes = log.case_codes
    member = np.zeros(len(log.case_table), dtype=bool)
    member[fast_case_codes] = True
    f_idx = np.flatnonzero(member[codes])
    if len(f_idx) == 0:
        return []
    c = codes[f_idx]
    t = log.times[f_idx]
    a = log.act_codes[f_idx]
    order = np.lexsort((a, t, c))
    cs, ts, acts = c[order], t[order], a[order]
    m = len(cs)
    new_case = np.empty(m, dtype=bool)
    new_case[0] = True
    new_case[1:] = cs[1:] != cs[:-1]
    case_starts = np.flatnonzero(new_case).astype(np.int64)
    case_lengths = np.diff(np.append(case_starts, m)).astype(np.int64)
    new_tier = new_case.copy()
    new_tier[1:] |= ts[1:] != ts[:-1]
    tier_global = np.cumsum(new_tier) - 1
    tier_within = tier_global - np.repeat(tier_global[case_starts], case_lengths)

    hashes = _kernels.case_signature_hashes(case_starts, case_lengths, tier_within, acts)
    by = np.lexsort((hashes, case_lengths))
    lens = case_lengths[by]
    hs = hashes[by]
    n_cases = len(by)
    same_as_prev = np.zeros(n_cases, dtype=bool)
    cand = np.flatnonzero((lens[1:] == lens[:-1]) & (hs[1:] == hs[:-1])) + 1
    if len(cand):
        L = lens[cand]
        seg = _cumsum0(L)
        total = int(seg[-1])
        within = np.arange(total, dtype=np.int64) - np.repeat(seg[:-1], L)
        ia = case_starts[by[cand]].repeat(L) + within
        ib = case_starts[by[cand - 1]].repeat(L) + within
        eq = (tier_within[ia] == tier_within[ib]) & (acts[ia] == acts[ib])
        if total:
            pair_equal = np.logical_and.reduceat(eq, seg[:-1])
        else:
            pair_equal = np.zeros(0, dtype=bool)
        same_as_prev[cand[pair_equal]] = True

    ids_in_by = log.case_table[cs[case_starts][by]]
    boundaries = np.flatnonzero(~same_as_prev)
    out = []
    for g, b in enumerate(boundaries):
        end = boundaries[g + 1] if g + 1 < len(boundaries) else n_cases
        rep_row = by[b]
        s, length = case_starts[rep_row], case_lengths[rep_row]
        out.append(
            (
                ids_in_by[b:end],
                tier_within[s : s + length],
                acts[s : s + length],
            )
        )
    return out


def group_variants(log: EventLog, *, force_generic: bool = False) -> list[PartialOrderVariant]:
    """Partition cases into partial-order variants, most frequent first."""
    _ensure_consistent(log)
    if len(log) == 0:
        return []
    codes = log.case_codes
    n_cases = len(log.case_table)
    case_has_order = np.zeros(n_cases, dtype=bool)
    if log.has_order:
        involved = np.unique(codes[log.order_pairs.ravel()])
        case_has_order[involved] = True
        if log.has_cross_case_order:
            # cross-case paths can induce within-case pairs anywhere; keep the
            # vectorized path only for logs whose edges stay within cases
            case_has_order[:] = True
    if force_generic:
        case_has_order[:] = True

    merged: dict[str, dict] = {}
    act_table = log.act_table

    fast_codes = np.flatnonzero(~case_has_order)
    for case_ids, rep_tiers, rep_acts in _fast_path_groups(log, fast_codes):
        rep_labels = [act_table[code] for code in rep_acts]
        form, canonical_labels, edges = swo_canonical(rep_labels, rep_tiers.tolist())
        key = hashlib.sha256(form).hexdigest()
        entry = merged.setdefault(
            key, {"labels": canonical_labels, "edges": edges, "case_ids": []}
        )
        entry["case_ids"].extend(case_ids.tolist())

    for code in np.flatnonzero(case_has_order):
        cid = log.case_table[code]
        cp = case_poset(log, cid)
        key = canonical_key(cp)
        entry = merged.get(key)
        if entry is None:
            labels, edges = _representative_layout(cp.poset)
            entry = merged.setdefault(key, {"labels": labels, "edges": edges, "case_ids": []})
        entry["case_ids"].append(cid)

    variants = [
        PartialOrderVariant(
            canonical_key=key,
            activities=tuple(entry["labels"]),
            hasse_edges=tuple(entry["edges"]),
            case_ids=tuple(sorted(entry["case_ids"], key=str)),
            frequency=len(entry["case_ids"]),
        )
        for key, entry in merged.items()
    ]
    variants.sort(key=lambda v: (-v.frequency, v.canonical_key))
    return variants


def variant_to_json(v: PartialOrderVariant) -> dict:
    return {
        "canonical_key": v.canonical_key,
        "frequency": v.frequency,
        "case_ids": list(v.case_ids),
        "nodes": [{"idx": i, "activity": a} for i, a in enumerate(v.activities)],
        "hasse_edges": [[i, j] for i, j in v.hasse_edges],
    }
