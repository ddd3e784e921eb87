"""Finite strict-partial-order algebra.

A :class:`Poset` holds element count, an always-transitively-closed boolean
relation matrix, and optional element labels.  The module provides closure,
reduction, axiom checks and union with conflict detection; these back both
the derived event orders and the per-case posets used for variant grouping.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import CyclicOrder

__all__ = [
    "Poset",
    "transitive_closure",
    "transitive_reduction",
    "union_orders",
    "is_strict_partial_order",
    "is_strict_weak_order",
]

Pair = tuple[int, int]


def _find_cycle(n: int, pairs: Iterable[Pair]) -> list[int]:
    """Return one directed cycle (first node repeated at the end) via DFS."""
    succ: dict[int, list[int]] = {}
    for i, j in pairs:
        succ.setdefault(i, []).append(j)
    WHITE, GREY, BLACK = 0, 1, 2
    color = [WHITE] * n
    parent: dict[int, int] = {}
    for root in range(n):
        if color[root] != WHITE:
            continue
        stack = [(root, iter(succ.get(root, ())))]
        color[root] = GREY
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == GREY:
                    cycle = [nxt, node]
                    cur = node
                    while cur != nxt:
                        cur = parent[cur]
                        cycle.append(cur)
                    cycle.reverse()
                    return cycle
                if color[nxt] == WHITE:
                    color[nxt] = GREY
                    parent[nxt] = node
                    stack.append((nxt, iter(succ.get(nxt, ()))))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
    return []


class Poset:
    """Finite strict partial order over elements ``0..n-1``.

    The relation matrix is transitively closed at all times; ``rel[i, j]``
    means ``i`` strictly precedes ``j``.
    """

    __slots__ = ("n", "rel", "labels")

    def __init__(
        self,
        rel: np.ndarray,
        labels: Sequence[str] | None = None,
        *,
        _trusted: bool = False,
    ):
        rel = np.asarray(rel, dtype=bool)
        if rel.ndim != 2 or rel.shape[0] != rel.shape[1]:
            raise ValueError(f"relation matrix must be square, got {rel.shape}")
        n = rel.shape[0]
        if labels is not None and len(labels) != n:
            raise ValueError(f"{len(labels)} labels for {n} elements")
        if not _trusted:
            if rel.diagonal().any():
                i = int(np.flatnonzero(rel.diagonal())[0])
                raise CyclicOrder(f"relation is not irreflexive at element {i}", [i, i])
            if (rel & rel.T).any():
                i, j = map(int, np.argwhere(rel & rel.T)[0])
                raise CyclicOrder(f"elements {i} and {j} are ordered both ways", [i, j, i])
            if not _is_transitive(rel):
                raise ValueError("relation matrix is not transitively closed")
        self.n = n
        self.rel = rel
        self.rel.setflags(write=False)
        self.labels = tuple(labels) if labels is not None else None

    @classmethod
    def from_pairs(
        cls, pairs: Iterable[Pair], n: int, labels: Sequence[str] | None = None
    ) -> "Poset":
        return transitive_closure(pairs, n, labels)

    def pairs(self) -> set[Pair]:
        return {(int(i), int(j)) for i, j in np.argwhere(self.rel)}

    def less(self, i: int, j: int) -> bool:
        return bool(self.rel[i, j])

    def incomparable(self, i: int, j: int) -> bool:
        return i != j and not self.rel[i, j] and not self.rel[j, i]

    def predecessors(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.rel[:, j])

    def successors(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.rel[i])

    def restrict(self, indices: Sequence[int]) -> "Poset":
        """Sub-poset induced by ``indices``; restriction preserves transitivity."""
        idx = np.asarray(indices, dtype=np.int64)
        sub = self.rel[np.ix_(idx, idx)]
        labels = None if self.labels is None else [self.labels[i] for i in idx]
        return Poset(sub, labels, _trusted=True)

    def relabel(self, labels: Sequence[str]) -> "Poset":
        return Poset(self.rel, labels, _trusted=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poset):
            return NotImplemented
        return (
            self.n == other.n
            and bool(np.array_equal(self.rel, other.rel))
            and self.labels == other.labels
        )

    def __hash__(self):
        return hash((self.n, self.rel.tobytes(), self.labels))

    def __repr__(self):
        return f"Poset(n={self.n}, pairs={len(np.argwhere(self.rel))})"


def _is_transitive(rel: np.ndarray) -> bool:
    if rel.shape[0] == 0:
        return True
    reach = (rel.astype(np.float32) @ rel.astype(np.float32)) > 0
    return not (reach & ~rel).any()


def transitive_closure(
    pairs: Iterable[Pair], n: int, labels: Sequence[str] | None = None
) -> Poset:
    """Smallest transitive superset of ``pairs`` as a :class:`Poset`.

    Raises :class:`CyclicOrder` (with one witness cycle) when the closure
    would violate irreflexivity or asymmetry.
    """
    pair_list = [(int(i), int(j)) for i, j in pairs]
    rel = np.zeros((n, n), dtype=bool)
    for i, j in pair_list:
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"pair ({i}, {j}) out of range for {n} elements")
        if i == j:
            raise CyclicOrder(f"self-pair ({i}, {i}) in input", [i, i])
        rel[i, j] = True
    closed = _kernels.close_bool_matrix(rel)
    if closed.diagonal().any():
        witness = _find_cycle(n, pair_list)
        raise CyclicOrder(
            f"transitive closure creates a cycle: {' -> '.join(map(str, witness))}",
            witness,
        )
    return Poset(closed, labels, _trusted=True)


def union_orders(a: Poset, b: Poset) -> Poset:
    """Transitive closure of ``rel(a) | rel(b)``.

    Raises :class:`CyclicOrder` when the two orders conflict, i.e. some pair
    ends up ordered both ways.
    """
    if a.n != b.n:
        raise ValueError(f"posets over different element counts: {a.n} != {b.n}")
    merged = a.rel | b.rel
    both = merged & merged.T
    if both.any():
        i, j = map(int, np.argwhere(both)[0])
        raise CyclicOrder(
            f"orders conflict: {i} and {j} are ordered both ways", [i, j, i]
        )
    closed = _kernels.close_bool_matrix(merged)
    if closed.diagonal().any() or (closed & closed.T).any():
        pairs = [(int(i), int(j)) for i, j in np.argwhere(merged)]
        witness = _find_cycle(a.n, pairs)
        raise CyclicOrder(
            f"union of orders creates a cycle: {' -> '.join(map(str, witness))}",
            witness,
        )
    labels = a.labels if a.labels is not None else b.labels
    return Poset(closed, labels, _trusted=True)


def transitive_reduction(p: Poset) -> list[Pair]:
    """Unique minimal edge set whose closure equals ``rel(p)`` (Hasse edges).

    Valid because a strict partial order is acyclic: an edge is redundant
    exactly when a 2-hop path implies it.
    """
    if p.n == 0:
        return []
    rel = p.rel
    two_hop = (rel.astype(np.float32) @ rel.astype(np.float32)) > 0
    red = rel & ~two_hop
    return [(int(i), int(j)) for i, j in np.argwhere(red)]


def _as_matrix(p: Poset | np.ndarray) -> np.ndarray:
    return p.rel if isinstance(p, Poset) else np.asarray(p, dtype=bool)


def is_strict_partial_order(p: Poset | np.ndarray) -> bool:
    """Irreflexivity, transitivity and asymmetry of the relation."""
    rel = _as_matrix(p)
    if rel.diagonal().any():
        return False
    if (rel & rel.T).any():
        return False
    return _is_transitive(rel)


def is_strict_weak_order(p: Poset | np.ndarray) -> bool:
    """Strict partial order whose incomparability is transitive.

    Equivalently: negative transitivity holds, so the elements fall into
    totally ordered tiers of mutually incomparable elements.
    """
    rel = _as_matrix(p)
    if not is_strict_partial_order(rel):
        return False
    n = rel.shape[0]
    if n == 0:
        return True
    incomp = ~rel & ~rel.T
    np.fill_diagonal(incomp, True)  # treat ~ as reflexive so it can be an equivalence
    reach = (incomp.astype(np.float32) @ incomp.astype(np.float32)) > 0
    return not (reach & ~incomp).any()
