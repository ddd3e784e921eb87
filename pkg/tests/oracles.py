"""Independent brute-force oracles used to pin expected values.

These stay deliberately naive (DFS reachability, permutation filtering,
definition-level axiom loops) and never call the code paths they check.
"""

from __future__ import annotations

import itertools

import numpy as np


def closure_oracle(pairs, n: int) -> set[tuple[int, int]]:
    """Reachability via DFS from every node."""
    succ: dict[int, set[int]] = {}
    for a, b in pairs:
        succ.setdefault(a, set()).add(b)
    out = set()
    for s in range(n):
        seen: set[int] = set()
        stack = list(succ.get(s, ()))
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(succ.get(v, ()))
        out |= {(s, v) for v in seen}
    return out


_PERM_POS_CACHE: dict[int, np.ndarray] = {}


def _perm_positions(n: int) -> np.ndarray:
    if n not in _PERM_POS_CACHE:
        perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
        _PERM_POS_CACHE[n] = np.argsort(perms, axis=1)
    return _PERM_POS_CACHE[n]


def count_extensions_brute(rel: np.ndarray) -> int:
    """Count permutations compatible with the relation by direct filtering."""
    n = rel.shape[0]
    if n == 0:
        return 1
    pos = _perm_positions(n)
    ok = np.ones(pos.shape[0], dtype=bool)
    for i, j in np.argwhere(rel):
        ok &= pos[:, int(i)] < pos[:, int(j)]
    return int(ok.sum())


def spo_oracle(rel: np.ndarray) -> bool:
    n = rel.shape[0]
    for i in range(n):
        if rel[i, i]:
            return False
        for j in range(n):
            if rel[i, j] and rel[j, i]:
                return False
            for k in range(n):
                if rel[i, j] and rel[j, k] and not rel[i, k]:
                    return False
    return True


def swo_oracle(rel: np.ndarray) -> bool:
    if not spo_oracle(rel):
        return False
    n = rel.shape[0]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if (not rel[i, j]) and (not rel[j, k]) and rel[i, k]:
                    return False
    return True


def iso_brute(labels_a, rel_a: np.ndarray, labels_b, rel_b: np.ndarray) -> bool:
    """Label-preserving order-isomorphism by trying every bijection."""
    n = len(labels_a)
    if n != len(labels_b) or sorted(labels_a) != sorted(labels_b):
        return False
    for perm in itertools.permutations(range(n)):
        if any(labels_a[i] != labels_b[perm[i]] for i in range(n)):
            continue
        if all(
            bool(rel_a[i, j]) == bool(rel_b[perm[i], perm[j]])
            for i in range(n)
            for j in range(n)
        ):
            return True
    return False


def orbit_canonical(labels, rel: np.ndarray) -> tuple:
    """Canonical representative by minimizing over all relabel permutations."""
    n = len(labels)
    best = None
    for perm in itertools.permutations(range(n)):
        lab = tuple(labels[perm.index(p)] for p in range(n))
        mat = tuple(
            bool(rel[perm.index(i), perm.index(j)]) for i in range(n) for j in range(n)
        )
        cand = (lab, mat)
        if best is None or cand < best:
            best = cand
    return best if best is not None else ((), ())


def all_closed_posets(n: int) -> list[np.ndarray]:
    """Every strict partial order on n labeled elements (closed matrices)."""
    cells = [(i, j) for i in range(n) for j in range(n) if i != j]
    out = []
    for bits in range(1 << len(cells)):
        rel = np.zeros((n, n), dtype=bool)
        for b, (i, j) in enumerate(cells):
            if bits >> b & 1:
                rel[i, j] = True
        if spo_oracle(rel):
            out.append(rel)
    return out


def random_poset_pairs(rng: np.random.Generator, n: int, p: float = 0.3):
    """Random DAG edges, forward along a random permutation (always acyclic)."""
    perm = rng.permutation(n)
    rank = np.empty(n, dtype=np.int64)
    rank[perm] = np.arange(n)
    pairs = [
        (i, j)
        for i in range(n)
        for j in range(n)
        if rank[i] < rank[j] and rng.random() < p
    ]
    return pairs
