"""Hot numeric kernels: numba-jitted fast path with a pure-numpy fallback.

The backend is picked once at import time from ``ORDLOG_BACKEND``:

* ``auto`` (default) - numba when importable, numpy otherwise
* ``numba``          - require numba, fail loudly if missing
* ``numpy``          - force the pure-numpy fallback

Both implementations of every kernel are kept bit-identical and are
cross-checked in the test suite; ``benchmarks/bench_backends.py`` compares
their throughput.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "BACKEND",
    "case_signature_hashes",
    "close_bool_matrix",
    "warm_up",
]

_REQUESTED = os.environ.get("ORDLOG_BACKEND", "auto").strip().lower()
if _REQUESTED not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"ORDLOG_BACKEND must be one of auto/numba/numpy, got {_REQUESTED!r}"
    )

_HAVE_NUMBA = False
if _REQUESTED in ("auto", "numba"):
    try:
        import numba

        _HAVE_NUMBA = True
    except ImportError:
        if _REQUESTED == "numba":
            raise
BACKEND = "numba" if _HAVE_NUMBA else "numpy"


# splitmix64 constants; all arithmetic is wrapping uint64
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_ONE = np.uint64(1)


def _mix64_np(x: np.ndarray) -> np.ndarray:
    x = (x + _GOLDEN).astype(np.uint64)
    x ^= x >> np.uint64(30)
    x *= _MIX1
    x ^= x >> np.uint64(27)
    x *= _MIX2
    x ^= x >> np.uint64(31)
    return x


def _case_signature_hashes_numpy(
    starts: np.ndarray, lengths: np.ndarray, buckets: np.ndarray, acts: np.ndarray
) -> np.ndarray:
    if len(starts) == 0:
        return np.zeros(0, dtype=np.uint64)
    pos = np.arange(buckets.shape[0], dtype=np.uint64)
    pos -= np.repeat(starts.astype(np.uint64), lengths)
    v = (buckets.astype(np.uint64) + _ONE) * _MIX1
    v ^= (acts.astype(np.uint64) + _ONE) * _MIX2
    v ^= (pos + _ONE) * _GOLDEN
    v = _mix64_np(v)
    sums = np.add.reduceat(v, starts)
    return _mix64_np(sums ^ (lengths.astype(np.uint64) * _MIX2))


def _close_bool_matrix_numpy(rel: np.ndarray) -> np.ndarray:
    out = rel.copy()
    n = out.shape[0]
    for k in range(n):
        col = out[:, k]
        if col.any():
            out[col] |= out[k]
    return out


if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _mix64_nb(x):
        x = x + np.uint64(0x9E3779B97F4A7C15)
        x ^= x >> np.uint64(30)
        x *= np.uint64(0xBF58476D1CE4E5B9)
        x ^= x >> np.uint64(27)
        x *= np.uint64(0x94D049BB133111EB)
        x ^= x >> np.uint64(31)
        return x

    @numba.njit(cache=True)
    def _case_signature_hashes_numba(starts, lengths, buckets, acts):
        n_cases = starts.shape[0]
        out = np.zeros(n_cases, dtype=np.uint64)
        for c in range(n_cases):
            s = starts[c]
            length = lengths[c]
            acc = np.uint64(0)
            for p in range(length):
                i = s + p
                v = (np.uint64(buckets[i]) + np.uint64(1)) * np.uint64(0xBF58476D1CE4E5B9)
                v ^= (np.uint64(acts[i]) + np.uint64(1)) * np.uint64(0x94D049BB133111EB)
                v ^= (np.uint64(p) + np.uint64(1)) * np.uint64(0x9E3779B97F4A7C15)
                acc += _mix64_nb(v)
            out[c] = _mix64_nb(acc ^ (np.uint64(length) * np.uint64(0x94D049BB133111EB)))
        return out

    @numba.njit(cache=True)
    def _close_packed_numba(words, n, n_words):
        # Warshall on bit-packed rows: row i |= row k whenever rel[i, k]
        for k in range(n):
            kw = k >> 6
            kb = np.uint64(1) << np.uint64(k & 63)
            for i in range(n):
                if words[i, kw] & kb:
                    for w in range(n_words):
                        words[i, w] |= words[k, w]
        return words

    def _close_bool_matrix_numba(rel: np.ndarray) -> np.ndarray:
        n = rel.shape[0]
        if n == 0:
            return rel.copy()
        n_words = (n + 63) // 64
        padded = np.zeros((n, n_words * 64), dtype=bool)
        padded[:, :n] = rel
        words = np.packbits(padded, axis=1, bitorder="little").view(np.uint64)
        words = np.ascontiguousarray(words)
        _close_packed_numba(words, n, n_words)
        bits = np.unpackbits(words.view(np.uint8), axis=1, bitorder="little")
        return bits[:, :n].astype(bool)


if BACKEND == "numba":
    case_signature_hashes = _case_signature_hashes_numba
    close_bool_matrix = _close_bool_matrix_numba
else:
    case_signature_hashes = _case_signature_hashes_numpy
    close_bool_matrix = _close_bool_matrix_numpy


def warm_up() -> None:
    """Trigger JIT compilation on tiny inputs so timed runs measure work, not compilation."""
    starts = np.array([0], dtype=np.int64)
    lengths = np.array([2], dtype=np.int64)
    buckets = np.array([0, 1], dtype=np.int64)
    acts = np.array([1, 0], dtype=np.int64)
    case_signature_hashes(starts, lengths, buckets, acts)
    m = np.zeros((3, 3), dtype=bool)
    m[0, 1] = m[1, 2] = True
    close_bool_matrix(m)
