import subprocess
import sys

import numpy as np
import pytest

from ordlog import _kernels
from oracles import closure_oracle, random_poset_pairs

needs_numba = pytest.mark.skipif(
    _kernels.BACKEND != "numba", reason="numba backend not active"
)


def _random_case_arrays(rng, n_cases):
    lengths = rng.integers(1, 7, size=n_cases).astype(np.int64)
    starts = np.zeros(n_cases, dtype=np.int64)
    starts[1:] = np.cumsum(lengths)[:-1]
    total = int(lengths.sum())
    buckets = rng.integers(0, 4, size=total).astype(np.int64)
    acts = rng.integers(0, 5, size=total).astype(np.int64)
    return starts, lengths, buckets, acts


@needs_numba
@pytest.mark.parametrize("seed", range(10))
def test_signature_hash_backends_agree(seed):
    rng = np.random.default_rng(seed)
    starts, lengths, buckets, acts = _random_case_arrays(rng, int(rng.integers(1, 40)))
    a = _kernels._case_signature_hashes_numba(starts, lengths, buckets, acts)
    b = _kernels._case_signature_hashes_numpy(starts, lengths, buckets, acts)
    np.testing.assert_array_equal(a, b)


def test_signature_hash_distinguishes_order():
    starts = np.array([0, 2], dtype=np.int64)
    lengths = np.array([2, 2], dtype=np.int64)
    buckets = np.array([0, 1, 0, 1], dtype=np.int64)
    acts_ab = np.array([0, 1, 1, 0], dtype=np.int64)
    h = _kernels.case_signature_hashes(starts, lengths, buckets, acts_ab)
    assert h[0] != h[1]


def test_signature_hash_empty():
    z = np.zeros(0, dtype=np.int64)
    assert len(_kernels.case_signature_hashes(z, z, z, z)) == 0


@needs_numba
@pytest.mark.parametrize("seed", range(8))
def test_closure_backends_agree(seed):
    rng = np.random.default_rng(50 + seed)
    n = int(rng.integers(1, 70))
    rel = np.zeros((n, n), dtype=bool)
    for i, j in random_poset_pairs(rng, n, 0.1):
        rel[i, j] = True
    a = _kernels._close_bool_matrix_numba(rel)
    b = _kernels._close_bool_matrix_numpy(rel)
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("seed", range(10))
def test_closure_matches_oracle(seed):
    rng = np.random.default_rng(80 + seed)
    n = int(rng.integers(1, 12))
    pairs = random_poset_pairs(rng, n, 0.3)
    rel = np.zeros((n, n), dtype=bool)
    for i, j in pairs:
        rel[i, j] = True
    closed = _kernels.close_bool_matrix(rel)
    got = {(int(i), int(j)) for i, j in np.argwhere(closed)}
    assert got == closure_oracle(pairs, n)


def test_closure_handles_cycles_via_diagonal():
    rel = np.zeros((3, 3), dtype=bool)
    rel[0, 1] = rel[1, 0] = True
    closed = _kernels.close_bool_matrix(rel)
    assert closed[0, 0] and closed[1, 1]


@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_env_flag_selects_backend(backend):
    if backend == "numba" and _kernels.BACKEND != "numba":
        pytest.skip("numba unavailable")
    out = subprocess.run(
        [sys.executable, "-c", "from ordlog._kernels import BACKEND; print(BACKEND)"],
        env={"ORDLOG_BACKEND": backend, "PATH": "/usr/bin:/bin"},
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == backend


def test_bogus_backend_rejected():
    out = subprocess.run(
        [sys.executable, "-c", "import ordlog._kernels"],
        env={"ORDLOG_BACKEND": "cuda", "PATH": "/usr/bin:/bin"},
        capture_output=True,
        text=True,
    )
    assert out.returncode != 0
