import numpy as np
import pytest

from b0units import _kernels_py, kernels
from b0units.nilalgebra import augmentation_ideal
from b0units.pcgroup import builtin
from b0units.smallfield import make_field
from b0units.unitgroup import unit_pcp

try:
    from b0units import _kernels as _kernels_ext
except ImportError:  # extension not built
    _kernels_ext = None

BACKENDS = [_kernels_py] + ([_kernels_ext] if _kernels_ext is not None else [])
ids = [b.__name__.rsplit(".", 1)[-1] for b in BACKENDS]


def _random_chunks(rng, p, count, N):
    M = rng.integers(0, p, size=(count, N, N))
    v = rng.integers(0, p, size=(count, N))
    return [(M[:5], v[:5]), (M[5:], v[5:])]


def _reference_chain(chunks, p, Y0, seq):
    M = np.concatenate([c[0] for c in chunks])
    v = np.concatenate([c[1] for c in chunks])
    out = []
    for y, s in zip(np.asarray(Y0, dtype=np.int64), seq):
        for t in s:
            if t >= 0:
                y = (v[t] + y + M[t] @ y) % p
        out.append(y)
    return np.array(out)


@pytest.mark.parametrize("backend", BACKENDS, ids=ids)
@pytest.mark.parametrize("p,N", [(2, 70), (2, 130), (3, 40), (5, 17)])
def test_affine_chain_matches_reference(backend, p, N):
    rng = np.random.default_rng(p * 100 + N)
    chunks = _random_chunks(rng, p, 12, N)
    tab = backend.make_tables(p, chunks)
    Y0 = rng.integers(0, p, size=(25, N)).astype(np.uint8)
    seq = rng.integers(-1, 12, size=(25, 6))
    got = backend.affine_chain(tab, Y0, seq)
    assert np.array_equal(np.asarray(got, dtype=np.int64), _reference_chain(chunks, p, Y0, seq))


@pytest.mark.skipif(_kernels_ext is None, reason="extension not built")
@pytest.mark.parametrize("name,q", [("d8", 4), ("heis3", 3), ("q8", 2)])
def test_sift_backends_agree(name, q):
    from b0units.smallfield import field_for_q
    A = augmentation_ideal(builtin(name), field_for_q(q))
    pcp = unit_pcp(A)
    chunks = list(pcp._table_chunks())
    rng = np.random.default_rng(0)
    Y = rng.integers(0, pcp.p, size=(100, pcp.N)).astype(np.uint8)
    results = []
    for b in BACKENDS:
        tab = b.make_tables(pcp.p, chunks)
        E, bad = b.sift(tab, Y.copy(), pcp.N)
        results.append((np.asarray(E), np.asarray(bad)))
    (E0, b0), (E1, b1) = results
    assert np.array_equal(E0, E1) and np.array_equal(b0, b1)
    assert not b0.any()


@pytest.mark.parametrize("p,K", [(2, 3), (3, 2), (2, 4)])
def test_echelon_backends_agree(p, K):
    rng = np.random.default_rng(p + 10 * K)
    N = 20
    rows = rng.integers(-p, p + 1, size=(60, N)) * rng.integers(0, 2, size=(60, N))
    out = []
    for b in BACKENDS:
        H = np.zeros((N, N), dtype=np.int64)
        b.echelon_insert(H, rows[:30].copy(), p, K)
        b.echelon_insert(H, rows[30:].copy(), p, K)
        out.append(H)
    for H in out[1:]:
        assert np.array_equal(H, out[0])
    # each stored row has a p-power pivot on the diagonal and zeros before it
    H = out[0]
    for c in range(N):
        if H[c].any():
            assert not H[c, :c].any()
            x = int(H[c, c])
            while x % p == 0:
                x //= p
            assert x == 1


def test_echelon_preserves_cokernel():
    from b0units.abelian import cokernel, local_cokernel
    p, K, N = 2, 3, 8
    rng = np.random.default_rng(4)
    rows = rng.integers(-2, 3, size=(15, N))
    H = np.zeros((N, N), dtype=np.int64)
    kernels.echelon_insert(H, rows.copy(), p, K)
    full = rows.tolist() + [[p ** K * int(i == j) for j in range(N)] for i in range(N)]
    assert local_cokernel(H, N, p, K).factors == cokernel(full, N).factors


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


def test_fallback_backend_end_to_end():
    import os
    import subprocess
    import sys
    code = ("from b0units import kernels; from b0units.invariants import Session; "
            "from b0units.pcgroup import builtin; from b0units.smallfield import make_field; "
            "s = Session(builtin('jm14_f39')); "
            "print(kernels.BACKEND, list(s.abelianization(make_field(2, 1)).group.factors))")
    env = dict(os.environ, B0UNITS_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, factors = out.stdout.split(" ", 1)
    assert backend == "python"
    assert eval(factors) == [2] * 13 + [4] * 5 + [8]
