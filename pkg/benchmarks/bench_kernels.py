"""Compare the compiled kernels with the numpy fallback on real unit groups.

    python3 benchmarks/bench_kernels.py [--q 2 4] [--repeat 3]

Each backend module is driven directly, so both run in the same process on
identical tables.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from b0units import _kernels_py
from b0units.nilalgebra import augmentation_ideal
from b0units.pcgroup import builtin
from b0units.smallfield import field_for_q
from b0units.unitgroup import unit_pcp

try:
    from b0units import _kernels as _kernels_ext
except ImportError:
    _kernels_ext = None


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench(group: str, q: int, repeat: int, pairs: int) -> None:
    A = augmentation_ideal(builtin(group), field_for_q(q))
    pcp = unit_pcp(A)
    N, p = pcp.N, pcp.p
    chunks = list(pcp._table_chunks())
    rng = np.random.default_rng(0)
    Y = rng.integers(0, p, size=(1024, N)).astype(np.uint8)
    jj, ii = np.tril_indices(N, -1)
    pick = rng.choice(jj.size, size=min(pairs, jj.size), replace=False)
    j, i = jj[pick], ii[pick]
    Y0 = np.zeros((j.size, N), dtype=np.uint8)
    Y0[np.arange(j.size), i] = 1
    seq = np.stack([j, N + i, N + j], axis=1)
    rows = (p * np.eye(N, dtype=np.int64) - pcp.power_words.astype(np.int64))
    K = 3

    print(f"{group} over F_{q}: N = {N} generators")
    backends = [("python", _kernels_py)] + ([("cython", _kernels_ext)] if _kernels_ext else [])
    base = {}
    for label, mod in backends:
        tab = mod.make_tables(p, chunks)
        comm = mod.affine_chain(tab, Y0, seq)
        res = {
            "tables": _best(lambda: mod.make_tables(p, chunks), repeat),
            "sift x1024": _best(lambda: mod.sift(tab, Y.copy(), N), repeat),
            f"commutators x{j.size}": _best(lambda: mod.sift(tab, mod.affine_chain(tab, Y0, seq), N), repeat),
            "echelon": _best(lambda: mod.echelon_insert(np.zeros((N, N), dtype=np.int64), rows, p, K), repeat),
        }
        ref = base.setdefault("comm", np.asarray(comm))
        assert np.array_equal(np.asarray(comm), ref), "backends disagree"
        for name, t in res.items():
            speed = ""
            if label != "python":
                speed = f"  ({base[name] / t:.1f}x)"
            else:
                base[name] = t
            print(f"  {label:7s} {name:22s} {t * 1000:9.1f} ms{speed}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--group", default="jm14_f39")
    ap.add_argument("--q", type=int, nargs="+", default=[2, 4])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--pairs", type=int, default=2000)
    args = ap.parse_args()
    if _kernels_ext is None:
        print("compiled extension not available; timing the fallback only")
    for q in args.q:
        bench(args.group, q, args.repeat, args.pairs)


if __name__ == "__main__":
    main()
