"""Pure numpy implementations of the unit-group hot loops.

Elements of 1+J are handled as ``1 + y`` with ``y`` an F_p coordinate row.
An affine table ``t`` holds a matrix ``M_t`` (acting on column vectors) and
a vector ``v_t``; applying it sends ``y`` to ``v_t + y + M_t y``, which is
left multiplication by ``1 + v_t`` when ``M_t`` is the left multiplication
matrix of ``v_t``.
"""

from __future__ import annotations

import numpy as np


FLOAT_CACHE_DIM = 256


class Tables:
    """Affine tables built from chunks ``(mats (k, N, N), vecs (k, N))``."""

    def __init__(self, p: int, chunks):
        self.p = int(p)
        mats, vecs = [], []
        for M, v in chunks:
            # transposed so that rows @ mt[t] applies M_t to every row
            mats.append(np.ascontiguousarray((np.asarray(M) % p).astype(np.uint8).transpose(0, 2, 1)))
            vecs.append(np.asarray(v, dtype=np.int64) % p)
        self.mt = np.concatenate(mats)
        self.vecs = np.concatenate(vecs)
        self.count, self.dim = self.vecs.shape
        if self.dim <= FLOAT_CACHE_DIM:
            self.mt = self.mt.astype(np.float32)


def make_tables(p: int, chunks) -> Tables:
    return Tables(p, chunks)


def _apply(tab: Tables, t: int, Y: np.ndarray, start: int = 0) -> np.ndarray:
    prod = Y[:, start:].astype(np.float32) @ tab.mt[t][start:].astype(np.float32, copy=False)
    return (tab.vecs[t] + Y + prod.astype(np.int64)) % tab.p


def affine_chain(tab: Tables, Y0: np.ndarray, seq: np.ndarray) -> np.ndarray:
    """Apply ``seq[b, 0]``, then ``seq[b, 1]``, ... to row b; -1 is a no-op."""
    Y = np.asarray(Y0, dtype=np.int64) % tab.p
    seq = np.asarray(seq, dtype=np.int64).reshape(Y.shape[0], -1)
    for k in range(seq.shape[1]):
        col = seq[:, k]
        for t in np.unique(col[col >= 0]):
            idx = np.flatnonzero(col == t)
            Y[idx] = _apply(tab, int(t), Y[idx])
    return Y.astype(np.uint8)


def sift(tab: Tables, Y0: np.ndarray, offset: int) -> tuple[np.ndarray, np.ndarray]:
    """Strip generators in order using tables ``offset + g`` (the inverses).

    Returns the exponent rows and a flag per row that is True when a nonzero
    remainder survived (which means the tables are inconsistent).
    """
    p = tab.p
    Y = np.asarray(Y0, dtype=np.int64) % p
    B, N = Y.shape
    E = np.zeros((B, N), dtype=np.uint8)
    for g in range(N):
        e = Y[:, g].copy()
        E[:, g] = e
        for r in range(1, p):
            idx = np.flatnonzero(e >= r)
            if idx.size == 0:
                break
            Y[idx] = _apply(tab, offset + g, Y[idx], g)
    return E, Y.any(axis=1)


def echelon_insert(H: np.ndarray, rows: np.ndarray, p: int, K: int) -> None:
    """Insert relation rows into a triangular basis over Z/p^K (in place).

    ``H[c]`` is zero or a row whose first nonzero entry sits in column c and
    equals a power of p.  The Z-span of ``H`` plus ``p^K Z^N`` always equals
    the span of everything inserted so far plus ``p^K Z^N``.
    """
    mod = p ** K
    N = H.shape[1]
    for row in np.asarray(rows, dtype=np.int64):
        r = row % mod
        c = 0
        while True:
            nz = np.flatnonzero(r[c:])
            if nz.size == 0:
                break
            c += int(nz[0])
            x = int(r[c])
            v = 0
            while x % p == 0:
                x //= p
                v += 1
            if x != 1:
                r = (r * pow(x, -1, mod)) % mod
            piv = int(H[c, c])
            if piv == 0:
                H[c] = r
                break
            v0 = 0
            while piv % p == 0:
                piv //= p
                v0 += 1
            if v >= v0:
                r = (r - p ** (v - v0) * H[c]) % mod
            else:
                old = H[c].copy()
                H[c] = r
                r = (old - p ** (v0 - v) * r) % mod
            c += 1
            if c >= N:
                break
