# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled unit-group hot loops; same interface as ``_kernels_py``.

For p = 2 rows and matrix columns are packed into 64-bit words, so applying
an affine table costs one XOR of a column per set bit of the input row.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, uint8_t

cnp.import_array()

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


class Tables:
    """Affine tables built from chunks ``(mats (k, N, N), vecs (k, N))``."""

    def __init__(self, p, chunks):
        self.p = int(p)
        cols_parts, vec_parts = [], []
        N = None
        for mats, vecs in chunks:
            k, N = vecs.shape
            cols = np.ascontiguousarray((np.asarray(mats) % p).astype(np.uint8).transpose(0, 2, 1))
            v = (np.asarray(vecs) % p).astype(np.uint8)
            if self.p == 2:
                words = (N + 63) // 64
                cols_parts.append(_pack(cols.reshape(-1, N), words).reshape(k, N, words))
                vec_parts.append(_pack(v, words))
            else:
                cols_parts.append(cols)
                vec_parts.append(v)
        self.cols = np.ascontiguousarray(np.concatenate(cols_parts))
        self.vecs = np.ascontiguousarray(np.concatenate(vec_parts))
        self.count, self.dim = self.cols.shape[0], N
        self.words = (N + 63) // 64 if self.p == 2 else 0


def make_tables(p, chunks):
    return Tables(p, chunks)


def _pack(rows, int words):
    rows = np.asarray(rows, dtype=np.uint8)
    B, N = rows.shape
    padded = np.zeros((B, words * 64), dtype=np.uint8)
    padded[:, :N] = rows
    bits = np.packbits(padded.reshape(B, words, 64)[:, :, ::-1], axis=2)
    return np.ascontiguousarray(bits.view(">u8").astype(np.uint64).reshape(B, words))


def _unpack(packed, int N):
    packed = np.asarray(packed, dtype=np.uint64)
    B, words = packed.shape
    bits = np.unpackbits(packed.astype(">u8").view(np.uint8).reshape(B, words, 8), axis=2)
    return np.ascontiguousarray(bits.reshape(B, words, 64)[:, :, ::-1].reshape(B, words * 64)[:, :N])


cdef inline void _apply2(uint64_t[:, :, ::1] cols, uint64_t[:, ::1] vecs, Py_ssize_t t,
                         uint64_t* y, uint64_t* acc, Py_ssize_t W, Py_ssize_t w0) nogil:
    cdef Py_ssize_t w, k, c
    cdef uint64_t bits
    cdef uint64_t* col
    for k in range(W):
        acc[k] = vecs[t, k]
    for w in range(w0, W):
        bits = y[w]
        while bits:
            c = w * 64 + __builtin_ctzll(bits)
            bits &= bits - 1
            col = &cols[t, c, 0]
            for k in range(W):
                acc[k] ^= col[k]
    for k in range(W):
        y[k] ^= acc[k]


cdef inline void _applyp(uint8_t[:, :, ::1] cols, uint8_t[:, ::1] vecs, Py_ssize_t t,
                         uint8_t* y, int64_t* acc, Py_ssize_t N, Py_ssize_t c0, int p) nogil:
    cdef Py_ssize_t r, c
    cdef int64_t yc
    cdef uint8_t* col
    for r in range(N):
        acc[r] = vecs[t, r] + y[r]
    for c in range(c0, N):
        yc = y[c]
        if yc:
            col = &cols[t, c, 0]
            for r in range(N):
                acc[r] += yc * col[r]
    for r in range(N):
        y[r] = <uint8_t>(acc[r] % p)


def affine_chain(tab, Y0, seq):
    cdef Py_ssize_t B = Y0.shape[0], N = tab.dim, K, b, k, t
    seq_arr = np.ascontiguousarray(np.asarray(seq, dtype=np.int64).reshape(B, -1))
    cdef int64_t[:, ::1] s = seq_arr
    K = seq_arr.shape[1]
    cdef Py_ssize_t W
    cdef uint64_t[:, ::1] Yp
    cdef uint64_t[::1] acc
    cdef uint8_t[:, ::1] Yd
    cdef int64_t[::1] acci
    cdef int p = tab.p
    cdef uint64_t[:, :, ::1] cols2
    cdef uint64_t[:, ::1] vecs2
    if p == 2:
        W = tab.words
        cols2 = tab.cols
        vecs2 = tab.vecs
        packed = _pack(np.asarray(Y0, dtype=np.uint8) % 2, W)
        Yp = packed
        acc = np.zeros(W, dtype=np.uint64)
        with nogil:
            for b in range(B):
                for k in range(K):
                    t = s[b, k]
                    if t >= 0:
                        _apply2(cols2, vecs2, t, &Yp[b, 0], &acc[0], W, 0)
        return _unpack(packed, N)
    out = np.ascontiguousarray(np.asarray(Y0, dtype=np.uint8) % p)
    Yd = out
    acci = np.zeros(N, dtype=np.int64)
    cdef uint8_t[:, :, ::1] cols = tab.cols
    cdef uint8_t[:, ::1] vecs = tab.vecs
    with nogil:
        for b in range(B):
            for k in range(K):
                t = s[b, k]
                if t >= 0:
                    _applyp(cols, vecs, t, &Yd[b, 0], &acci[0], N, 0, p)
    return out


def sift(tab, Y0, Py_ssize_t offset):
    cdef Py_ssize_t B = Y0.shape[0], N = Y0.shape[1], b, g, w, r
    cdef int p = tab.p
    cdef int e
    E = np.zeros((B, N), dtype=np.uint8)
    cdef uint8_t[:, ::1] Ev = E
    resid = np.zeros(B, dtype=bool)
    cdef uint8_t[::1] res = resid.view(np.uint8)
    cdef Py_ssize_t W
    cdef uint64_t[:, ::1] Yp
    cdef uint64_t[::1] acc
    cdef uint8_t[:, ::1] Yd
    cdef int64_t[::1] acci
    cdef uint8_t[:, :, ::1] cols
    cdef uint8_t[:, ::1] vecs
    cdef uint64_t[:, :, ::1] cols2
    cdef uint64_t[:, ::1] vecs2
    if p == 2:
        W = tab.words
        cols2 = tab.cols
        vecs2 = tab.vecs
        packed = _pack(np.asarray(Y0, dtype=np.uint8) % 2, W)
        Yp = packed
        acc = np.zeros(W, dtype=np.uint64)
        with nogil:
            for b in range(B):
                for g in range(N):
                    if (Yp[b, g >> 6] >> (g & 63)) & 1:
                        Ev[b, g] = 1
                        _apply2(cols2, vecs2, offset + g, &Yp[b, 0], &acc[0], W, g >> 6)
                for w in range(W):
                    if Yp[b, w]:
                        res[b] = 1
        return E, resid
    Yarr = np.ascontiguousarray(np.asarray(Y0, dtype=np.uint8) % p)
    Yd = Yarr
    acci = np.zeros(N, dtype=np.int64)
    cols = tab.cols
    vecs = tab.vecs
    with nogil:
        for b in range(B):
            for g in range(N):
                e = Yd[b, g]
                Ev[b, g] = e
                for r in range(e):
                    _applyp(cols, vecs, offset + g, &Yd[b, 0], &acci[0], N, g, p)
            for r in range(N):
                if Yd[b, r]:
                    res[b] = 1
    return E, resid


cdef inline int64_t _pmod(int64_t x, int64_t mod) nogil:
    x %= mod
    return x + mod if x < 0 else x


cdef int64_t _inv_mod(int64_t a, int64_t mod) nogil:
    cdef int64_t t = 0, nt = 1, r = mod, nr = a % mod, qq, tmp
    while nr:
        qq = r // nr
        tmp = t - qq * nt; t = nt; nt = tmp
        tmp = r - qq * nr; r = nr; nr = tmp
    return _pmod(t, mod)


def echelon_insert(cnp.ndarray H_arr, rows_arr, int p, int K):
    cdef int64_t mod = 1
    cdef int i
    for i in range(K):
        mod *= p
    cdef int64_t[:, ::1] H = H_arr
    rows_c = np.ascontiguousarray(np.asarray(rows_arr, dtype=np.int64) % mod)
    cdef int64_t[:, ::1] R = rows_c
    cdef Py_ssize_t N = H.shape[1], nrows = R.shape[0], j, c, k
    r_buf = np.zeros(N, dtype=np.int64)
    o_buf = np.zeros(N, dtype=np.int64)
    cdef int64_t[::1] r = r_buf
    cdef int64_t[::1] old = o_buf
    cdef int64_t x, u, inv, piv, f
    cdef int v, v0
    with nogil:
        for j in range(nrows):
            for k in range(N):
                r[k] = R[j, k]
            c = 0
            while c < N:
                if r[c] == 0:
                    c += 1
                    continue
                x = r[c]
                v = 0
                while x % p == 0:
                    x //= p
                    v += 1
                if x != 1:
                    inv = _inv_mod(x, mod)
                    for k in range(c, N):
                        r[k] = (r[k] * inv) % mod
                piv = H[c, c]
                if piv == 0:
                    for k in range(c, N):
                        H[c, k] = r[k]
                    break
                v0 = 0
                while piv % p == 0:
                    piv //= p
                    v0 += 1
                if v >= v0:
                    f = 1
                    for i in range(v - v0):
                        f *= p
                    for k in range(c, N):
                        r[k] = _pmod(r[k] - f * H[c, k], mod)
                else:
                    f = 1
                    for i in range(v0 - v):
                        f *= p
                    for k in range(c, N):
                        old[k] = H[c, k]
                        H[c, k] = r[k]
                    for k in range(c, N):
                        r[k] = _pmod(old[k] - f * H[c, k], mod)
                c += 1
