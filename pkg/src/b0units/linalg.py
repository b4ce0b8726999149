"""Row reduction over F_q (arrays with a trailing coordinate axis) and F_p."""

from __future__ import annotations

import numpy as np

from .smallfield import FieldDesc


def rref(field: FieldDesc, M: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form with lowest-index pivots; zero rows dropped."""
    p = field.p
    M = np.array(M, dtype=np.int64) % p
    r, c = M.shape[0], M.shape[1]
    row = 0
    pivots: list[int] = []
    for col in range(c):
        if row == r:
            break
        nz = np.flatnonzero(M[row:, col].any(axis=-1))
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            M[[row, piv]] = M[[piv, row]]
        lead = tuple(int(x) for x in M[row, col])
        if lead != field.one():
            M[row] = field.mul_arrays(M[row], np.array(field.inv(lead)))
        factors = M[:, col].copy()
        factors[row] = 0
        hit = np.flatnonzero(factors.any(axis=-1))
        if hit.size:
            M[hit] = (M[hit] - field.mul_arrays(factors[hit][:, None, :], M[row][None])) % p
        pivots.append(col)
        row += 1
    return M[:row], pivots


def rank(field: FieldDesc, M: np.ndarray) -> int:
    return len(rref(field, M)[1])


class Span:
    """Incrementally grown F_q-subspace kept in reduced echelon form."""

    def __init__(self, field: FieldDesc, dim: int):
        self.field = field
        self.dim = dim
        self.basis = np.zeros((0, dim, field.n), dtype=np.int64)
        self.pivots: list[int] = []

    def __len__(self) -> int:
        return len(self.pivots)

    def reduce(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.int64) % self.field.p
        if not self.pivots or rows.shape[0] == 0:
            return rows
        coeff = rows[:, self.pivots]
        return (rows - self.field.matmul(coeff, self.basis)) % self.field.p

    def add(self, rows: np.ndarray) -> int:
        """Add rows; return the number of new dimensions."""
        red = self.reduce(rows)
        red = red[red.reshape(red.shape[0], -1).any(axis=1)]
        if red.shape[0] == 0:
            return 0
        before = len(self.pivots)
        self.basis, self.pivots = rref(self.field, np.concatenate([self.basis, red]))
        return len(self.pivots) - before

    def contains(self, v: np.ndarray) -> bool:
        return not self.reduce(np.asarray(v)[None]).any()


def span_of(field: FieldDesc, rows: np.ndarray, dim: int, chunk: int = 512) -> Span:
    s = Span(field, dim)
    for start in range(0, rows.shape[0], chunk):
        s.add(rows[start: start + chunk])
    return s


def fp_inverse(M: np.ndarray, p: int) -> np.ndarray:
    """Inverse of a square matrix over F_p by Gauss-Jordan elimination."""
    M = np.asarray(M, dtype=np.int64) % p
    n = M.shape[0]
    A = np.concatenate([M, np.eye(n, dtype=np.int64)], axis=1)
    inv_table = np.array([0] + [pow(x, -1, p) for x in range(1, p)], dtype=np.int64)
    for col in range(n):
        nz = np.flatnonzero(A[col:, col])
        if nz.size == 0:
            raise ZeroDivisionError("matrix is singular")
        piv = col + int(nz[0])
        if piv != col:
            A[[col, piv]] = A[[piv, col]]
        A[col] = (A[col] * inv_table[A[col, col]]) % p
        f = A[:, col].copy()
        f[col] = 0
        hit = np.flatnonzero(f)
        if hit.size:
            A[hit] = (A[hit] - np.outer(f[hit], A[col])) % p
    return A[:, n:]
