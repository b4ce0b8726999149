"""Arithmetic in small finite fields F_{p^n} and truncated Galois rings.

Field elements are tuples of ``n`` residues mod ``p`` in the power basis
``1, x, ..., x^{n-1}`` of ``F_p[x]/(f)``.  Vectors and matrices over a field
are numpy integer arrays whose trailing axis has length ``n``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import InvalidInput

MAX_DEGREE = 16


class FieldError(InvalidInput):
    pass


class NotPrime(FieldError):
    pass


class DegreeOutOfRange(FieldError):
    pass


class NotASubfield(FieldError):
    pass


class FieldDivisionByZero(ZeroDivisionError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Split ``q`` as ``(p, n)`` with ``q == p**n``; raise if impossible."""
    if q < 2:
        raise NotPrime(f"{q} is not a prime power")
    p = 2
    while q % p:
        p += 1
    n, r = 0, q
    while r % p == 0:
        r //= p
        n += 1
    if r != 1:
        raise NotPrime(f"{q} is not a prime power")
    return p, n


# -- polynomials over Z/mZ, coefficient lists constant term first -----------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mul(a, b, m: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % m
    return _trim(out)


def poly_divmod(a, b, p: int) -> tuple[list[int], list[int]]:
    """Division with remainder over the field F_p (``b`` nonzero)."""
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    inv_lead = pow(b[-1], -1, p)
    quo = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        quo[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        _trim(a)
    return _trim(quo), a


def poly_mod_monic(a, f, m: int) -> list[int]:
    """Reduce ``a`` modulo the monic polynomial ``f`` over Z/mZ."""
    a = [c % m for c in a]
    n = len(f) - 1
    for k in range(len(a) - 1, n - 1, -1):
        c = a[k]
        if c:
            for i in range(n + 1):
                a[k - n + i] = (a[k - n + i] - c * f[i]) % m
    return _trim(a[:n])


def poly_gcd(a, b, p: int) -> list[int]:
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    while b:
        a, b = b, poly_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def _powmod_x(e: int, f, p: int) -> list[int]:
    """x^e mod (f, p) by square-and-multiply."""
    result, base = [1], [0, 1]
    while e:
        if e & 1:
            result = poly_mod_monic(poly_mul(result, base, p), f, p)
        base = poly_mod_monic(poly_mul(base, base, p), f, p)
        e >>= 1
    return result


def is_irreducible(f, p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p."""
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    if _trim(list(_powmod_x(p ** n, f, p))) != [0, 1]:
        return False
    primes = [r for r in range(2, n + 1) if n % r == 0 and is_prime(r)]
    for r in primes:
        h = _powmod_x(p ** (n // r), f, p)
        h = h + [0] * (2 - len(h))
        h[1] = (h[1] - 1) % p
        if len(poly_gcd(h, f, p)) > 1:
            return False
    return True


# -- fields -------------------------------------------------------------------

@dataclass(frozen=True)
class FieldDesc:
    """The field F_p[x]/(f); ``f`` is monic, constant term first."""

    p: int
    n: int
    f: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p ** self.n

    def __str__(self) -> str:
        return f"F_{self.q}"

    # Element-level helpers work on tuples; the ``*_arrays`` variants are
    # vectorized over leading axes.

    @cached_property
    def _reduction(self) -> np.ndarray:
        # row s = coordinates of x^s, for s < 2n - 1
        n, p = self.n, self.p
        rows = np.zeros((max(2 * n - 1, 1), n), dtype=np.int64)
        for s in range(2 * n - 1):
            r = poly_mod_monic([0] * s + [1], self.f, p) if n > 1 else []
            if n == 1:
                rows[s, 0] = 1
            else:
                rows[s, : len(r)] = r
        return rows

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.n

    def one(self) -> tuple[int, ...]:
        return (1,) + (0,) * (self.n - 1)

    def gen(self) -> tuple[int, ...]:
        """The class of x (for n = 1 this is the root 0 of f = x)."""
        if self.n == 1:
            return (0,)
        return (0, 1) + (0,) * (self.n - 2)

    def elements(self):
        """All field elements in lexicographic coordinate order."""
        return itertools.product(range(self.p), repeat=self.n)

    def mul_arrays(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        n = self.n
        if n == 1:
            return (a * b) % self.p
        shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
        conv = np.zeros(shape + (2 * n - 1,), dtype=np.int64)
        for t in range(n):
            conv[..., t: t + n] += a[..., t: t + 1] * b
        return (conv @ self._reduction) % self.p

    def matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Matrix product over the field; A is (r, s, n), B is (s, t, n)."""
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        n, p = self.n, self.p
        # float64 BLAS is exact while inner sums stay below 2^53
        exact = A.shape[-2] * (p - 1) ** 2 * n < 2 ** 52
        dt = np.float64 if exact else object
        conv = np.zeros(A.shape[:-1][:-1] + (B.shape[-2],) + (2 * n - 1,), dtype=np.int64)
        for t in range(n):
            At = A[..., t].astype(dt)
            for u in range(n):
                prod = At @ B[..., u].astype(dt)
                conv[..., t + u] += (np.asarray(prod) % p).astype(np.int64)
        return (conv @ self._reduction) % self.p

    def mul(self, a, b) -> tuple[int, ...]:
        return tuple(int(c) for c in self.mul_arrays(np.array(a), np.array(b)))

    def add(self, a, b) -> tuple[int, ...]:
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def neg(self, a) -> tuple[int, ...]:
        return tuple((-x) % self.p for x in a)

    def power(self, a, e: int) -> tuple[int, ...]:
        if e < 0:
            return self.power(self.inv(a), -e)
        result, base = self.one(), tuple(a)
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, a) -> tuple[int, ...]:
        if not any(a):
            raise FieldDivisionByZero("inverse of zero")
        return self.power(a, self.q - 2)

    def inv_array(self, a: np.ndarray) -> np.ndarray:
        """Inverses of an array of nonzero elements (shape (..., n))."""
        a = np.asarray(a, dtype=np.int64)
        if self.n == 1:
            table = np.array([0] + [pow(x, -1, self.p) for x in range(1, self.p)])
            return table[a]
        result = np.zeros_like(a)
        result[..., 0] = 1
        base, e = a, self.q - 2
        while e:
            if e & 1:
                result = self.mul_arrays(result, base)
            base = self.mul_arrays(base, base)
            e >>= 1
        return result

    @cached_property
    def x_power_matrices(self) -> np.ndarray:
        """Stack of F_p matrices of multiplication by x^r, r < n.

        ``M[r][:, t]`` holds the coordinates of ``x^(r+t)``.
        """
        n = self.n
        red = self._reduction
        M = np.zeros((n, n, n), dtype=np.int64)
        for r in range(n):
            for t in range(n):
                M[r, :, t] = red[r + t]
        return M

    def expand(self, A: np.ndarray) -> np.ndarray:
        """F_p matrix of an F_q-linear map.

        ``A`` has shape (r, c, n) and acts on column vectors; the result has
        shape (r*n, c*n) with F_p coordinate ``i*n + t`` for ``x^t`` in slot i.
        """
        A = np.asarray(A, dtype=np.int64)
        r, c, n = A.shape
        big = np.einsum("ikr,rab->iakb", A, self.x_power_matrices) % self.p
        return big.reshape(r * n, c * n)

    def enc(self, a) -> int:
        """Integer code sum(c_t p^t) of an element."""
        return sum(int(c) * self.p ** t for t, c in enumerate(a))


@lru_cache(maxsize=None)
def make_field(p: int, n: int) -> FieldDesc:
    """F_{p^n} defined by the lexicographically least monic irreducible."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if not 1 <= n <= MAX_DEGREE:
        raise DegreeOutOfRange(f"degree {n} outside [1, {MAX_DEGREE}]")
    if n == 1:
        return FieldDesc(p, 1, (0, 1))
    for low in itertools.product(range(p), repeat=n):
        f = tuple(low) + (1,)
        if low[0] == 0:
            continue
        if is_irreducible(list(f), p):
            return FieldDesc(p, n, f)
    raise AssertionError("no irreducible polynomial found")


def field_for_q(q: int) -> FieldDesc:
    p, n = prime_power(q)
    return make_field(p, n)


def field_arithmetic(desc: FieldDesc, op: str, a, b=None):
    if op == "add":
        return desc.add(a, b)
    if op == "mul":
        return desc.mul(a, b)
    if op == "inv":
        return desc.inv(a)
    if op == "pow":
        return desc.power(a, int(b))
    raise ValueError(f"unknown field operation {op!r}")


def frobenius(desc: FieldDesc, a) -> tuple[int, ...]:
    return desc.power(a, desc.p)


def frobenius_matrix(desc: FieldDesc) -> np.ndarray:
    """F_p matrix of a -> a^p; column t holds (x^t)^p."""
    n = desc.n
    M = np.zeros((n, n), dtype=np.int64)
    for t in range(n):
        e = [0] * n
        e[t] = 1
        M[:, t] = frobenius(desc, tuple(e))
    return M


# -- embeddings -----------------------------------------------------------------

@dataclass(frozen=True)
class Embedding:
    src: FieldDesc
    dst: FieldDesc
    image_of_x: tuple[int, ...]

    @cached_property
    def matrix(self) -> np.ndarray:
        """Row t holds the image of x^t in dst coordinates."""
        rows = [self.dst.power(self.image_of_x, t) for t in range(self.src.n)]
        return np.array(rows, dtype=np.int64).reshape(self.src.n, self.dst.n)

    def __call__(self, a) -> tuple[int, ...]:
        return tuple(int(c) for c in self.apply(np.array(a)))

    def apply(self, arr: np.ndarray) -> np.ndarray:
        """Map an array of src elements (trailing axis src.n) into dst."""
        arr = np.asarray(arr, dtype=np.int64)
        return (arr @ self.matrix) % self.dst.p

    @property
    def degree(self) -> int:
        return self.dst.n // self.src.n


def _eval_poly(desc: FieldDesc, coeffs, a) -> tuple[int, ...]:
    acc = desc.zero()
    for c in reversed(coeffs):
        acc = desc.add(desc.mul(acc, a), (c % desc.p,) + (0,) * (desc.n - 1))
    return acc


def field_roots(desc: FieldDesc, coeffs) -> list[tuple[int, ...]]:
    """Roots of an F_p-polynomial in ``desc`` by exhaustive search."""
    return [a for a in desc.elements() if not any(_eval_poly(desc, coeffs, a))]


def find_embedding(src: FieldDesc, dst: FieldDesc, choice: int = 0) -> Embedding:
    """Embed src into dst sending x to the ``choice``-th root of src.f.

    Roots are taken in lexicographic coordinate order of dst; ``choice=1``
    selects an alternate root (used to check embedding independence).
    """
    if src.p != dst.p or dst.n % src.n:
        raise NotASubfield(f"{src} is not a subfield of {dst}")
    if src.n == 1:
        return Embedding(src, dst, dst.zero())
    roots = []
    for a in dst.elements():
        if not any(_eval_poly(dst, src.f, a)):
            roots.append(a)
            if len(roots) > choice:
                break
    if len(roots) <= choice:
        raise NotASubfield(f"fewer than {choice + 1} roots of {src.f} in {dst}")
    return Embedding(src, dst, tuple(roots[choice]))


def identity_embedding(desc: FieldDesc) -> Embedding:
    return Embedding(desc, desc, desc.gen())


# -- Galois rings -----------------------------------------------------------------

@dataclass(frozen=True)
class GaloisRing:
    """(Z/p^E)[x]/(f_lift) together with its Frobenius automorphism.

    ``frob_matrix[j]`` is the coordinate row of phi(x^j) in the power basis.
    """

    p: int
    n: int
    E: int
    f_lift: tuple[int, ...]
    frob_matrix: tuple[tuple[int, ...], ...]

    @property
    def modulus(self) -> int:
        return self.p ** self.E

    def mul(self, a, b) -> list[int]:
        r = poly_mod_monic(poly_mul(list(a), list(b), self.modulus), self.f_lift, self.modulus)
        return r + [0] * (self.n - len(r))

    def frobenius(self, a) -> list[int]:
        M = np.array(self.frob_matrix, dtype=object)
        out = np.array(list(a), dtype=object) @ M
        return [int(c) % self.modulus for c in out]


def _gr_pad(a, n):
    a = list(a)[:n]
    return a + [0] * (n - len(a))


def _gr_eval(f, r, f_lift, m, n):
    acc = [0] * n
    for c in reversed(f):
        acc = _gr_pad(poly_mod_monic(poly_mul(acc, r, m), f_lift, m), n)
        acc[0] = (acc[0] + c) % m
    return acc


def _gr_inverse(a, f_lift, p, E, n):
    """Inverse of a unit of (Z/p^E)[x]/(f_lift) by Newton iteration."""
    desc = FieldDesc(p, n, tuple(f_lift)) if n > 1 else None
    a_mod_p = tuple(c % p for c in a)
    if desc is None:
        s = [pow(a_mod_p[0], -1, p)]
    else:
        s = list(desc.inv(a_mod_p))
    prec = 1
    while prec < E:
        prec = min(2 * prec, E)
        m = p ** prec
        as_ = _gr_pad(poly_mod_monic(poly_mul(a, s, m), f_lift, m), n)
        two_minus = [(-c) % m for c in as_]
        two_minus[0] = (two_minus[0] + 2) % m
        s = _gr_pad(poly_mod_monic(poly_mul(s, two_minus, m), f_lift, m), n)
    return s


def make_galois_ring(p: int, n: int, E: int) -> GaloisRing:
    """Build (Z/p^E)[x]/(f) and Hensel-lift the Frobenius root x^p."""
    if E < 1:
        raise ValueError("E must be positive")
    desc = make_field(p, n)
    f = list(desc.f)
    if n == 1:
        return GaloisRing(p, 1, E, tuple(f), ((1,),))
    # root of f congruent to x^p mod p
    r = _gr_pad(_powmod_x(p, f, p), n)
    df = [(i * c) for i, c in enumerate(f)][1:]
    prec = 1
    while prec < E:
        prec = min(2 * prec, E)
        m = p ** prec
        fr = _gr_eval(f, r, f, m, n)
        dfr = _gr_eval(df, r, f, m, n)
        inv = _gr_inverse(dfr, f, p, prec, n)
        step = _gr_pad(poly_mod_monic(poly_mul(fr, inv, m), f, m), n)
        r = [(a - b) % m for a, b in zip(r, step)]
    m = p ** E
    rows = []
    power = [1] + [0] * (n - 1)
    for _ in range(n):
        rows.append(tuple(c % m for c in power))
        power = _gr_pad(poly_mod_monic(poly_mul(power, r, m), f, m), n)
    return GaloisRing(p, n, E, tuple(f), tuple(rows))
