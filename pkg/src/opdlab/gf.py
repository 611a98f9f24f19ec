"""Arithmetic in GF(p^m).

Elements are integers in ``[0, q)``: digit ``i`` of the base-``p`` expansion is
the coefficient of ``x^i`` modulo the defining polynomial.  Index 0 is zero and
index 1 is one.  Every operation accepts either Python ints or numpy integer
arrays and broadcasts like numpy.
"""

from __future__ import annotations

import itertools
import math
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

MAX_ORDER = 1 << 20
_ADD_TABLE_ORDER = 2187


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomials over the prime field, coefficient lists low-to-high ---------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], f: Sequence[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    df = len(f) - 1
    inv_lead = pow(f[-1], -1, p)
    while len(a) - 1 >= df:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        _trim(a)
    return a


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _x_pow_mod(e: int, f: Sequence[int], p: int) -> list[int]:
    result, base = [1], [0, 1]
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), f, p)
        base = _pmod(_pmul(base, base, p), f, p)
        e >>= 1
    return result


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over GF(p)."""
    f = list(f)
    m = len(f) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    if f[0] % p == 0:
        return False
    def frob_minus_x(k):
        h = _x_pow_mod(p**k, f, p)
        h = h + [0] * max(0, 2 - len(h))
        h[1] = (h[1] - 1) % p
        return _trim(h)

    if frob_minus_x(m):
        return False
    for r in prime_factors(m):
        g = _pgcd(list(f), frob_minus_x(m // r), p)
        if len(g) > 1:
            return False
    return True


def default_modulus(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible, low-degree coefficient first."""
    for low in itertools.product(range(p), repeat=m):
        f = list(low) + [1]
        if is_irreducible(f, p):
            return tuple(f)
    raise FieldError(f"no irreducible polynomial of degree {m} over GF({p})")  # unreachable


class Field:
    """GF(p^m) with a fixed modulus; immutable after construction."""

    def __init__(self, p: int, m: int, modulus: Sequence[int]):
        self.p = p
        self.m = m
        self.q = p**m
        self.modulus = tuple(int(c) for c in modulus)
        self._pow_p = [p**i for i in range(m + 1)]
        self._build_tables()

    # -- construction -------------------------------------------------------

    def _digits(self, a: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.m):
            a, r = divmod(a, p)
            out.append(r)
        return out

    def _undigits(self, d: Iterable[int]) -> int:
        return sum(int(c) * w for c, w in zip(d, self._pow_p))

    def mul_slow(self, a: int, b: int) -> int:
        """Schoolbook product reduced by the modulus; no tables involved."""
        if self.p == 2:
            r = 0
            while b:
                if b & 1:
                    r ^= a
                b >>= 1
                a <<= 1
            mod = self.modulus_int
            for i in range(r.bit_length() - 1, self.m - 1, -1):
                if r >> i & 1:
                    r ^= mod << (i - self.m)
            return r
        prod = _pmod(_pmul(self._digits(a), self._digits(b), self.p), self.modulus, self.p)
        return self._undigits(prod)

    def _mul_const_vec(self, a: np.ndarray, c: int) -> np.ndarray:
        """Vectorised schoolbook product of many elements by one constant."""
        p, m = self.p, self.m
        if p == 2:
            acc = np.zeros_like(a)
            for j in range(c.bit_length()):
                if c >> j & 1:
                    acc ^= a << j
            mod = self.modulus_int
            for top in range(2 * m - 2, m - 1, -1):
                acc ^= ((acc >> top) & 1) * (mod << (top - m))
            return acc
        w = np.array(self._pow_p[:m], dtype=np.int64)
        da = (a[:, None] // w) % p
        dc = self._digits(c)
        prod = np.zeros((len(a), 2 * m - 1), dtype=np.int64)
        for j, cj in enumerate(dc):
            if cj:
                prod[:, j : j + m] += cj * da
        prod %= p
        mod = np.array(self.modulus[:m], dtype=np.int64)
        for top in range(2 * m - 2, m - 1, -1):
            lead = prod[:, top].copy()
            prod[:, top] = 0
            prod[:, top - m : top] = (prod[:, top - m : top] - lead[:, None] * mod) % p
        return prod[:, :m] @ w

    def pow_slow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self.mul_slow(r, a)
            a = self.mul_slow(a, a)
            e >>= 1
        return r

    def _find_generator(self) -> int:
        if self.q == 2:
            return 1
        n = self.q - 1
        factors = prime_factors(n)
        for g in range(2, self.q):
            if all(self.pow_slow(g, n // r) != 1 for r in factors):
                return g
        raise FieldError("modulus is not irreducible")  # no generator exists

    def _build_tables(self):
        q = self.q
        self.generator = self._find_generator()
        exp = np.empty(2 * (q - 1) + 1, dtype=np.int64)
        g = self.generator
        run = min(q - 1, 1024)
        cur = 1
        for i in range(run):
            exp[i] = cur
            cur = self.mul_slow(cur, g)
        step = cur  # g**run
        start = run
        while start < q - 1:
            n = min(run, q - 1 - start)
            exp[start : start + n] = self._mul_const_vec(exp[start - run : start - run + n], step)
            start += n
        if self.mul_slow(int(exp[q - 2]), g) != 1:
            raise FieldError("generator order mismatch; modulus is not irreducible")
        exp[q - 1 :] = np.concatenate([exp[: q - 1], exp[:1]])
        log = np.full(q, -1, dtype=np.int64)
        log[exp[: q - 1]] = np.arange(q - 1)
        if np.any(log[1:] < 0):
            raise FieldError("modulus is not irreducible")
        self.exp_table = exp
        self.log_table = log
        self._log0 = np.where(log < 0, 0, log)
        if self.p == 2:
            self._add_table = None
            self.neg_table = np.arange(q, dtype=np.int64)
        else:
            digits = (np.arange(q)[:, None] // np.array(self._pow_p[: self.m])) % self.p
            self._digit_table = digits
            self._weights = np.array(self._pow_p[: self.m], dtype=np.int64)
            self.neg_table = ((-digits) % self.p) @ self._weights
            if q <= _ADD_TABLE_ORDER:
                self._add_table = ((digits[:, None, :] + digits[None, :, :]) % self.p) @ self._weights
            else:
                self._add_table = None
        for t in (self.exp_table, self.log_table, self.neg_table):
            t.setflags(write=False)

    # -- description --------------------------------------------------------

    def describe(self) -> dict:
        return {"p": self.p, "m": self.m, "modulus": list(self.modulus)}

    @property
    def modulus_int(self) -> int:
        return sum(c * self.p**i for i, c in enumerate(self.modulus))

    def __repr__(self):
        terms = [("x^%d" % i if i > 1 else "x" if i == 1 else "1") if c == 1 else f"{c}x^{i}"
                 for i, c in reversed(list(enumerate(self.modulus))) if c]
        return f"GF({self.p}^{self.m}) mod {' + '.join(terms)}"

    def __eq__(self, other):
        return isinstance(other, Field) and (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus)

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    def __reduce__(self):
        return (Field, (self.p, self.m, self.modulus))

    @cached_property
    def elements(self) -> np.ndarray:
        a = np.arange(self.q, dtype=np.int64)
        a.setflags(write=False)
        return a

    @cached_property
    def add_table(self) -> np.ndarray:
        """Full q x q addition table (used by the block kernels)."""
        e = self.elements
        return np.ascontiguousarray(self.add(e[:, None], e[None, :]), dtype=np.int32)

    @cached_property
    def mul_table(self) -> np.ndarray:
        e = self.elements
        return np.ascontiguousarray(self.mul(e[:, None], e[None, :]), dtype=np.int64)

    # -- arithmetic ---------------------------------------------------------

    def add(self, a, b):
        if self.p == 2:
            return np.bitwise_xor(a, b) if _is_arr(a, b) else a ^ b
        if self._add_table is not None:
            r = self._add_table[a, b]
            return r if _is_arr(a, b) else int(r)
        da = self._digit_table[np.asarray(a)]
        db = self._digit_table[np.asarray(b)]
        r = ((da + db) % self.p) @ self._weights
        return r if _is_arr(a, b) else int(r)

    def neg(self, a):
        r = self.neg_table[a]
        return r if _is_arr(a) else int(r)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if not _is_arr(a, b):
            if a == 0 or b == 0:
                return 0
            return int(self.exp_table[self.log_table[a] + self.log_table[b]])
        a, b = np.asarray(a), np.asarray(b)
        r = self.exp_table[self._log0[a] + self._log0[b]]
        return np.where((a == 0) | (b == 0), 0, r)

    def inv(self, a):
        if not _is_arr(a):
            if a == 0:
                raise ZeroDivisionError("inverse of zero in " + repr(self))
            return int(self.exp_table[(self.q - 1 - self.log_table[a]) % (self.q - 1)])
        a = np.asarray(a)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        return self.exp_table[(self.q - 1 - self.log_table[a]) % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        """``a**e``; ``0**0 == 1``; negative ``e`` needs ``a != 0``."""
        e = int(e)
        n = self.q - 1
        if not _is_arr(a):
            if a == 0:
                if e < 0:
                    raise ZeroDivisionError("negative power of zero")
                return 1 if e == 0 else 0
            return int(self.exp_table[(int(self.log_table[a]) * (e % n)) % n])
        a = np.asarray(a)
        if e < 0 and np.any(a == 0):
            raise ZeroDivisionError("negative power of zero")
        r = self.exp_table[(self._log0[a] * (e % n)) % n]
        if e == 0:
            return np.ones_like(a)
        return np.where(a == 0, 0, r)

    def scalar(self, n: int) -> int:
        """Image of the integer ``n`` in the prime field."""
        return n % self.p

    def frobenius(self, a, i: int = 1):
        return self.pow(a, self.p ** (i % self.m))

    def trace(self, a):
        """Absolute trace to GF(p); result is an element index in ``[0, p)``."""
        acc = a
        cur = a
        for _ in range(self.m - 1):
            cur = self.pow(cur, self.p)
            acc = self.add(acc, cur)
        return acc

    @cached_property
    def trace_table(self) -> np.ndarray:
        t = np.asarray(self.trace(self.elements))
        t.setflags(write=False)
        return t

    def exp_inverse(self, e: int) -> int:
        """Inverse of ``e`` modulo ``q - 1``, in ``[1, q - 1)``."""
        n = self.q - 1
        if math.gcd(e, n) != 1:
            raise FieldError(f"gcd({e}, {n}) != 1; exponent has no inverse")
        r = pow(e, -1, n) if n > 1 else 1
        return r if r else 1


def _is_arr(*xs) -> bool:
    return any(isinstance(x, np.ndarray) for x in xs)


def field_new(p: int, m: int, modulus: Sequence[int] | None = None) -> Field:
    """Build GF(p^m); the default modulus is the lexicographically smallest irreducible."""
    if not is_prime(p):
        raise FieldError(f"p={p} is not prime")
    if m < 1:
        raise FieldError("extension degree must be >= 1")
    if p**m > MAX_ORDER:
        raise FieldError(f"q = {p}^{m} exceeds the supported order 2^20")
    if modulus is None:
        modulus = default_modulus(p, m)
    modulus = [int(c) % p for c in modulus]
    if len(modulus) != m + 1 or modulus[-1] != 1:
        raise FieldError(f"modulus must be monic of degree {m}")
    if not is_irreducible(modulus, p):
        raise FieldError(f"modulus {modulus} is reducible over GF({p})")
    return Field(p, m, modulus)


def parse_field(text: str) -> Field:
    """Parse ``p:m`` or ``p:m:hex`` where hex encodes the full modulus in base p."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise FieldError(f"bad field descriptor {text!r}; expected p:m[:modulus-hex]")
    p, m = int(parts[0]), int(parts[1])
    modulus = None
    if len(parts) == 3:
        n = int(parts[2], 16)
        modulus = []
        for _ in range(m + 1):
            n, r = divmod(n, p)
            modulus.append(r)
        if n:
            raise FieldError("modulus has degree above m")
    return field_new(p, m, modulus)


def field_from_dict(d: dict) -> Field:
    return field_new(d["p"], d["m"], d["modulus"])
