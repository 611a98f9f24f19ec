"""Polynomials over GF(q) viewed as functions, and the special families used by
the design constructions (o-polynomials, d-polynomials, t-monomials).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .gf import Field


class PolyError(ValueError):
    pass


class Poly:
    """A function GF(q) -> GF(q) given by sparse terms or by a value table.

    ``terms`` maps exponent -> coefficient in functional normal form: exponents
    lie in ``[0, q-1]`` where 0 is the constant term and every positive exponent
    ``e`` is folded to ``(e - 1) % (q - 1) + 1``.
    """

    def __init__(self, field: Field, terms=None, table=None, name: str | None = None):
        self.field = field
        self.name = name
        if terms is None and table is None:
            raise PolyError("need terms or a value table")
        self._terms = None
        if terms is not None:
            acc: dict[int, int] = {}
            for e, c in (terms.items() if isinstance(terms, dict) else terms):
                e = fold_exponent(int(e), field.q)
                acc[e] = field.add(acc.get(e, 0), int(c))
            self._terms = tuple(sorted((e, c) for e, c in acc.items() if c))
        if table is not None:
            table = np.asarray(table, dtype=np.int64).copy()
            if table.shape != (field.q,):
                raise PolyError("value table must have one entry per field element")
            table.setflags(write=False)
            self.__dict__["values"] = table

    # -- constructors -------------------------------------------------------

    @classmethod
    def monomial(cls, field: Field, e: int, c: int = 1, name: str | None = None) -> "Poly":
        return cls(field, [(e, c)], name=name)

    @classmethod
    def from_function(cls, field: Field, fn, name: str | None = None) -> "Poly":
        return cls(field, table=fn(field.elements), name=name)

    # -- views --------------------------------------------------------------

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def terms(self):
        """Sparse terms, interpolating the value table when necessary."""
        if self._terms is None:
            self._terms = interpolate(self.field, self.values)
        return self._terms

    @property
    def has_terms(self) -> bool:
        return self._terms is not None

    @property
    def monomial_exponent(self) -> int | None:
        t = self.terms
        if len(t) == 1 and t[0][1] == 1 and t[0][0] > 0:
            return t[0][0]
        return None

    @cached_property
    def values(self) -> np.ndarray:
        F = self.field
        x = F.elements
        acc = np.zeros(F.q, dtype=np.int64)
        for e, c in self._terms:
            acc = F.add(acc, F.mul(np.full(F.q, c), F.pow(x, e)))
        acc.setflags(write=False)
        return acc

    def __call__(self, x):
        v = self.values[x]
        return v if isinstance(x, np.ndarray) else int(v)

    def equals(self, other: "Poly") -> bool:
        """Functional equality by exhaustive evaluation."""
        return self.field == other.field and np.array_equal(self.values, other.values)

    def describe(self) -> dict:
        d: dict = {}
        if self.name:
            d["name"] = self.name
        e = self.monomial_exponent if self.has_terms else None
        if e is not None:
            d["monomial"] = e
        else:
            d["terms"] = [[e, c] for e, c in self.terms]
        return d

    def __repr__(self):
        if self.name:
            return f"Poly({self.name})"
        if self.has_terms:
            return "Poly(" + " + ".join(f"{c if c != 1 else ''}x^{e}" for e, c in reversed(self._terms)) + ")"
        return "Poly(<table>)"

    # -- algebra on value tables --------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        return Poly(self.field, table=self.field.add(self.values, other.values))

    def __mul__(self, other: "Poly") -> "Poly":
        return Poly(self.field, table=self.field.mul(self.values, other.values))

    def scale(self, c: int) -> "Poly":
        return Poly(self.field, table=self.field.mul(np.full(self.q, c), self.values))

    def power(self, e: int) -> "Poly":
        return Poly(self.field, table=self.field.pow(self.values, e))

    def compose(self, inner: "Poly") -> "Poly":
        return Poly(self.field, table=self.values[inner.values])

    def normalized(self) -> "Poly":
        """``f - f(0)``."""
        c = int(self.values[0])
        if c == 0:
            return self
        return Poly(self.field, table=self.field.sub(self.values, np.full(self.q, c)), name=self.name)


def fold_exponent(e: int, q: int) -> int:
    if e < 0:
        raise PolyError("negative exponent")
    return 0 if e == 0 else (e - 1) % (q - 1) + 1


def interpolate(field: Field, values) -> tuple:
    """Sparse coefficients of the unique polynomial of degree < q with these values."""
    F = field
    q = F.q
    values = np.asarray(values, dtype=np.int64)
    nz = F.elements[1:]
    fv = values[1:]
    coeffs = [int(values[0])]
    neg = F.neg
    for j in range(1, q - 1):
        coeffs.append(neg(_fsum(F, F.mul(fv, F.pow(nz, q - 1 - j)))))
    total = _fsum(F, fv)
    coeffs.append(F.sub(neg(total), coeffs[0]))
    return tuple((e, c) for e, c in enumerate(coeffs) if c)


def _fsum(F: Field, arr) -> int:
    arr = np.asarray(arr, dtype=np.int64)
    if F.p == 2:
        return int(np.bitwise_xor.reduce(arr)) if len(arr) else 0
    acc = 0
    for v in arr:
        acc = F.add(acc, int(v))
    return acc


# -- predicates ------------------------------------------------------------------

def _fibers(F: Field, f: Poly, slopes) -> np.ndarray:
    """Row per slope b: histogram of the values of f(x) + b x."""
    slopes = np.asarray(slopes, dtype=np.int64)
    rows = F.add(f.values[None, :], F.mul(slopes[:, None], F.elements[None, :]))
    out = np.zeros((len(slopes), F.q), dtype=np.int64)
    np.add.at(out, (np.arange(len(slopes))[:, None], rows), 1)
    return out


def image_sizes(f: Poly, slopes=None) -> np.ndarray:
    """``|{f(x) + b x}|`` for each slope ``b`` (all of GF(q) by default)."""
    F = f.field
    slopes = F.elements if slopes is None else slopes
    return (_fibers(F, f, slopes) > 0).sum(axis=1)


def is_permutation(f: Poly) -> bool:
    return len(np.unique(f.values)) == f.q


def comp_inverse(f: Poly) -> Poly:
    if not is_permutation(f):
        raise PolyError(f"{f!r} is not a permutation")
    inv = np.empty(f.q, dtype=np.int64)
    inv[f.values] = f.field.elements
    name = f"{f.name}^-1" if f.name else None
    return Poly(f.field, table=inv, name=name)


def is_opolynomial(f: Poly) -> bool:
    """Permutation with f(x) + u x exactly 2-to-1 for every u != 0 (after f -> f - f(0))."""
    F = f.field
    if F.p != 2 or F.q < 4:
        return False
    g = f.normalized()
    if not is_permutation(g):
        return False
    fib = _fibers(F, g, F.elements[1:])
    return bool(np.all((fib == 0) | (fib == 2)))


def is_dpolynomial(f: Poly) -> tuple[bool, int | None]:
    """(True, size) when ``|{f(x)+bx}|`` is the same for every b != 0."""
    if not is_permutation(f):
        return False, None
    sizes = np.unique(image_sizes(f, f.field.elements[1:]))
    if len(sizes) == 1:
        return True, int(sizes[0])
    return False, None


def is_tmonomial(e: int, field: Field) -> tuple[bool, tuple[int, ...]]:
    """Twin-design monomial test for odd q; returns the distinct image sizes."""
    if field.p == 2:
        raise PolyError("t-monomials are defined for odd q")
    if math.gcd(e, field.q - 1) != 1:
        raise PolyError(f"gcd({e}, {field.q - 1}) != 1")
    sizes = tuple(int(s) for s in np.unique(image_sizes(Poly.monomial(field, e), field.elements[1:])))
    return len(sizes) == 2, sizes


# -- exponent arithmetic ---------------------------------------------------------

@dataclass(frozen=True)
class ExponentOrbit:
    e: int
    members: frozenset

    def __contains__(self, x):
        return x in self.members


def exponent_orbit(e: int, field: Field) -> ExponentOrbit:
    """``{e, 1/e, 1-e, 1/(1-e), e/(e-1), (e-1)/e}`` modulo q - 1."""
    n = field.q - 1
    e %= n
    if math.gcd(e * (e - 1), n) != 1:
        raise PolyError(f"gcd(e(e-1), q-1) != 1 for e={e}")
    inv = lambda a: pow(a % n, -1, n)
    members = {
        e,
        inv(e),
        (1 - e) % n,
        inv(1 - e),
        e * inv(e - 1) % n,
        (e - 1) * inv(e) % n,
    }
    return ExponentOrbit(e, frozenset(members))


def dmonomial_exponents(field: Field, parity: str | None = None) -> list[int]:
    """Exponents from the known d-monomial families valid for this field.

    ``parity`` is one of ``odd_m``, ``even_m``, ``odd_q`` and is inferred when
    omitted.  The ``odd_q`` families are twin-design candidates (at most two
    image sizes over b != 0), not d-monomials.  Every exponent is reduced modulo q - 1 and checked before it is
    returned.
    """
    p, m, q = field.p, field.m, field.q
    n = q - 1
    if parity is None:
        parity = "odd_q" if p != 2 else ("odd_m" if m % 2 else "even_m")
    cands: list[int] = []
    if parity == "odd_m":
        if p != 2 or m % 2 == 0 or m < 3:
            raise PolyError("odd_m list needs q = 2^m with odd m >= 3")
        for h in range(1, m):
            if math.gcd(h, m) == 1:
                cands += [2**h + 1, 2 ** (2 * h) - 2**h + 1]
        cands.append(2 ** ((m - 1) // 2) + 3)
        if m % 4 == 1 and m >= 5:
            cands.append(2 ** ((m - 1) // 2) + 2 ** ((m - 1) // 4) - 1)
        if m % 4 == 3:
            cands.append(2 ** ((m - 1) // 2) + 2 ** ((3 * m - 1) // 4) - 1)
        ok = lambda e: math.gcd(e * (e - 1), n) == 1
    elif parity == "even_m":
        if p != 2 or m % 2:
            raise PolyError("even_m list needs q = 2^m with even m")
        for h in range(1, m):
            if (m // math.gcd(h, m)) % 2 == 1:
                cands.append(2**h + 1)
        if m % 8 == 2:
            cands.append(2 ** (m // 2) + 2 ** ((m + 2) // 4) + 1)
        if m % 24 in (4, 20):
            cands.append(2 ** ((m - 2) // 2) - 3)
        if m % 24 in (0, 8, 16):
            cands.append(2 ** ((m + 2) // 2) - 3)
        ok = lambda e: math.gcd(e * (e - 1), n) == 1
    elif parity == "odd_q":
        if p == 2:
            raise PolyError("odd_q list needs odd characteristic")
        if p == 3:
            cands.append(3)
        if p % 6 == 5 and m % 2:
            cands.append(3)
        if p in (3, 7) and m % 2:
            cands.append(5)
        cands.append(q - 2)
        if (p % 4 == 1 and m % 2 == 0) or p % 4 == 3:
            cands.append((q - 3) // 2)
        if m % 2:
            cands.append(q - p - 1)
        ok = lambda e: math.gcd(e, n) == 1 and math.gcd(e - 1, n) == 2
    else:
        raise PolyError(f"unknown parity {parity!r}")
    out = sorted({c % n for c in cands if c > 1 and ok(c % n)})
    return out


# -- Dickson polynomials ---------------------------------------------------------

def dickson(n: int, field: Field) -> Poly:
    """``D_n(x, 1)`` from ``D_0 = 2, D_1 = x, D_n = x D_{n-1} - D_{n-2}``.

    Coefficients are kept as a dense vector in functional normal form, so large
    ``n`` stays cheap.
    """
    if n < 0:
        raise PolyError("Dickson order must be >= 0")
    F = field
    q = F.q
    prev = np.zeros(q, dtype=np.int64)
    prev[0] = F.scalar(2)
    if n == 0:
        return Poly(F, list(enumerate(prev.tolist())), name="D_0")
    cur = np.zeros(q, dtype=np.int64)
    cur[1] = 1
    for _ in range(n - 1):
        shifted = np.zeros(q, dtype=np.int64)
        shifted[1:] = cur[:-1]
        shifted[1] = F.add(int(shifted[1]), int(cur[-1]))  # x * x^(q-1) = x^q ~ x
        prev, cur = cur, F.sub(shifted, prev)
    return Poly(F, list(enumerate(cur.tolist())), name=f"D_{n}")


def dickson_values(n: int, field: Field) -> np.ndarray:
    """Pointwise ``D_n(x, 1)`` for every x, by running the recurrence on values."""
    F = field
    x = F.elements
    prev = np.full(F.q, F.scalar(2), dtype=np.int64)
    if n == 0:
        return prev
    cur = x.copy()
    for _ in range(n - 1):
        prev, cur = cur, F.sub(F.mul(x, cur), prev)
    return cur


# -- catalog ---------------------------------------------------------------------

CATALOG_NAMES = (
    "trans:h",
    "segre",
    "glynn1",
    "glynn2",
    "cherowitzo",
    "cherowitzo_inv",
    "payne",
    "payne_inv",
    "subiaco:a_index",
    "subiaco1",
)


def _need_char2(F: Field, name: str):
    if F.p != 2:
        raise PolyError(f"{name} is defined over GF(2^m)")


def _need_odd_m(F: Field, name: str):
    _need_char2(F, name)
    if F.m % 2 == 0:
        raise PolyError(f"{name} needs odd m (got m={F.m})")


def subiaco_ok(field: Field, a: int) -> tuple[bool, str]:
    """Parameter check for Subiaco_a: Tr(1/a) = 1, and a outside GF(4) when m = 2 mod 4.

    The second condition is stated for an undefined symbol in the source; it is
    applied to ``a`` here.
    """
    F = field
    if a == 0:
        return False, "a must be nonzero"
    if F.trace(F.inv(a)) != 1:
        return False, "Tr(1/a) != 1"
    if F.m % 4 == 2 and F.pow(a, 4) == a:
        return False, "a lies in GF(4) while m = 2 mod 4"
    return True, ""


def catalog(name: str, field: Field) -> Poly:
    """Known o-polynomial named by its stable string (see ``CATALOG_NAMES``)."""
    F = field
    q, m = F.q, F.m
    x = F.elements
    key, _, arg = name.partition(":")
    if key == "trans":
        _need_char2(F, name)
        h = int(arg)
        if not 1 <= h < m or math.gcd(h, m) != 1:
            raise PolyError(f"trans needs 1 <= h < m with gcd(h, m) = 1 (h={h}, m={m})")
        return Poly.monomial(F, 2**h, name=name)
    if key == "segre":
        _need_odd_m(F, name)
        return Poly.monomial(F, 6, name=name)
    if key == "glynn1":
        _need_odd_m(F, name)
        return Poly.monomial(F, 3 * 2 ** ((m + 1) // 2) + 4, name=name)
    if key == "glynn2":
        _need_odd_m(F, name)
        if m % 4 == 1:
            e = 2 ** ((m + 1) // 2) + 2 ** ((3 * m + 1) // 4)
        else:
            e = 2 ** ((m + 1) // 2) + 2 ** ((m + 1) // 4)
        return Poly.monomial(F, e, name=name)
    if key == "cherowitzo":
        _need_odd_m(F, name)
        s = 2 ** ((m + 1) // 2)
        return Poly(F, [(s, 1), (s + 2, 1), (3 * s + 4, 1)], name=name)
    if key == "cherowitzo_inv":
        _need_odd_m(F, name)
        e = (m + 1) // 2
        s = 2**e
        inner = F.add(F.add(F.pow(x, s + 1), F.pow(x, 3)), x)
        return Poly(F, table=F.mul(x, F.pow(inner, 2 ** (e - 1) - 1)), name=name)
    if key == "payne":
        _need_odd_m(F, name)
        sixth = F.exp_inverse(6)
        n = q - 1
        return Poly(F, [(5 * sixth % n, 1), (3 * sixth % n, 1), (sixth, 1)], name=name)
    if key == "payne_inv":
        _need_odd_m(F, name)
        num = 3 * 2 ** (2 * m) - 2
        if num % 5:
            raise PolyError("(3*2^(2m) - 2)/5 is not an integer for this m")
        return Poly(F, table=F.pow(dickson_values(num // 5, F), 6), name=name)
    if key == "subiaco":
        _need_char2(F, name)
        a = int(arg)
        ok, why = subiaco_ok(F, a)
        if not ok:
            raise PolyError(f"subiaco:{a}: {why}")
        return _subiaco(F, a, name)
    if key == "subiaco1":
        _need_odd_m(F, name)
        return _subiaco(F, 1, name)
    raise PolyError(f"unknown catalog name {name!r}")


def _subiaco(F: Field, a: int, name: str) -> Poly:
    x = F.elements
    a2 = F.mul(a, a)
    coef = F.mul(a2, F.add(F.add(1, a), a2))
    num = F.add(F.mul(np.full(F.q, a2), F.add(F.pow(x, 4), x)),
                F.mul(np.full(F.q, coef), F.add(F.pow(x, 3), F.pow(x, 2))))
    den = F.add(F.add(F.pow(x, 4), F.mul(np.full(F.q, a2), F.pow(x, 2))), np.ones(F.q, dtype=np.int64))
    vals = F.add(F.mul(num, F.pow(den, F.q - 2)), F.pow(x, 2 ** (F.m - 1)))
    return Poly(F, table=vals, name=name)


def parse_poly(text: str, field: Field) -> Poly:
    """``<catalog-name>``, ``monomial:e`` or ``terms:e1,c1;e2,c2``."""
    if text.startswith("monomial:"):
        e = int(text.split(":", 1)[1])
        return Poly.monomial(field, e, name=text)
    if text.startswith("terms:"):
        body = text.split(":", 1)[1]
        terms = []
        for part in filter(None, body.split(";")):
            e, _, c = part.partition(",")
            terms.append((int(e), int(c) if c else 1))
        return Poly(field, terms, name=text)
    return catalog(text, field)


# -- o-polynomial transforms -----------------------------------------------------

def opoly_transform(f: Poly, which: str, j: int | None = None, check: bool = True) -> Poly:
    """``inverse``, ``frobenius_twist`` (needs j), ``bar`` or ``shift``."""
    F = f.field
    q, m, p = F.q, F.m, F.p
    if check and not is_opolynomial(f):
        raise PolyError(f"{f!r} is not an o-polynomial")
    base = f.name or "f"
    if which == "inverse":
        if f.has_terms and f.monomial_exponent is not None:
            return Poly.monomial(F, F.exp_inverse(f.monomial_exponent), name=f"{base}^-1")
        return comp_inverse(f)
    if which == "frobenius_twist":
        if j is None or not 1 <= j <= m - 1:
            raise PolyError("frobenius_twist needs 1 <= j <= m-1")
        if f.has_terms:
            outer = p ** (m - j)
            return Poly(F, [(e * p**j * outer, F.pow(c, outer)) for e, c in f.terms], name=f"{base}~{j}")
        inner = F.pow(F.elements, p**j)
        return Poly(F, table=F.pow(f.values[inner], p ** (m - j)), name=f"{base}~{j}")
    if which == "bar":
        if f.has_terms:
            # x * (x^(q-2))^e  ==  x^(1 + e(q-2)) on nonzero x, and both vanish at 0
            terms = [(1 + e * (q - 2), c) for e, c in f.terms if e > 0]
            const = [(1, c) for e, c in f.terms if e == 0]
            return Poly(F, terms + const, name=f"bar({base})")
        x = F.elements
        return Poly(F, table=F.mul(x, f.values[F.pow(x, q - 2)]), name=f"bar({base})")
    if which == "shift":
        x1 = F.add(F.elements, 1)
        return Poly(F, table=F.add(f.values[x1], np.full(q, f(1))), name=f"shift({base})")
    raise PolyError(f"unknown transform {which!r}")
