"""Block sets from polynomials and exhaustive t-design verification."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from math import comb

import numpy as np

from . import kernels
from .gf import Field
from .poly import Poly, is_dpolynomial, is_opolynomial

DEFAULT_MAX_COUNTERS = 1 << 28
DEFAULT_MC_SAMPLES = 20000
MAX_PAIRWISE_BLOCKS = 60000


class DesignError(ValueError):
    pass


class BudgetError(RuntimeError):
    pass


def nwords(v: int) -> int:
    return (v + 63) // 64


def int_to_words(x: int, nw: int) -> np.ndarray:
    return np.array([(x >> (64 * w)) & 0xFFFFFFFFFFFFFFFF for w in range(nw)], dtype=np.uint64)


def words_to_int(row) -> int:
    return sum(int(w) << (64 * i) for i, w in enumerate(row))


def mask_of(points, v: int) -> np.ndarray:
    x = 0
    for pt in points:
        x |= 1 << int(pt)
    return int_to_words(x, nwords(v))


@dataclass(frozen=True)
class Block:
    bits: int
    q: int

    @property
    def size(self) -> int:
        return self.bits.bit_count()

    def members(self) -> list[int]:
        return [i for i in range(self.q) if self.bits >> i & 1]

    def __contains__(self, pt: int) -> bool:
        return bool(self.bits >> pt & 1)


def canonical_rows(bits: np.ndarray) -> np.ndarray:
    """Deduplicate and sort rows as big integers (most significant word first)."""
    bits = np.ascontiguousarray(bits, dtype=np.uint64)
    if len(bits) == 0:
        return bits
    order = np.lexsort(bits.T)  # last column (highest word) is the primary key
    s = bits[order]
    keep = np.ones(len(s), dtype=bool)
    keep[1:] = np.any(s[1:] != s[:-1], axis=1)
    return np.ascontiguousarray(s[keep])


@dataclass
class Design:
    """Point set ``0..v-1`` with a simple, canonically sorted block list."""

    v: int
    blocks: np.ndarray
    field: Field | None = None
    source: dict = dc_field(default_factory=dict)
    point_labels: list | None = None
    raw_count: int | None = None  # parameter tuples before deduplication

    def __post_init__(self):
        self.blocks = canonical_rows(self.blocks)
        sizes = kernels.popcount_rows(self.blocks)
        self.sizes = sizes
        ks = np.unique(sizes)
        self.k = int(ks[0]) if len(ks) == 1 else None

    @property
    def b(self) -> int:
        return len(self.blocks)

    @property
    def trivial(self) -> bool:
        """Complete design: every k-subset is a block."""
        return self.k is not None and self.b == comb(self.v, self.k)

    def block_ints(self) -> list[int]:
        return [words_to_int(r) for r in self.blocks]

    def block_sets(self) -> list[frozenset]:
        member = kernels.unpack_rows(self.blocks, self.v)
        return [frozenset(np.nonzero(r)[0].tolist()) for r in member]

    def incidence(self) -> np.ndarray:
        """Boolean b x v incidence matrix."""
        return kernels.unpack_rows(self.blocks, self.v)

    def same_blocks(self, other: "Design") -> bool:
        return self.v == other.v and np.array_equal(self.blocks, other.blocks)

    # -- export ----------------------------------------------------------------

    def export_text(self, header: dict | None = None) -> str:
        import json

        width = (self.v + 3) // 4
        head = {"v": self.v, "k": self.k, "b": self.b}
        if self.field is not None:
            head["field"] = self.field.describe()
        if self.source:
            head["source"] = self.source
        if header:
            head.update(header)
        lines = ["# " + json.dumps(head, sort_keys=True)]
        lines += [format(x, f"0{width}x") for x in self.block_ints()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Design":
        import json

        head, rows = {}, []
        for line in text.splitlines():
            if line.startswith("#"):
                head.update(json.loads(line[1:]))
            elif line.strip():
                rows.append(int(line, 16))
        v = head["v"]
        nw = nwords(v)
        bits = np.array([int_to_words(x, nw) for x in rows], dtype=np.uint64).reshape(len(rows), nw)
        return cls(v, bits, source=head.get("source", {}))


@dataclass
class DesignParams:
    t: int
    v: int
    k: int
    lam: int
    b: int
    simple: bool = True
    quasi_symmetric: bool | None = None
    intersection_numbers: tuple | None = None

    @property
    def symmetric(self) -> bool:
        return self.b == self.v

    @property
    def steiner(self) -> bool:
        return self.t >= 2 and self.lam == 1

    def admissible(self) -> bool:
        return self.b * comb(self.k, self.t) == self.lam * comb(self.v, self.t)

    def as_dict(self) -> dict:
        d = {"t": self.t, "v": self.v, "k": self.k, "lambda": self.lam, "b": self.b,
             "simple": self.simple, "symmetric": self.symmetric, "steiner": self.steiner}
        if self.quasi_symmetric is not None:
            d["quasi_symmetric"] = self.quasi_symmetric
            d["intersection_numbers"] = list(self.intersection_numbers)
        return d

    def __str__(self):
        return f"{self.t}-({self.v}, {self.k}, {self.lam}) design, b={self.b}"


@dataclass
class ValueSpectrum:
    histogram: dict
    extended: bool = False

    def total(self) -> int:
        return sum(self.histogram.values())

    def as_dict(self) -> dict:
        return {str(k): v for k, v in sorted(self.histogram.items())}


@dataclass
class TDesignResult:
    t: int
    lam: int | None
    mode: str = "exhaustive"
    witness: list | None = None
    samples: int | None = None
    seed: int | None = None

    @property
    def ok(self) -> bool:
        return self.lam is not None

    def as_dict(self) -> dict:
        d = {"t": self.t, "lambda": self.lam, "mode": self.mode, "holds": self.ok}
        if self.witness is not None:
            d["witness"] = self.witness
        if self.mode == "monte-carlo":
            d["samples"], d["seed"] = self.samples, self.seed
        return d


# -- blocks ----------------------------------------------------------------------

def block(f: Poly, b: int, c: int) -> Block:
    F = f.field
    vals = F.add(F.add(f.values, F.mul(np.full(F.q, b), F.elements)), np.full(F.q, c))
    bits = 0
    for y in np.unique(vals).tolist():
        bits |= 1 << y
    return Block(bits, F.q)


def extended_block(f: Poly, a: int, b: int, c: int) -> Block:
    F = f.field
    af = F.mul(np.full(F.q, a), f.values)
    vals = F.add(F.add(af, F.mul(np.full(F.q, b), F.elements)), np.full(F.q, c))
    bits = 0
    for y in np.unique(vals).tolist():
        bits |= 1 << y
    return Block(bits, F.q)


def slope_rows(f: Poly, extended: bool = False, a: int | None = None):
    """Value rows ``a f(x) + b x`` and their ``(a, b)`` parameters.

    Basic mode fixes ``a = 1`` (or the given ``a``); extended mode runs over all of GF(q)^2.
    """
    F = f.field
    x = F.elements
    if extended:
        aa, bb = np.meshgrid(x, x, indexing="ij")
        aa, bb = aa.ravel(), bb.ravel()
    else:
        bb = x
        aa = np.full(F.q, 1 if a is None else a, dtype=np.int64)
    vals = F.add(F.mul(aa[:, None], f.values[None, :]), F.mul(bb[:, None], x[None, :]))
    return np.ascontiguousarray(vals, dtype=np.int64), aa, bb


def _row_sizes(vals: np.ndarray, q: int) -> np.ndarray:
    seen = np.zeros((len(vals), q), dtype=bool)
    seen[np.arange(len(vals))[:, None], vals] = True
    return seen.sum(axis=1)


def value_spectrum(f: Poly, extended: bool = False) -> ValueSpectrum:
    """Histogram of block sizes over all ``(b, c)`` (or ``(a, b, c)``).

    A shift by ``c`` is a bijection, so each ``(a, b)`` row contributes ``q``
    blocks of one size.
    """
    vals, _, _ = slope_rows(f, extended)
    sizes = _row_sizes(vals, f.q)
    ks, counts = np.unique(sizes, return_counts=True)
    return ValueSpectrum({int(k): int(c) * f.q for k, c in zip(ks, counts)}, extended)


def all_blocks(f: Poly, extended: bool = False, a: int | None = None, nonzero_slopes: bool = False):
    """Every image bitset (as a multiset), with the ``(a, b, c)`` of each row."""
    F = f.field
    vals, aa, bb = slope_rows(f, extended, a)
    if nonzero_slopes:
        keep = (bb != 0) & (aa != 0)
        vals, aa, bb = vals[keep], aa[keep], bb[keep]
    bits = kernels.translate_images(vals, F.add_table, nwords(F.q))
    cc = np.tile(F.elements, len(vals))
    return bits, np.repeat(aa, F.q), np.repeat(bb, F.q), cc


def build_design(f: Poly, k: int, extended: bool = False) -> Design:
    F = f.field
    if not 2 <= k <= F.q:
        raise DesignError("block size must satisfy 2 <= k <= q")
    vals, _, _ = slope_rows(f, extended)
    keep = _row_sizes(vals, F.q) == k
    if not keep.any():
        raise DesignError(f"no block of size {k}")
    bits = kernels.translate_images(vals[keep], F.add_table, nwords(F.q))
    src = {"poly": f.describe(), "k": k, "construction": "extended" if extended else "basic"}
    return Design(F.q, bits, field=F, source=src, raw_count=len(bits))


# -- verification ----------------------------------------------------------------

def colex_unrank(r: int, t: int) -> list[int]:
    out = []
    for j in range(t, 0, -1):
        c = j - 1
        while comb(c + 1, j) <= r:
            c += 1
        out.append(c)
        r -= comb(c, j)
    return sorted(out)


def colex_rank(subset) -> int:
    return sum(comb(x, j + 1) for j, x in enumerate(sorted(subset)))


def verify_tdesign(d: Design, t: int, max_counters: int = DEFAULT_MAX_COUNTERS,
                   samples: int = DEFAULT_MC_SAMPLES, seed: int = 0) -> TDesignResult:
    """Exhaustive t-subset counting, or a seeded Monte-Carlo check above the counter cap."""
    if d.k is None:
        raise DesignError("blocks have different sizes")
    if not 1 <= t < d.k:
        raise DesignError("need 1 <= t < k")
    if comb(d.v, t) <= max_counters:
        counts = kernels.tsubset_counts(d.blocks, d.v, t)
        bad = np.nonzero(counts != counts[0])[0]
        if len(bad) == 0:
            lam = int(counts[0])
            if d.b * comb(d.k, t) != lam * comb(d.v, t):
                raise AssertionError("admissibility identity violated")
            return TDesignResult(t, lam)
        i = int(bad[0])
        witness = [{"points": colex_unrank(0, t), "count": int(counts[0])},
                   {"points": colex_unrank(i, t), "count": int(counts[i])}]
        return TDesignResult(t, None, witness=witness)
    return _verify_monte_carlo(d, t, samples, seed)


def _verify_monte_carlo(d: Design, t: int, samples: int, seed: int) -> TDesignResult:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    subsets = np.sort(np.array([rng.choice(d.v, t, replace=False) for _ in range(samples)]), axis=1)
    masks = np.array([mask_of(s, d.v) for s in subsets], dtype=np.uint64)
    counts = kernels.count_supersets(d.blocks, masks)
    expected = d.b * comb(d.k, t)
    if expected % comb(d.v, t) == 0:
        lam = expected // comb(d.v, t)
        bad = np.nonzero(counts != lam)[0]
    else:
        lam, bad = None, np.array([0])
    if len(bad) == 0:
        return TDesignResult(t, int(lam), mode="monte-carlo", samples=samples, seed=seed)
    i = int(bad[0])
    witness = [{"points": subsets[i].tolist(), "count": int(counts[i]), "expected": lam}]
    return TDesignResult(t, None, mode="monte-carlo", witness=witness, samples=samples, seed=seed)


def naive_tdesign_counts(d: Design, t: int) -> np.ndarray:
    """Independent oracle: per t-subset scan with Python integers, colex-indexed."""
    blocks = d.block_ints()
    out = np.zeros(comb(d.v, t), dtype=np.int64)
    for sub in itertools.combinations(range(d.v), t):
        mask = 0
        for x in sub:
            mask |= 1 << x
        out[colex_rank(sub)] = sum(1 for B in blocks if B & mask == mask)
    return out


def design_params(d: Design, t: int, **kw) -> DesignParams | None:
    r = verify_tdesign(d, t, **kw)
    if not r.ok:
        return None
    return DesignParams(t, d.v, d.k, r.lam, d.b)


def intersection_numbers(d: Design) -> tuple[dict, bool]:
    """Histogram of ``|B_i & B_j|`` over unordered pairs, and the quasi-symmetric flag."""
    if d.b < 2:
        raise DesignError("need at least two blocks")
    if d.b > MAX_PAIRWISE_BLOCKS:
        raise BudgetError(f"{d.b} blocks exceed the pairwise-intersection budget")
    prof = kernels.intersection_profile(d.blocks, int(d.sizes.max()))
    total = prof.sum(axis=0) // 2
    hist = {int(s): int(n) for s, n in enumerate(total) if n}
    return hist, len(hist) == 2


# -- predictions -----------------------------------------------------------------

def predict_params(f: Poly, mu: int, t: int | None = None, extended: bool = False) -> DesignParams:
    """Parameters the closed forms predict for ``D(f, k)``.

    * d-monomial, t = 2: ``2-(q, k, k(k-1)/mu)`` with ``k = |J_e|``, ``b = q(q-1)/mu``.
    * o-monomial, t = 3: ``3-(q, q/2, q(q-4)/(8 mu))``.
    * o-polynomial, t = 2: ``2-(q, q/2, q(q-2)/(4 mu))`` with ``b = q(q-1)/mu``.
    * extended o-polynomial, t = 3: ``3-(q, q/2, (q-4)(q-1)q/(8 mu))`` with ``b = q(q-1)^2/mu``.
    """
    F = f.field
    q = F.q
    e = f.monomial_exponent if f.has_terms else None
    opoly = F.p == 2 and is_opolynomial(f)
    if extended:
        if not opoly:
            raise DesignError("extended prediction needs an o-polynomial")
        if t not in (None, 3):
            raise DesignError("extended prediction is for t = 3")
        return _checked(DesignParams(3, q, q // 2, (q - 4) * (q - 1) * q // (8 * mu), q * (q - 1) ** 2 // mu))
    if opoly and e is not None and t in (None, 3):
        return _checked(DesignParams(3, q, q // 2, q * (q - 4) // (8 * mu), q * (q - 1) // mu))
    if e is not None:
        ok, k = is_dpolynomial(f)
        if not ok:
            raise DesignError("not a d-monomial")
        return _checked(DesignParams(2, q, k, k * (k - 1) // mu, q * (q - 1) // mu))
    if opoly:
        return _checked(DesignParams(2, q, q // 2, q * (q - 2) // (4 * mu), q * (q - 1) // mu))
    raise DesignError("polynomial is not classified (d-monomial, o-monomial or o-polynomial)")


def _checked(p: DesignParams) -> DesignParams:
    if not p.admissible():
        raise DesignError(f"predicted parameters {p} are not admissible")
    return p


# -- incidence counts ------------------------------------------------------------

INCIDENCE_MODES = ("I", "I_a", "I2")


def incidence_counts(f: Poly, tuples, mode: str, a: int = 1) -> np.ndarray:
    """Count parameter tuples whose value set contains each point tuple.

    ``I``: ``(a, b, c)`` with ``ab != 0`` and value set of ``a f + b x + c``;
    ``I_a``: ``(b, c)`` with ``b != 0`` for the fixed ``a``;
    ``I2``: two points, ``(b, c)`` with ``b != 0`` and ``a = 1``.
    """
    F = f.field
    tuples = [tuple(int(x) for x in tp) for tp in tuples]
    need = {"I": 3, "I_a": 3, "I2": 2}.get(mode)
    if need is None:
        raise DesignError(f"unknown mode {mode!r}")
    for tp in tuples:
        if len(tp) != need or len(set(tp)) != need:
            raise DesignError(f"mode {mode} needs {need} pairwise distinct points")
    if not is_opolynomial(f):
        raise DesignError("incidence counts need an o-polynomial")
    if mode == "I_a":
        if not f.has_terms or f.monomial_exponent is None:
            raise DesignError("mode I_a needs an o-monomial")
        if a == 0:
            raise DesignError("mode I_a needs a != 0")
        bits, *_ = all_blocks(f, a=a, nonzero_slopes=True)
    elif mode == "I":
        bits, *_ = all_blocks(f, extended=True, nonzero_slopes=True)
    else:
        bits, *_ = all_blocks(f, nonzero_slopes=True)
    masks = np.array([mask_of(tp, F.q) for tp in tuples], dtype=np.uint64).reshape(len(tuples), nwords(F.q))
    return kernels.count_supersets(bits, masks)


def count_incidences(f: Poly, points, mode: str, a: int = 1) -> int:
    return int(incidence_counts(f, [points], mode, a)[0])
