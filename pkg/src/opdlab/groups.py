"""Affine and semilinear actions on GF(q), stabilizers, isomorphism tests,
difference sets and Walsh spectra."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from .design import (
    MAX_PAIRWISE_BLOCKS,
    BudgetError,
    Design,
    DesignError,
    TDesignResult,
    canonical_rows,
    mask_of,
    nwords,
)
from .gf import Field
from .poly import Poly, is_opolynomial

GROUPS = ("AG1", "GammaA1")


class GroupError(ValueError):
    pass


# -- maps ------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineMap:
    """``x -> u x + v``."""

    u: int
    v: int

    def apply(self, F: Field, x):
        return F.add(F.mul(self.u, x), self.v)

    def compose(self, other: "AffineMap", F: Field) -> "AffineMap":
        """``self o other``."""
        return AffineMap(F.mul(self.u, other.u), F.add(F.mul(self.u, other.v), self.v))

    def inverse(self, F: Field) -> "AffineMap":
        ui = F.inv(self.u)
        return AffineMap(ui, F.neg(F.mul(ui, self.v)))

    def as_list(self) -> list:
        return [self.u, self.v]


@dataclass(frozen=True)
class SemilinearMap:
    """``x -> u x^(p^i) + v``."""

    u: int
    v: int
    i: int = 0

    def apply(self, F: Field, x):
        return F.add(F.mul(self.u, F.frobenius(x, self.i)), self.v)

    def compose(self, other: "SemilinearMap", F: Field) -> "SemilinearMap":
        u = F.mul(self.u, F.frobenius(other.u, self.i))
        v = F.add(F.mul(self.u, F.frobenius(other.v, self.i)), self.v)
        return SemilinearMap(u, v, (self.i + other.i) % F.m)

    def inverse(self, F: Field) -> "SemilinearMap":
        j = (-self.i) % F.m
        ui = F.frobenius(F.inv(self.u), j)
        return SemilinearMap(ui, F.neg(F.mul(ui, F.frobenius(self.v, j))), j)

    def as_list(self) -> list:
        return [self.u, self.v, self.i]


def group_elements(F: Field, group: str = "AG1"):
    if group not in GROUPS:
        raise GroupError(f"unknown group {group!r}")
    frob = range(F.m) if group == "GammaA1" else (0,)
    for i in frob:
        for u in range(1, F.q):
            for v in range(F.q):
                yield SemilinearMap(u, v, i) if group == "GammaA1" else AffineMap(u, v)


def group_generators(F: Field, group: str = "AG1") -> list:
    g = F.generator
    gens = [SemilinearMap(g, 0, 0), SemilinearMap(1, 1, 0)]
    if group == "GammaA1" and F.m > 1:
        gens.append(SemilinearMap(1, 0, 1))
    return gens


def group_order(F: Field, group: str = "AG1") -> int:
    return F.q * (F.q - 1) * (F.m if group == "GammaA1" else 1)


def is_subgroup(elements, F: Field) -> bool:
    """Closure under composition and inverses, checked exhaustively."""
    s = set(elements)
    if not s:
        return False
    return all(a.inverse(F) in s for a in s) and all(a.compose(b, F) in s for a in s for b in s)


# -- subsets and stabilizers -----------------------------------------------------

def subset_j(e: int, F: Field) -> np.ndarray:
    """Boolean mask of ``J_e = {y^e + y}``."""
    mask = np.zeros(F.q, dtype=bool)
    mask[F.add(F.pow(F.elements, e), F.elements)] = True
    return mask


def as_mask(J, q: int) -> np.ndarray:
    J = np.asarray(J)
    if J.dtype == bool:
        if J.shape != (q,):
            raise GroupError("mask length must equal q")
        return J
    mask = np.zeros(q, dtype=bool)
    mask[J.astype(np.int64)] = True
    return mask


def stabilizer(J, F: Field, group: str = "AG1") -> tuple[int, list]:
    """Every group element mapping ``J`` onto itself (exhaustive scan)."""
    mask = as_mask(J, F.q)
    members = np.nonzero(mask)[0]
    add = F.add_table
    out = []
    for i in range(F.m if group == "GammaA1" else 1):
        base = F.frobenius(members, i) if i else members
        for u in range(1, F.q):
            img = add[F.mul(u, base), :]  # row per member, column per v
            for v in np.nonzero(mask[img].all(axis=0))[0].tolist():
                out.append(SemilinearMap(u, v, i) if group == "GammaA1" else AffineMap(u, int(v)))
    return len(out), out


# -- actions on designs ----------------------------------------------------------

def point_permutation(sigma, F: Field) -> np.ndarray:
    return np.asarray(sigma.apply(F, F.elements), dtype=np.int64)


def permute_blocks(d: Design, perm: np.ndarray) -> np.ndarray:
    return canonical_rows(kernels.permute_points(d.blocks, perm))


@dataclass
class GroupCheck:
    holds: bool
    group: str
    checked: int
    exhaustive: bool
    witness: dict | None = None

    def __bool__(self):
        return self.holds

    def as_dict(self) -> dict:
        return asdict(self)


def group_fixes_blockset(group: str, d: Design, exhaustive: bool = False) -> GroupCheck:
    """Whether every element of AG1 / GammaA1 permutes the blocks of ``d``.

    Checking the generators suffices; ``exhaustive`` walks the whole group.
    """
    F = d.field
    if F is None or d.v != F.q:
        raise GroupError("design must live on GF(q)")
    maps = list(group_elements(F, group)) if exhaustive else group_generators(F, group)
    for n, sigma in enumerate(maps, 1):
        img = permute_blocks(d, point_permutation(sigma, F))
        if not np.array_equal(img, d.blocks):
            blocks = {bytes(r) for r in d.blocks}
            missing = next(i for i, r in enumerate(img) if bytes(r) not in blocks)
            witness = {"map": sigma.as_list(), "image_block": _members(img[missing], d.v)}
            return GroupCheck(False, group, n, exhaustive, witness)
    return GroupCheck(True, group, len(maps), exhaustive)


def _members(row, v: int) -> list[int]:
    return np.nonzero(kernels.unpack_rows(np.asarray(row, dtype=np.uint64)[None, :], v)[0])[0].tolist()


def verify_tdesign_invariant(d: Design, t: int) -> TDesignResult:
    """t-design check (t in {2, 3}) for an AG1-invariant block set.

    AG1 is sharply 2-transitive, so every pair maps to ``{0, 1}`` and every
    triple to some ``{0, 1, z}``; only those representatives need counting.
    """
    if t not in (2, 3):
        raise DesignError("orbit verification supports t = 2 and t = 3")
    if not group_fixes_blockset("AG1", d):
        raise DesignError("block set is not AG1-invariant")
    F = d.field
    reps = [(0, 1)] if t == 2 else [(0, 1, z) for z in range(2, F.q)]
    masks = np.array([mask_of(r, d.v) for r in reps], dtype=np.uint64).reshape(len(reps), nwords(d.v))
    counts = kernels.count_supersets(d.blocks, masks)
    bad = np.nonzero(counts != counts[0])[0]
    if len(bad):
        i = int(bad[0])
        witness = [{"points": list(reps[0]), "count": int(counts[0])},
                   {"points": list(reps[i]), "count": int(counts[i])}]
        return TDesignResult(t, None, mode="orbit-AG1", witness=witness)
    return TDesignResult(t, int(counts[0]), mode="orbit-AG1")


# -- polynomial equivalence ------------------------------------------------------

def affine_variant(f: Poly, g: Poly, offset: bool = True) -> dict | None:
    """Search ``g(x) = h f(u x + v) [+ c]`` over all ``h, u != 0`` and ``v, c``.

    The plain form is tried first; the offset form only if it fails.
    """
    F = f.field
    if g.field != F:
        raise GroupError("polynomials over different fields")
    x = F.elements
    gv = g.values
    for with_c in ((False, True) if offset else (False,)):
        for u in range(1, F.q):
            ux = F.mul(u, x)
            for v in range(F.q):
                fv = f.values[F.add(ux, v)]
                h = _solve_scale(F, fv, gv, with_c)
                if h is None:
                    continue
                c = F.sub(int(gv[0]), F.mul(h, int(fv[0]))) if with_c else 0
                if np.array_equal(F.add(F.mul(h, fv), c), gv):
                    return {"h": h, "u": u, "v": v, "c": c, "form": "h*f(u*x+v)+c" if with_c else "h*f(u*x+v)"}
    return None


def _solve_scale(F: Field, fv, gv, with_c: bool) -> int | None:
    if with_c:
        df = F.sub(fv, int(fv[0]))
        dg = F.sub(gv, int(gv[0]))
    else:
        df, dg = fv, gv
    nz = np.nonzero(df)[0]
    if len(nz) == 0:
        return None
    j = int(nz[0])
    h = F.div(int(dg[j]), int(df[j]))
    return h or None


# -- fingerprints and isomorphism ------------------------------------------------

@dataclass(frozen=True)
class Fingerprint:
    v: int
    k: int | None
    b: int
    lambdas: tuple
    intersections: tuple
    degrees: tuple
    profiles: tuple

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(asdict(self), sort_keys=True).encode()).hexdigest()

    def differences(self, other: "Fingerprint") -> list[str]:
        return [k for k in asdict(self) if getattr(self, k) != getattr(other, k)]


def _histogram(a) -> tuple:
    vals, counts = np.unique(np.asarray(a), return_counts=True)
    return tuple((int(x), int(n)) for x, n in zip(vals, counts))


def fingerprint(d: Design, tmax: int = 3) -> Fingerprint:
    """Isomorphism invariants: equal is necessary, different certifies non-isomorphism."""
    if d.b > MAX_PAIRWISE_BLOCKS:
        raise BudgetError(f"{d.b} blocks exceed the fingerprint budget")
    lambdas = []
    degrees = ()
    for t in range(1, tmax + 1):
        if d.k is not None and t >= d.k or math.comb(d.v, t) > 1 << 28:
            break
        counts = kernels.tsubset_counts(d.blocks, d.v, t)
        if t == 1:
            degrees = _histogram(counts)
        lambdas.append(_histogram(counts))
    kmax = int(d.sizes.max())
    prof = kernels.intersection_profile(d.blocks, kmax)
    inter = tuple((s, int(n)) for s, n in enumerate(prof.sum(axis=0) // 2) if n)
    rows, counts = np.unique(prof, axis=0, return_counts=True)
    profiles = tuple((tuple(int(x) for x in r), int(n)) for r, n in zip(rows, counts))
    return Fingerprint(d.v, d.k, d.b, tuple(lambdas), inter, degrees, profiles)


def find_isomorphism(d1: Design, d2: Design, group: str = "GammaA1") -> SemilinearMap | AffineMap | None:
    """A map in the group carrying the blocks of ``d1`` onto those of ``d2``."""
    F = d1.field
    if F is None or d2.field != F or d1.b != d2.b:
        return None
    targets = set(d2.block_ints())
    first = d1.block_sets()[0]
    for sigma in group_elements(F, group):
        perm = point_permutation(sigma, F)
        if sum(1 << int(perm[x]) for x in first) not in targets:
            continue
        if np.array_equal(permute_blocks(d1, perm), d2.blocks):
            return sigma
    return None


def compare_designs(d1: Design, d2: Design, group: str = "GammaA1") -> dict:
    """``isomorphic (certified)``, ``non-isomorphic`` or ``undetermined``."""
    f1, f2 = fingerprint(d1), fingerprint(d2)
    if f1 != f2:
        return {"verdict": "non-isomorphic", "differs_in": f1.differences(f2)}
    sigma = find_isomorphism(d1, d2, group)
    if sigma is not None:
        return {"verdict": "isomorphic (certified)", "map": sigma.as_list(), "group": group}
    return {"verdict": "undetermined", "fingerprint": f1.digest()}


# -- difference sets -------------------------------------------------------------

@dataclass(frozen=True)
class DiffSetParams:
    v: int
    k: int
    lam: int

    def as_tuple(self) -> tuple:
        return (self.v, self.k, self.lam)


def difference_counts(D, F: Field, group: str = "multiplicative") -> np.ndarray:
    """Representation counts of each non-identity group element as a quotient / difference."""
    mask = as_mask(D, F.q)
    members = np.nonzero(mask)[0]
    if group == "multiplicative":
        if mask[0]:
            raise GroupError("multiplicative difference sets cannot contain 0")
        n = F.q - 1
        logs = F.log_table[members]
        diff = (logs[:, None] - logs[None, :]) % n
        counts = np.bincount(diff.ravel(), minlength=n)
        return counts[1:]  # indexed by discrete log
    if group == "additive":
        diff = F.sub(members[:, None], members[None, :])
        counts = np.bincount(np.asarray(diff).ravel(), minlength=F.q)
        return counts[1:]
    raise GroupError(f"unknown group {group!r}")


def is_difference_set(D, F: Field, group: str = "multiplicative") -> DiffSetParams | None:
    counts = difference_counts(D, F, group)
    if len(counts) == 0 or np.any(counts != counts[0]):
        return None
    k = int(as_mask(D, F.q).sum())
    return DiffSetParams(len(counts) + 1, k, int(counts[0]))


def develop(D, F: Field, group: str = "multiplicative") -> Design:
    """The design of all translates ``gD``.

    Multiplicative developments live on GF(q)*, with point ``i`` standing for ``g^i``.
    """
    params = is_difference_set(D, F, group)
    if params is None:
        raise GroupError("not a difference set")
    members = np.nonzero(as_mask(D, F.q))[0]
    if group == "multiplicative":
        n = F.q - 1
        logs = F.log_table[members]
        pts = (logs[None, :] + np.arange(n)[:, None]) % n
        labels = F.exp_table[:n].tolist()
        v = n
    else:
        pts = F.add_table[members][:, :].T  # row g: D + g
        labels = None
        v = F.q
    inc = np.zeros((v, v), dtype=bool)
    inc[np.arange(v)[:, None], pts] = True
    bits = kernels.pack_rows(inc, nwords(v))
    src = {"difference_set": members.tolist(), "group": group}
    return Design(v, bits, field=F if group == "additive" else None, source=src, point_labels=labels)


# -- Walsh spectra ---------------------------------------------------------------

@dataclass
class WalshReport:
    e: int
    m: int
    ell: int
    spectrum: np.ndarray
    routes_agree: bool
    parseval: bool
    magnitudes_match: bool
    mismatches: list

    @property
    def ok(self) -> bool:
        return self.routes_agree and self.parseval and self.magnitudes_match

    def values(self) -> set[int]:
        return set(np.unique(self.spectrum).tolist())

    def as_dict(self) -> dict:
        return {"e": self.e, "m": self.m, "ell": self.ell,
                "values": sorted(self.values()), "routes_agree": self.routes_agree,
                "parseval": self.parseval, "magnitudes_match": self.magnitudes_match,
                "mismatches": self.mismatches,
                "spectrum": [[b, int(w)] for b, w in enumerate(self.spectrum)]}


def walsh_exponent(e: int, F: Field) -> int:
    """``(e - 1) / e`` modulo ``q - 1``."""
    n = F.q - 1
    return (e - 1) * F.exp_inverse(e) % n


def walsh_direct(h: np.ndarray, F: Field) -> np.ndarray:
    tr = F.trace_table[F.mul_table]  # tr[beta, x] = Tr(beta x)
    sign = 1 - 2 * ((h[None, :] + tr) & 1)
    return sign.sum(axis=1)


def walsh_fwht(h: np.ndarray, F: Field) -> np.ndarray:
    """Same transform through a fast Walsh-Hadamard pass.

    ``Tr(beta x)`` is the dot product of the bits of ``x`` with ``w(beta)``,
    where bit ``i`` of ``w(beta)`` is ``Tr(beta * 2^i)``.
    """
    W = kernels.fwht(1 - 2 * h.astype(np.int64))
    basis = 1 << np.arange(F.m)
    bits = F.trace_table[F.mul(F.elements[:, None], basis[None, :])]
    w = (bits << np.arange(F.m)[None, :]).sum(axis=1)
    return W[w]


def walsh_check(e: int, F: Field) -> WalshReport:
    if F.p != 2 or F.m % 2 == 0:
        raise GroupError("need q = 2^m with m odd")
    e = e % (F.q - 1) or F.q - 1
    if e.bit_count() != 2:
        raise GroupError("exponent must be a sum of two distinct powers of 2")
    if not is_opolynomial(Poly.monomial(F, e)):
        raise GroupError(f"x^{e} is not an o-monomial")
    ell = walsh_exponent(e, F)
    h = subset_j(e, F).astype(np.int64)
    spectrum = walsh_direct(h, F)
    agree = bool(np.array_equal(spectrum, walsh_fwht(h, F)))
    parseval = int((spectrum.astype(np.int64) ** 2).sum()) == F.q ** 2
    tr = F.trace_table[F.pow(F.elements, ell)]
    mag = 2 ** ((F.m + 1) // 2)
    expected_zero = tr == 0
    ok = np.where(expected_zero, spectrum == 0, np.abs(spectrum) == mag)
    mismatches = [[int(b), int(spectrum[b]), int(tr[b])] for b in np.nonzero(~ok)[0]]
    return WalshReport(e, F.m, ell, spectrum, agree, parseval, not mismatches, mismatches)
