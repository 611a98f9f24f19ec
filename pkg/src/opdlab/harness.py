"""Per-instance checks of the open conjectures, under an explicit work budget."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

from .design import BudgetError, build_design, verify_tdesign, value_spectrum
from .gf import field_new
from .groups import stabilizer, subset_j, verify_tdesign_invariant
from .poly import Poly, PolyError, catalog, is_opolynomial

CONJECTURES = ("C-blockcount", "C-stabilizer", "C-x10", "C-extended")
DEFAULT_BUDGET = 1 << 36  # elementary operations
MAX_BLOCK_BYTES = 1 << 30

BLOCKCOUNT_FAMILIES = ("segre", "glynn1", "glynn2", "cherowitzo", "payne", "subiaco1")
EXTENDED_FAMILIES = ("cherowitzo", "payne", "subiaco1")


@dataclass
class ConjectureCase:
    id: str
    m: int
    family: str
    verdict: str  # holds | fails | skipped
    detail: dict = dc_field(default_factory=dict)
    witness: dict | None = None

    def as_dict(self) -> dict:
        d = {"id": self.id, "m": self.m, "family": self.family, "verdict": self.verdict, "detail": self.detail}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


def build_cost(q: int, extended: bool) -> tuple[int, int]:
    """Operations and bytes to materialize every block of the construction."""
    rows = q * q if extended else q
    nblocks = rows * q
    return nblocks * q, nblocks * ((q + 63) // 64) * 8


def require(ops: int, nbytes: int, budget: int, what: str):
    if ops > budget:
        raise BudgetError(f"{what}: about {ops:.3g} operations exceed the budget of {budget:.3g}")
    if nbytes > MAX_BLOCK_BYTES:
        raise BudgetError(f"{what}: about {nbytes / 2**20:.0f} MiB of blocks exceed the memory cap")


def x10_sizes(m: int) -> int:
    """``k_m`` from its recurrence, ``k_1 = 2``."""
    if m < 1 or m % 2 == 0:
        raise ValueError("k_m is defined for odd m")
    k = 2
    for j in range(3, m + 1, 2):
        k = (3**j + 1) // 2 + 3 ** (j - 1) - 3 * k
    return k


def _is_translation_like(f: Poly) -> bool:
    """``f = (a x)^(2^h)``: a single term with a power-of-two exponent."""
    t = f.terms
    return len(t) == 1 and t[0][0] > 0 and t[0][0] & (t[0][0] - 1) == 0


def _skipped(cid, m, family, err) -> ConjectureCase:
    return ConjectureCase(cid, m, family, "skipped", {"reason": str(err)})


def _blockcount(m: int, budget: int) -> list[ConjectureCase]:
    F = field_new(2, m)
    q = F.q
    out = []
    for name in BLOCKCOUNT_FAMILIES:
        try:
            f = catalog(name, F)
        except PolyError:
            continue
        if _is_translation_like(f):
            continue
        try:
            require(*build_cost(q, False), budget, f"{name} at m={m}")
        except BudgetError as e:
            out.append(_skipped("C-blockcount", m, name, e))
            continue
        b = build_design(f, q // 2).b
        detail = {"b": b, "expected": q * (q - 1)}
        if b == q * (q - 1):
            out.append(ConjectureCase("C-blockcount", m, name, "holds", detail))
        else:
            out.append(ConjectureCase("C-blockcount", m, name, "fails", detail, {"f": f.describe(), "b": b}))
    return out


def _stabilizer(m: int, budget: int) -> list[ConjectureCase]:
    F = field_new(2, m)
    q = F.q
    out = []
    n = q - 1
    try:
        require(n * q * q + n * n * q, 0, budget, f"stabilizer scan at m={m}")
    except BudgetError as e:
        return [_skipped("C-stabilizer", m, "all", e)]
    for e in range(3, q - 1):
        if e & (e - 1) == 0 or math.gcd(e * (e - 1), n) != 1:
            continue
        if not is_opolynomial(Poly.monomial(F, e)):
            continue
        mu, maps = stabilizer(subset_j(e, F), F)
        fam = f"x^{e}"
        if mu == 1:
            out.append(ConjectureCase("C-stabilizer", m, fam, "holds", {"mu": 1}))
        else:
            out.append(ConjectureCase("C-stabilizer", m, fam, "fails", {"mu": mu},
                                      {"maps": [s.as_list() for s in maps if s.as_list() != [1, 0]][:8]}))
    return out


def _x10(m: int, budget: int) -> list[ConjectureCase]:
    if m < 3 or m % 2 == 0:
        raise ValueError("C-x10 concerns odd m >= 3")
    F = field_new(3, m)
    q = F.q
    try:
        require(*build_cost(q, False), budget, f"x^10 at m={m}")
    except BudgetError as e:
        return [_skipped("C-x10", m, "x^10", e)]
    f = Poly.monomial(F, 10)
    km = x10_sizes(m)
    half = (q + 1) // 2
    hist = value_spectrum(f).histogram
    expected = {half: q, km: q * (q - 1)}
    detail = {"k_m": km, "spectrum": {str(k): v for k, v in sorted(hist.items())}}
    if hist != expected:
        return [ConjectureCase("C-x10", m, "x^10", "fails", detail,
                               {"spectrum": detail["spectrum"], "expected": {str(k): v for k, v in expected.items()}})]
    for k, lam, b in ((half, (q + 1) // 4, q), (km, km * (km - 1) // 2, q * (q - 1) // 2)):
        incr = b * math.comb(k, 2)
        if incr > budget:
            return [_skipped("C-x10", m, "x^10", f"verifying k={k} needs {incr:.3g} increments")]
        d = build_design(f, k)
        r = verify_tdesign(d, 2)
        detail[f"k={k}"] = {"b": d.b, "lambda": r.lam}
        if d.b != b or r.lam != lam:
            wit = {"k": k, "b": d.b, "expected_b": b, "expected_lambda": lam}
            if r.witness:
                wit["subsets"] = r.witness
            else:
                wit["lambda"] = r.lam
            return [ConjectureCase("C-x10", m, "x^10", "fails", detail, wit)]
    return [ConjectureCase("C-x10", m, "x^10", "holds", detail)]


def _extended(m: int, budget: int, verify: bool = True) -> list[ConjectureCase]:
    if m < 5 or m % 2 == 0:
        raise ValueError("C-extended concerns odd m >= 5")
    F = field_new(2, m)
    q = F.q
    out = []
    for name in EXTENDED_FAMILIES:
        try:
            require(*build_cost(q, True), budget, f"extended {name} at m={m}")
        except BudgetError as e:
            out.append(_skipped("C-extended", m, name, e))
            continue
        f = catalog(name, F)
        d = build_design(f, q // 2, extended=True)
        detail = {"b": d.b, "expected": q * (q - 1) ** 2}
        if d.b != q * (q - 1) ** 2:
            out.append(ConjectureCase("C-extended", m, name, "fails", detail, {"f": f.describe(), "b": d.b}))
            continue
        if verify:
            r = verify_tdesign_invariant(d, 3)
            detail["t3"] = r.as_dict()
            if not r.ok:
                out.append(ConjectureCase("C-extended", m, name, "fails", detail, {"subsets": r.witness}))
                continue
        out.append(ConjectureCase("C-extended", m, name, "holds", detail))
    return out


_RUNNERS = {"C-blockcount": _blockcount, "C-stabilizer": _stabilizer, "C-x10": _x10, "C-extended": _extended}


def run_conjecture(cid: str, m_values, budget: int = DEFAULT_BUDGET) -> list[ConjectureCase]:
    if cid not in _RUNNERS:
        raise ValueError(f"unknown conjecture {cid!r}; choose from {', '.join(CONJECTURES)}")
    out = []
    for m in m_values:
        out.extend(_RUNNERS[cid](int(m), budget))
    return out


def parse_m_values(text: str) -> list[int]:
    """``5``, ``3,5,7`` or ``3-7`` (odd and even values alike)."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = (int(x) for x in part.split("-", 1))
            out.extend(range(lo, hi + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise ValueError("empty m range")
    return out


__all__ = ["CONJECTURES", "ConjectureCase", "run_conjecture", "parse_m_values", "x10_sizes",
           "build_cost", "require", "DEFAULT_BUDGET"]
