"""Acceptance gate: one test per criterion, each timed against its limit.

``pytest tests/test_acceptance.py`` prints a PASS/FAIL line per criterion at
the end of the run.
"""

import itertools
import math
import time
from math import comb

import numpy as np
import pytest

from opdlab.design import (
    block,
    build_design,
    colex_rank,
    design_params,
    incidence_counts,
    intersection_numbers,
    naive_tdesign_counts,
    value_spectrum,
    verify_tdesign,
)
from opdlab.geometry import build_S, build_W, hyperoval_of
from opdlab.gf import is_irreducible
from opdlab.groups import (
    develop,
    is_difference_set,
    stabilizer,
    subset_j,
    walsh_check,
)
from opdlab.harness import x10_sizes
from opdlab.poly import Poly, catalog, dmonomial_exponents, is_dpolynomial, is_opolynomial

from fields import gf

criterion = pytest.mark.criterion


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


def mono(F, e):
    return Poly.monomial(F, e)


def assert_admissible(d, t, lam):
    assert d.b * comb(d.k, t) == lam * comb(d.v, t)


@criterion(1, "translation design 3-(32,16,7), b=62, intersections {0,8}")
def test_translation_design():
    with Timer() as tm:
        d = build_design(mono(gf(2, 5), 2), 16)
        p = design_params(d, 3)
        hist, qs = intersection_numbers(d)
    assert (p.t, p.v, p.k, p.lam, p.b) == (3, 32, 16, 7, 62)
    assert p.simple and qs and set(hist) == {0, 8}
    assert_admissible(d, 3, 7)
    assert tm.seconds < 1


@criterion(2, "Segre/Glynn 3-designs at m=5 and m=7")
def test_segre_glynn_designs():
    F = gf(2, 5)
    with Timer() as tm:
        for e in (6, 24):
            d = build_design(mono(F, e), 16)
            r = verify_tdesign(d, 3)
            assert r.ok and r.mode == "exhaustive" and (r.lam, d.b) == (112, 992)
            assert_admissible(d, 3, 112)
    assert tm.seconds < 5
    with Timer() as tm:
        d = build_design(mono(gf(2, 7), 6), 64)
        r = verify_tdesign(d, 3)
    assert r.ok and r.mode == "exhaustive" and (d.v, d.k, r.lam, d.b) == (128, 64, 1984, 16256)
    assert_admissible(d, 3, 1984)
    assert tm.seconds < 300


@criterion(3, "o-polynomial 2-(32,16,240) designs that are not 3-designs")
def test_opolynomial_2designs():
    F = gf(2, 5)
    with Timer() as tm:
        for name in ("cherowitzo", "payne", "subiaco1"):
            d = build_design(catalog(name, F), 16)
            r2 = verify_tdesign(d, 2)
            assert r2.ok and r2.lam == 240 and r2.mode == "exhaustive"
            assert_admissible(d, 2, 240)
            r3 = verify_tdesign(d, 3)
            assert not r3.ok
            a, b = r3.witness
            counts = naive_tdesign_counts(d, 3)
            assert a["count"] != b["count"]
            assert [counts[colex_rank(w["points"])] for w in r3.witness] == [a["count"], b["count"]]
    assert tm.seconds < 5


@criterion(4, "incidence counts I, I_a, I2 at q=32 over 100 random tuples")
def test_incidence_counts():
    F = gf(2, 5)
    rng = np.random.default_rng(2024)
    triples = [rng.choice(32, 3, replace=False) for _ in range(100)]
    pairs = [rng.choice(32, 2, replace=False) for _ in range(100)]
    for name in ("cherowitzo", "payne", "subiaco1", "segre"):
        f = catalog(name, F)
        assert set(incidence_counts(f, triples, "I").tolist()) == {3472}
        assert set(incidence_counts(f, pairs, "I2").tolist()) == {240}
    for e in (6, 24, 2):
        for a in (1, 7):
            assert set(incidence_counts(mono(F, e), triples, "I_a", a=a).tolist()) == {112}


@criterion(5, "stabilizers and the k(k-1)/mu cross-check")
def test_stabilizers():
    F = gf(2, 5)
    assert stabilizer(subset_j(2, F), F)[0] == 16
    assert stabilizer(subset_j(6, F), F)[0] == 1
    for m in (3, 5, 7):
        F = gf(2, m)
        exps = dmonomial_exponents(F)
        assert exps
        for e in exps:
            f = mono(F, e)
            J = block(f, 1, 0)
            mu, _ = stabilizer(J.members(), F)
            d = build_design(f, J.size)
            r = verify_tdesign(d, 2)
            assert r.ok and r.lam == J.size * (J.size - 1) // mu, (m, e)
            assert_admissible(d, 2, r.lam)


@criterion(6, "difference sets iff o-monomial at m=3,5")
def test_difference_sets():
    for m in (3, 5):
        F = gf(2, m)
        q = F.q
        target = (q - 1, (q - 2) // 2, (q - 4) // 4)
        misses = 0
        for e in range(2, q - 1):
            if math.gcd(e * (e - 1), q - 1) != 1:
                continue
            D = subset_j(e, F)
            D[0] = False
            params = is_difference_set(D, F)
            hit = params is not None and params.as_tuple() == target
            assert hit == is_opolynomial(mono(F, e)), (m, e)
            misses += not hit
        assert misses >= 1


@criterion(7, "Walsh spectra and Parseval")
def test_walsh_spectra():
    for m, e in ((5, 6), (5, 24), (7, 6)):
        F = gf(2, m)
        r = walsh_check(e, F)
        tr = F.trace_table[F.pow(F.elements, r.ell)]
        assert np.all((r.spectrum == 0) == (tr == 0))
        assert np.all(np.abs(r.spectrum[tr == 1]) == 2 ** ((m + 1) // 2))
        assert int((r.spectrum**2).sum()) == F.q**2
        assert r.ok and r.routes_agree


@criterion(8, "hyperoval designs W and S at q=16")
def test_hyperoval_designs():
    with Timer() as tm:
        H = hyperoval_of(mono(gf(2, 4), 2))
        W = build_W(H)
        pw = design_params(W, 2)
        S = build_S(H)
        ps = design_params(S, 2)
    assert (pw.v, pw.k, pw.lam) == (120, 8, 1) and pw.steiner
    assert (ps.v, ps.k, ps.lam) == (255, 127, 63) and ps.symmetric
    assert_admissible(W, 2, 1)
    assert_admissible(S, 2, 63)
    assert tm.seconds < 10


@criterion(9, "extended Cherowitzo design 3-(32,16,3472), b=30752")
def test_extended_construction():
    with Timer() as tm:
        d = build_design(catalog("cherowitzo", gf(2, 5)), 16, extended=True)
        r = verify_tdesign(d, 3)
    assert d.b == 30752 == 32 * 31**2
    assert r.ok and r.mode == "exhaustive" and r.lam == 3472
    assert_admissible(d, 3, 3472)
    assert tm.seconds < 120


@criterion(10, "odd characteristic: x^5 over GF(243), Paley, x^10 over GF(27)")
def test_odd_characteristic():
    F = gf(3, 5)
    assert is_dpolynomial(mono(F, 5)) == (True, 153)
    assert set(value_spectrum(mono(F, 5)).histogram) == {153, 243}

    F = gf(3, 3)
    squares = np.unique(F.mul(F.elements, F.elements))
    paley = develop(squares, F, "additive")
    p = design_params(paley, 2)
    assert (p.v, p.k, p.lam, p.b) == (27, 14, 7, 27) and p.symmetric
    assert paley.same_blocks(build_design(mono(F, 2), 14))

    f = mono(F, 10)
    k3 = x10_sizes(3)
    assert k3 == 17
    assert value_spectrum(f).histogram == {14: 27, k3: 702}
    for k, lam in ((14, 7), (k3, k3 * (k3 - 1) // 2)):
        d = build_design(f, k)
        r = verify_tdesign(d, 2)
        assert r.ok and r.lam == lam
        assert_admissible(d, 2, lam)


def _prime_powers(limit):
    out = []
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61):
        m = 1
        while p**m <= limit:
            out.append((p, m))
            m += 1
    return out


def _small_designs():
    for m in (2, 3, 4):
        F = gf(2, m)
        for e in range(1, F.q - 1):
            f = mono(F, e)
            for k in value_spectrum(f).histogram:
                if 2 < k < F.q:
                    yield build_design(f, k)
        if m >= 3:
            for name in ("trans:1",) + (("segre", "cherowitzo", "payne", "subiaco1") if m == 3 else ()):
                f = catalog(name, F)
                yield build_design(f, F.q // 2)
                yield build_design(f, F.q // 2, extended=True)
    for p, m in ((3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1)):
        F = gf(p, m)
        for e in range(2, F.q - 1):
            f = mono(F, e)
            for k in value_spectrum(f).histogram:
                if 2 < k < F.q:
                    yield build_design(f, k)


@criterion(11, "property suite: admissibility, naive oracle at q<=16, field axioms at q<=64")
def test_property_suite():
    checked = 0
    for d in _small_designs():
        for t in range(1, min(3, d.k - 1) + 1):
            counts = naive_tdesign_counts(d, t)
            r = verify_tdesign(d, t)
            assert r.ok == bool(np.all(counts == counts[0]))
            if r.ok:
                assert r.lam == counts[0]
                assert_admissible(d, t, r.lam)
            checked += 1
    assert checked > 100

    for p, m in _prime_powers(64):
        F = gf(p, m)
        assert is_irreducible(F.modulus, p)
        q = F.q
        A, M = F.add_table.astype(np.int64), F.mul_table.astype(np.int64)
        x = np.arange(q)
        assert np.array_equal(A, A.T) and np.array_equal(M, M.T)
        assert np.array_equal(A[0], x) and np.array_equal(M[1], x) and np.all(M[0] == 0)
        assert all(np.count_nonzero(A[a] == 0) == 1 for a in x)
        assert all(np.count_nonzero(M[a] == 1) == 1 for a in x[1:])
        assert np.array_equal(A[A[:, :, None], x[None, None, :]], A[x[:, None, None], A[None, :, :]])
        assert np.array_equal(M[M[:, :, None], x[None, None, :]], M[x[:, None, None], M[None, :, :]])
        assert np.array_equal(M[x[:, None, None], A[None, :, :]], A[M[:, :, None], M[:, None, :]])
        slow = [F.mul_slow(int(a), int(b)) for a, b in itertools.product(range(q), repeat=2)]
        assert np.array_equal(M.ravel(), np.array(slow))
