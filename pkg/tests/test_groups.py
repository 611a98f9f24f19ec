import math

import numpy as np
import pytest

from opdlab.design import Design, block, build_design, design_params, value_spectrum, verify_tdesign
from opdlab.groups import (
    AffineMap,
    GroupError,
    SemilinearMap,
    affine_variant,
    compare_designs,
    develop,
    difference_counts,
    fingerprint,
    find_isomorphism,
    group_elements,
    group_fixes_blockset,
    group_order,
    is_difference_set,
    is_subgroup,
    stabilizer,
    subset_j,
    verify_tdesign_invariant,
    walsh_check,
    walsh_direct,
    walsh_exponent,
    walsh_fwht,
)
from opdlab.poly import Poly, catalog, dmonomial_exponents, is_opolynomial

from fields import gf


def mono(F, e):
    return Poly.monomial(F, e)


def nonzero_part(e, F):
    mask = subset_j(e, F)
    mask[0] = False
    return mask


# -- maps ------------------------------------------------------------------------

def test_group_orders(gf8):
    assert len(list(group_elements(gf8, "AG1"))) == group_order(gf8) == 56
    assert len(list(group_elements(gf8, "GammaA1"))) == group_order(gf8, "GammaA1") == 168


def test_maps_compose_and_invert(gf16):
    a, b = AffineMap(3, 7), AffineMap(9, 2)
    x = gf16.elements
    assert np.array_equal(a.compose(b, gf16).apply(gf16, x), a.apply(gf16, b.apply(gf16, x)))
    assert np.array_equal(a.inverse(gf16).apply(gf16, a.apply(gf16, x)), x)
    s, t = SemilinearMap(5, 1, 2), SemilinearMap(11, 4, 3)
    assert np.array_equal(s.compose(t, gf16).apply(gf16, x), s.apply(gf16, t.apply(gf16, x)))
    assert np.array_equal(s.inverse(gf16).apply(gf16, s.apply(gf16, x)), x)


# -- stabilizers -----------------------------------------------------------------

def test_stabilizer_examples(gf32):
    mu, maps = stabilizer(subset_j(2, gf32), gf32)
    assert mu == 16
    assert {m.u for m in maps} == {1}
    assert {m.v for m in maps} == set(np.nonzero(subset_j(2, gf32))[0].tolist())
    assert stabilizer(subset_j(6, gf32), gf32)[0] == 1
    assert stabilizer(np.ones(32, dtype=bool), gf32)[0] == 32 * 31


def test_stabilizer_is_subgroup():
    for F, e in [(gf(2, 5), 2), (gf(2, 4), 3), (gf(3, 3), 5), (gf(2, 6), 4)]:
        _, maps = stabilizer(subset_j(e, F), F)
        assert is_subgroup(maps, F)
        _, maps = stabilizer(subset_j(e, F), F, "GammaA1")
        assert is_subgroup(maps, F)


def test_stabilizer_matches_brute_force(gf16):
    J = set(np.nonzero(subset_j(7, gf16))[0].tolist())
    brute = [(u, v) for u in range(1, 16) for v in range(16)
             if {gf16.add(gf16.mul(u, y), v) for y in J} == J]
    _, maps = stabilizer(sorted(J), gf16)
    assert sorted((m.u, m.v) for m in maps) == brute


@pytest.mark.parametrize("m", [3, 5, 7])
def test_dmonomial_lambda_is_k_choose_over_mu(m):
    F = gf(2, m)
    for e in dmonomial_exponents(F):
        f = mono(F, e)
        J = block(f, 1, 0)
        mu, _ = stabilizer(J.members(), F)
        d = build_design(f, J.size)
        assert d.b == F.q * (F.q - 1) // mu
        assert verify_tdesign(d, 2).lam == J.size * (J.size - 1) // mu


@pytest.mark.parametrize("m", [3, 5, 7])
def test_omonomial_lambda3(m):
    F = gf(2, m)
    q = F.q
    found = 0
    for e in range(2, q - 1):
        f = mono(F, e)
        if not is_opolynomial(f):
            continue
        found += 1
        mu, _ = stabilizer(subset_j(e, F), F)
        d = build_design(f, q // 2)
        r = verify_tdesign(d, 3) if q <= 32 else verify_tdesign_invariant(d, 3)
        assert r.lam == q * (q - 4) // (8 * mu), e
    assert found


# -- invariance ------------------------------------------------------------------

@pytest.mark.parametrize("p,m,e", [(2, 3, 3), (2, 4, 7), (3, 2, 3), (2, 5, 6)])
def test_generators_agree_with_exhaustive(p, m, e):
    F = gf(p, m)
    f = mono(F, e)
    for k in value_spectrum(f).histogram:
        if 1 < k < F.q:
            d = build_design(f, k)
            for g in ("AG1", "GammaA1"):
                assert bool(group_fixes_blockset(g, d)) == bool(group_fixes_blockset(g, d, exhaustive=True))


def test_generators_agree_with_exhaustive_on_failures(gf8):
    d = build_design(catalog("cherowitzo", gf8), 4)
    for g in ("AG1", "GammaA1"):
        assert bool(group_fixes_blockset(g, d)) == bool(group_fixes_blockset(g, d, exhaustive=True))


def test_invariance_examples(gf32):
    for e in (5, 7, 11):
        f = mono(gf32, e)
        assert group_fixes_blockset("AG1", build_design(f, block(f, 1, 0).size))
    assert group_fixes_blockset("GammaA1", build_design(mono(gf32, 6), 16))
    chk = group_fixes_blockset("AG1", build_design(catalog("cherowitzo", gf32), 16))
    assert not chk and chk.witness["image_block"]


def test_orbit_verification_matches_exhaustive(gf32):
    for f in (mono(gf32, 6), mono(gf32, 2)):
        d = build_design(f, 16)
        for t in (2, 3):
            a, b = verify_tdesign(d, t), verify_tdesign_invariant(d, t)
            assert (a.ok, a.lam) == (b.ok, b.lam) and b.mode == "orbit-AG1"


# -- equivalence and isomorphism -------------------------------------------------

def test_affine_variant_examples(gf32):
    f = mono(gf32, 6)
    g = Poly(gf32, [(6, 1), (4, 1), (2, 1)])
    w = affine_variant(f, g)
    assert w is not None and w["form"] == "h*f(u*x+v)+c"
    assert (w["h"], w["u"], w["v"], w["c"]) == (1, 1, 1, 1)
    assert affine_variant(f, f) == {"h": 1, "u": 1, "v": 0, "c": 0, "form": "h*f(u*x+v)"}
    assert affine_variant(mono(gf32, 2), f) is None


def test_affine_variant_witness_gives_equal_blocks(gf32):
    f, g = mono(gf32, 6), Poly(gf32, [(6, 1), (4, 1), (2, 1)])
    assert build_design(f, 16).same_blocks(build_design(g, 16))


def test_fingerprint_examples(gf32):
    d2 = build_design(mono(gf32, 2), 16)
    d30 = build_design(mono(gf32, 30), 16)
    d16 = build_design(mono(gf32, 16), 16)
    assert fingerprint(d2) == fingerprint(d2)
    assert compare_designs(d2, d30)["verdict"] == "non-isomorphic"
    assert "lambdas" in fingerprint(d2).differences(fingerprint(d30))
    assert fingerprint(d2) == fingerprint(d16)
    assert compare_designs(d2, d16)["verdict"] == "isomorphic (certified)"


def test_found_isomorphism_maps_blocks(gf32):
    d1, d2 = build_design(mono(gf32, 6), 16), build_design(mono(gf32, 26), 16)
    res = compare_designs(d1, d2)
    if res["verdict"] == "isomorphic (certified)":
        sigma = find_isomorphism(d1, d2)
        perm = sigma.apply(gf32, gf32.elements)
        img = {frozenset(int(perm[x]) for x in s) for s in d1.block_sets()}
        assert img == {frozenset(s) for s in d2.block_sets()}
    else:
        assert res["verdict"] in ("non-isomorphic", "undetermined")


# -- difference sets -------------------------------------------------------------

def _naive_multiplicative(D, F):
    D = [int(x) for x in D]
    counts = {}
    for a in D:
        for b in D:
            if a != b:
                c = F.div(a, b)
                counts[c] = counts.get(c, 0) + 1
    return counts


def test_difference_set_examples(gf8, gf32):
    assert is_difference_set(nonzero_part(2, gf8), gf8).as_tuple() == (7, 3, 1)
    assert is_difference_set(nonzero_part(6, gf32), gf32).as_tuple() == (31, 15, 7)
    plus1 = np.nonzero(subset_j(2, gf32))[0] ^ 1
    assert is_difference_set(plus1, gf32).as_tuple() == (31, 16, 8)


def test_difference_counts_match_naive(gf32):
    D = np.nonzero(nonzero_part(7, gf32))[0]
    got = difference_counts(D, gf32)
    naive = _naive_multiplicative(D, gf32)
    for i, n in enumerate(got, 1):
        assert naive.get(int(gf32.exp_table[i]), 0) == n


def test_multiplicative_rejects_zero(gf8):
    with pytest.raises(GroupError):
        is_difference_set([0, 1, 2], gf8)


@pytest.mark.parametrize("m", [3, 5])
def test_maschietti_both_directions(m):
    F = gf(2, m)
    q = F.q
    target = (q - 1, (q - 2) // 2, (q - 4) // 4)
    failures = 0
    for e in range(2, q - 1):
        if math.gcd(e * (e - 1), q - 1) != 1:
            continue
        params = is_difference_set(nonzero_part(e, F), F)
        is_ds = params is not None and params.as_tuple() == target
        assert is_ds == is_opolynomial(mono(F, e)), e
        failures += not is_ds
    assert failures >= 1


def test_develop_fano(gf8):
    d = develop(nonzero_part(2, gf8), gf8)
    p = design_params(d, 2)
    assert (p.v, p.k, p.lam, p.b) == (7, 3, 1, 7) and p.symmetric and p.steiner


def test_develop_paley_matches_construction(gf27):
    sq = np.unique(gf27.mul(gf27.elements, gf27.elements))
    d = develop(sq, gf27, "additive")
    p = design_params(d, 2)
    assert (p.v, p.k, p.lam, p.b) == (27, 14, 7, 27) and p.symmetric
    assert d.same_blocks(build_design(mono(gf27, 2), 14))


def test_develop_rejects_non_difference_set(gf8):
    with pytest.raises(GroupError):
        develop([1, 2], gf8)


# -- Walsh -----------------------------------------------------------------------

def test_walsh_exponent(gf32):
    assert walsh_exponent(6, gf32) == 6
    e = 24
    assert walsh_exponent(e, gf32) * e % 31 == (e - 1) % 31


@pytest.mark.parametrize("m,e", [(5, 6), (5, 24), (7, 6), (3, 6), (5, 10), (7, 96)])
def test_walsh_zeros_follow_trace(m, e):
    F = gf(2, m)
    r = walsh_check(e, F)
    assert r.ok and r.routes_agree and r.parseval
    assert r.values() <= {0, 2 ** ((m + 1) // 2), -(2 ** ((m + 1) // 2))}
    assert r.spectrum[0] == 0


def test_walsh_routes_on_random_functions(gf32):
    rng = np.random.default_rng(1)
    for _ in range(5):
        h = rng.integers(0, 2, 32)
        assert np.array_equal(walsh_direct(h, gf32), walsh_fwht(h, gf32))


def test_walsh_errors():
    with pytest.raises(GroupError):
        walsh_check(6, gf(2, 4))
    with pytest.raises(GroupError):
        walsh_check(7, gf(2, 5))
    with pytest.raises(GroupError):
        walsh_check(6, gf(3, 3))
    with pytest.raises(GroupError):
        walsh_check(12, gf(2, 5))  # two bits but not an o-monomial


def test_walsh_report_serializes(gf32):
    d = walsh_check(6, gf32).as_dict()
    assert d["ell"] == 6 and len(d["spectrum"]) == 32


def test_design_from_develop_has_no_field_for_multiplicative(gf8):
    d = develop(nonzero_part(2, gf8), gf8)
    assert d.field is None and d.point_labels == gf8.exp_table[:7].tolist()
    assert isinstance(d, Design)
