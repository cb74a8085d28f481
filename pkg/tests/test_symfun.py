import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fraylab.symfun import (
    BOTTOM,
    Composition,
    Poly,
    a_family,
    a_identity_defect,
    a_thin_recursive,
    curvature_transport_defect,
    difference_symmetric,
    e_gen,
    e_in_p,
    elementary_of_total,
    esp,
    esp_sym,
    eval_at_point,
    expand_to_x,
    g_polys,
    h_in_e,
    p_gen,
    p_in_e,
    psi_change,
    psi_rho_roundtrip,
    rho_change,
    rho_psi_roundtrip,
    u_param,
    vanishing_locus_sampler,
    vdot_param,
    x_gen,
)


def x(i, primed=False):
    return Poly.gen(x_gen(i, BOTTOM if primed else 0))


# -- elementary_of_total ------------------------------------------------------

def test_elementary_of_total_constant_term():
    assert elementary_of_total(0, Composition.of(2, 1)) == Poly.one()


def test_elementary_of_total_thin_e1():
    b = Composition.of(1, 1, 1)
    assert expand_to_x(elementary_of_total(1, b), b) == x(1) + x(2) + x(3)


def test_elementary_of_total_21_e2():
    b = Composition.of(2, 1)
    got = expand_to_x(elementary_of_total(2, b), b)
    want = esp([x_gen(1), x_gen(2), x_gen(3)], 2)
    assert got == want


def test_elementary_of_total_out_of_range():
    with pytest.raises(ValueError):
        elementary_of_total(4, Composition.of(2, 1))


# -- expand_to_x ---------------------------------------------------------------

def test_expand_examples():
    b2 = Composition.of(2)
    assert expand_to_x(Poly.gen(e_gen(1, 1)), b2) == x(1) + x(2)
    assert expand_to_x(Poly.gen(e_gen(1, 2)), b2) == x(1) * x(2)
    b3 = Composition.of(3)
    got = expand_to_x(Poly.gen(e_gen(1, 2)), b3)
    assert got == x(1) * x(2) + x(1) * x(3) + x(2) * x(3)


@st.composite
def sym_polys(draw):
    b = Composition.of(2, 1)
    gens = [e_gen(1, 1), e_gen(1, 2), e_gen(2, 1), e_gen(1, 1, BOTTOM)]
    p = Poly.zero()
    for _ in range(draw(st.integers(1, 3))):
        c = draw(st.integers(-3, 3))
        g = draw(st.sampled_from(gens))
        e = draw(st.integers(1, 2))
        p = p + Fraction(c) * Poly.gen(g, e)
    return p


@given(sym_polys(), sym_polys())
def test_expand_is_ring_homomorphism(p, q):
    b = Composition.of(2, 1)
    assert expand_to_x(p * q, b) == expand_to_x(p, b) * expand_to_x(q, b)
    assert expand_to_x(p + q, b) == expand_to_x(p, b) + expand_to_x(q, b)


# -- newton conversion ---------------------------------------------------------

def test_newton_examples():
    assert p_in_e(1, 3) == Poly.gen(e_gen(1, 1))
    e1 = Poly.gen(e_gen(1, 1))
    e2 = Poly.gen(e_gen(1, 2))
    assert p_in_e(2, 3) == e1 * e1 - 2 * e2
    # e_2 = (p_1^2 - p_2)/2
    p1 = Poly.gen(p_gen(1))
    p2 = Poly.gen(p_gen(2))
    assert e_in_p(2) == Fraction(1, 2) * (p1 * p1 - p2)


@pytest.mark.parametrize("size", [2, 3, 4, 5, 6])
def test_newton_round_trip(size):
    for k in range(1, size + 1):
        table = {p_gen(i): p_in_e(i, size) for i in range(1, k + 1)}
        assert e_in_p(k).substitute(table) == Poly.gen(e_gen(1, k))


def test_p_in_e_matches_raw_expansion():
    b = Composition.of(3)
    got = expand_to_x(p_in_e(2, 3), b)
    want = x(1) ** 2 + x(2) ** 2 + x(3) ** 2
    assert got == want


# -- a families ----------------------------------------------------------------

def test_a_family_single_block_is_kronecker():
    b = Composition.of(4)
    fam = a_family(b)
    for i in range(1, 5):
        for k in range(1, 5):
            expected = Poly.one() if k == i else Poly.zero()
            assert fam[(i, 1, k)] == expected


def _all_compositions(n):
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in _all_compositions(n - first):
            yield (first,) + rest


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_a_family_identity_small(N):
    for parts in _all_compositions(N):
        b = Composition(parts)
        fam = a_family(b)
        for i in range(1, N + 1):
            assert a_identity_defect(fam, b, i).is_zero()


def test_thin_recursive_worked_example():
    fam = a_thin_recursive(3)
    assert fam[(1, 1)] == Poly.one()
    assert fam[(1, 2)] == Poly.one()
    assert fam[(1, 3)] == Poly.one()
    assert fam[(2, 1)] == x(2, True) + x(3, True)
    assert fam[(2, 2)] == x(1) + x(3, True)
    assert fam[(2, 3)] == x(1) + x(2)
    assert fam[(3, 1)] == x(2, True) * x(3, True)
    assert fam[(3, 2)] == x(1) * x(3, True)
    assert fam[(3, 3)] == x(1) * x(2)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_thin_recursive_identity(n):
    fam = a_thin_recursive(n)
    for i in range(1, n + 1):
        assert a_identity_defect(fam, Composition.thin(n), i, thin=True).is_zero()


# -- g polynomials ---------------------------------------------------------------

def test_g_polys_basics():
    for n in (1, 2, 3):
        gs = g_polys(n)
        assert gs[0] == Poly.one()
        assert len(gs) == n + 1
    gs2 = g_polys(2)
    xp3 = Poly.gen(e_gen(2, 1, BOTTOM))
    assert gs2[1] == Poly.gen(e_gen(1, 1)) - xp3


@pytest.mark.parametrize("n", [2, 3])
def test_g_congruence_on_vanishing_locus(n):
    b = Composition.of(n, 1)
    gs = g_polys(n)
    pts = vanishing_locus_sampler(b, 100, seed=11)
    xdiff = Poly.gen(e_gen(2, 1)) - Poly.gen(e_gen(2, 1, BOTTOM))
    for i in range(1, n + 2):
        expr = expand_to_x(
            xdiff * gs[i - 1] + (esp_sym(i, n) - esp_sym(i, n, 1, BOTTOM)), b
        )
        for pt in pts:
            assert eval_at_point(expr, pt, b) == 0


# -- psi/rho ----------------------------------------------------------------------

def test_psi_rho_base_case():
    assert psi_change(1, 1) == Poly.gen(u_param(1))
    assert rho_change(1, 1) == Poly.gen(vdot_param(1))


@pytest.mark.parametrize("a", [1, 2, 3, 4])
def test_psi_rho_mutually_inverse(a):
    comp = Composition.of(a)
    for d in psi_rho_roundtrip(a):
        assert expand_to_x(d, comp).is_zero()
    for d in rho_psi_roundtrip(a):
        assert expand_to_x(d, comp).is_zero()


@pytest.mark.parametrize("a", [1, 2, 3])
def test_curvature_transport(a):
    assert curvature_transport_defect(a).is_zero()


# -- difference alphabets -----------------------------------------------------------

def test_difference_symmetric_examples():
    assert difference_symmetric("h", 0, 3) == Poly.one()
    d1 = difference_symmetric("h", 1, 3)
    want = Poly.gen(e_gen(1, 1)) - Poly.gen(e_gen(1, 1, BOTTOM))
    assert d1 == want
    assert difference_symmetric("e", 1, 3) == want


def test_difference_generating_function_oracle():
    # E(X,t) = E(X-X',t) * E(X',t) up to degree 2, on raw variables
    b = Composition.of(2)
    for j in (1, 2):
        lhs = Poly.zero()
        for aa in range(j + 1):
            lhs = lhs + difference_symmetric("e", aa, 2) * esp_sym(j - aa, 2, 1, BOTTOM)
        assert expand_to_x(lhs - esp_sym(j, 2), Composition.of(2)).is_zero()


# -- sampler -------------------------------------------------------------------------

def test_sampler_permutation_invariance():
    b = Composition.of(2, 1)
    pts = vanishing_locus_sampler(b, 10, seed=3)
    e1 = elementary_of_total(1, b) - elementary_of_total(1, b, BOTTOM)
    e1x = expand_to_x(e1, b)
    for pt in pts:
        assert eval_at_point(e1x, pt, b) == 0


def test_sampler_blockwise_not_killed():
    # a blockwise difference need not vanish at a total-locus point
    b = Composition.of(2, 1)
    pts = vanishing_locus_sampler(b, 40, seed=5)
    blockwise = Poly.gen(e_gen(1, 1)) - Poly.gen(e_gen(1, 1, BOTTOM))
    expr = expand_to_x(blockwise, b)
    assert any(eval_at_point(expr, pt, b) != 0 for pt in pts)


def test_sampler_block_preserving():
    b = Composition.of(2, 1)
    pts = vanishing_locus_sampler(b, 10, seed=7, block_preserving=True)
    for j, size in enumerate(b.parts, start=1):
        for k in range(1, size + 1):
            diff = Poly.gen(e_gen(j, k)) - Poly.gen(e_gen(j, k, BOTTOM))
            expr = expand_to_x(diff, b)
            for pt in pts:
                assert eval_at_point(expr, pt, b) == 0


def test_poly_json_round_shape():
    p = Poly.gen(e_gen(1, 2)) * 3 - Poly.gen(e_gen(2, 1, BOTTOM))
    data = p.to_json()
    assert all(set(item) == {"monomial", "coeff"} for item in data)


def test_composition_refine_and_ell():
    b = Composition.of(3, 1)
    r = b.refine(0, Composition.of(1, 2))
    assert r.parts == (1, 2, 1)
    assert r.total == b.total
    assert Composition.of(3).ell() == 3
    assert Composition.of(1, 1, 1).ell() == 0
    with pytest.raises(ValueError):
        b.refine(0, Composition.of(1, 1))
    with pytest.raises(ValueError):
        Composition.of(0, 2)
