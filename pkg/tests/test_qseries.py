import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fraylab.qseries import (
    Laurent,
    RationalSeriesExpr,
    TriSeries,
    Window,
    expand_rational,
    f_factor,
    quantum_binomial,
    quantum_factorial,
    quantum_int,
    theorem1_check,
    unknot_table,
)
from fraylab.symfun import Composition


def test_quantum_int_examples():
    assert quantum_int(1) == Laurent.one()
    assert quantum_int(2) == Laurent({1: 1, -1: 1})
    assert quantum_int(0).is_zero()
    assert quantum_int(-3) == -quantum_int(3)
    assert (quantum_int(3) * quantum_int(2) - quantum_int(4) - quantum_int(2)).is_zero()


@pytest.mark.parametrize("j", range(1, 13))
def test_quantum_int_bar_invariant(j):
    assert quantum_int(j).bar() == quantum_int(j)


def test_quantum_binomial_examples():
    assert quantum_binomial(2, 1) == quantum_int(2)
    assert quantum_binomial(4, 2) == Laurent({4: 1, 2: 1, 0: 2, -2: 1, -4: 1})
    with pytest.raises(ValueError):
        quantum_binomial(2, 3)


@pytest.mark.parametrize("j", range(0, 11))
def test_quantum_binomial_positive_and_symmetric(j):
    for k in range(j + 1):
        b = quantum_binomial(j, k)
        assert b == quantum_binomial(j, j - k)
        assert all(c > 0 and c.denominator == 1 for c in b.c.values())
        assert b.bar() == b


def test_f_factor():
    assert f_factor(3, Composition.of(3)) == Laurent.one()
    assert f_factor(2, Composition.of(1, 1)) == quantum_int(2)
    assert f_factor(3, Composition.of(1, 1, 1)) == quantum_factorial(3)
    assert f_factor(3, Composition.of(2, 1)) == quantum_int(3)
    for n in range(1, 7):
        assert f_factor(n, Composition.thin(n)) == quantum_factorial(n)
    with pytest.raises(ValueError):
        f_factor(3, Composition.of(2, 2))


# -- expansion -----------------------------------------------------------------

def test_expand_geometric():
    w = Window((0, 0), (0, 6), (0, 0))
    s = expand_rational(RationalSeriesExpr([], [(0, 2, 0)]), w)
    assert s.coeffs == {(0, 0, 0): 1, (0, 2, 0): 1, (0, 4, 0): 1, (0, 6, 0): 1}


def test_expand_cancellation():
    w = Window((0, 1), (-8, 8), (0, 4))
    expr = RationalSeriesExpr(
        [{(0, 0, 0): Fraction(1), (0, -2, 2): Fraction(-1)}], [(0, -2, 2)]
    )
    assert expr.expand(w).coeffs == {(0, 0, 0): Fraction(1)}


def test_expand_product_factor():
    # (1 + a q^{-2})/(1 - q^2) termwise
    w = Window((0, 1), (-4, 8), (0, 0))
    expr = RationalSeriesExpr(
        [{(0, 0, 0): Fraction(1), (1, -2, 0): Fraction(1)}], [(0, 2, 0)]
    )
    s = expr.expand(w)
    for m in range(0, 5):
        assert s.coeffs[(0, 2 * m, 0)] == 1
    for m in range(0, 6):
        assert s.coeffs[(1, 2 * m - 2, 0)] == 1


def test_expand_respects_products_randomized():
    rng = random.Random(0)
    w = Window((0, 2), (-6, 10), (0, 4))
    inner = Window((0, 2), (-2, 6), (0, 2))  # stay away from the boundary
    monos = [(0, 2, 0), (0, -2, 2), (1, -2, 0), (0, -1, 1)]
    for _ in range(20):
        numA = {rng.choice(monos): Fraction(rng.randint(1, 3))}
        numA[(0, 0, 0)] = Fraction(1)
        numB = {rng.choice(monos): Fraction(rng.randint(-3, 3))}
        numB[(0, 0, 0)] = Fraction(1)
        denA = [(0, 2, 0)] if rng.random() < 0.5 else [(0, -2, 2)]
        A = RationalSeriesExpr([numA], denA)
        B = RationalSeriesExpr([numB], [])
        prod = (A * B).expand(w)
        sep = A.expand(w) * B.expand(w)
        assert prod.equal_on(sep, inner)


# -- tables ---------------------------------------------------------------------

def test_unknot_table_intrinsic_k1():
    w = Window((0, 1), (-4, 8), (0, 0))
    s = unknot_table("intrinsic", 1).expand(w)
    # (1+aq^{-2})(1+q^2+q^4+...)
    assert s.coeffs[(0, 0, 0)] == 1
    assert s.coeffs[(1, -2, 0)] == 1
    assert s.coeffs[(1, 6, 0)] == 1


def test_unknot_table_def_finite_k2_leading():
    w = Window((0, 2), (-6, 8), (0, 0))
    s = unknot_table("def_finite", 2).expand(w)
    assert s.coeffs[(0, -1, 0)] == 1  # [2]! lowest term q^{-1}


def test_infinite_k1_equals_intrinsic_k1():
    w = Window((0, 1), (-4, 10), (0, 6))
    assert unknot_table("infinite", 1).expand(w).equal_on(
        unknot_table("intrinsic", 1).expand(w)
    )


def test_unknown_variant_rejected():
    with pytest.raises(ValueError):
        unknot_table("bogus", 1)


def test_theorem1_factor_identities():
    rep = theorem1_check([1, 2, 3], Window((0, 3), (-8, 14), (0, 8)))
    assert rep["ok"], rep


def test_monomial_quotient_detects_shift():
    w = Window((0, 0), (-6, 6), (0, 0))
    base = RationalSeriesExpr([], [(0, 2, 0)]).expand(w)
    shifted = base.shift((0, 2, 0))
    assert shifted.monomial_quotient(base) == 2


def test_triseries_json_sorted():
    w = Window((0, 1), (-2, 2), (0, 0))
    s = TriSeries(w, {(1, 0, 0): Fraction(2), (0, -2, 0): Fraction(1)})
    data = s.to_json()
    assert data["terms"][0]["a"] == 0
    assert data["terms"][-1]["coeff"] == "2"
