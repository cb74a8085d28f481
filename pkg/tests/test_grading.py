from hypothesis import given, strategies as st

from fraylab.grading import (
    MultiDegree,
    ShiftSpec,
    commutator_sign,
    deg,
    deg_add,
    parity,
    shift_sign,
)

small = st.integers(min_value=-6, max_value=6)
degrees = st.builds(MultiDegree, small, small, small)


def test_addition_examples():
    assert deg_add(deg(0, 0, 0), deg(1, -2, 2)) == deg(1, -2, 2)
    assert deg_add(deg(0, 2, 0), deg(0, -2, 1)) == deg(0, 0, 1)
    # deg(u_i) + deg(e_i): curvature terms land in t^2
    for i in range(1, 5):
        assert deg_add(deg(0, -2 * i, 2), deg(0, 2 * i, 0)) == deg(0, 0, 2)


def test_commutator_sign_examples():
    assert commutator_sign(deg(0, 0, 1), deg(0, 0, 1)) == -1
    assert commutator_sign(deg(0, 2, 0), deg(0, 0, 1)) == 1
    # the Hochschild factor participates
    assert commutator_sign(deg(1, 0, 0), deg(1, 0, 0)) == -1


@given(degrees, degrees, degrees)
def test_parity_is_bilinear(d1, d2, d3):
    assert parity(d1 + d2, d3) == parity(d1, d3) ^ parity(d2, d3)


@given(degrees, degrees)
def test_parity_symmetric(d1, d2):
    assert parity(d1, d2) == parity(d2, d1)


@given(degrees)
def test_self_commutator_sign(d):
    expected = -1 if (d.t + d.a) % 2 else 1
    assert commutator_sign(d, d) == expected


def test_shift_signs():
    assert shift_sign(deg(0, 1, 0)) == 1   # q-shifts leave differentials alone
    assert shift_sign(deg(0, 0, 1)) == -1  # t-shift negates
    assert shift_sign(deg(1, 0, 0)) == -1  # a-shift negates
    assert ShiftSpec(deg(0, 3, 1)).sign == -1


@given(degrees)
def test_double_shift_is_even(delta):
    assert shift_sign(delta) * shift_sign(delta) == 1


def test_json_triple():
    assert deg(1, -2, 3).to_json() == [1, -2, 3]
