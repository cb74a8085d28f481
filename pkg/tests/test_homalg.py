import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fraylab.grading import MultiDegree, parity
from fraylab.homalg import (
    ChainMap,
    CurvedComplex,
    Entry,
    GradedRing,
    PM_ONE,
    PMono,
    ParamSpec,
    RC_Object,
    RingSpec,
    cone,
    gaussian_eliminate,
    homology_truncated,
    koszul_build,
    pm_degree,
    pm_from,
    pm_mul,
    sdr_lift,
    strict_deformation,
    transport_twist,
)
from fraylab.qseries import Window
from fraylab.symfun import Poly, x_gen


@pytest.fixture
def qx():
    return GradedRing(RingSpec("Qx", [(x_gen(1), 2)], []))


@pytest.fixture
def qxy():
    return GradedRing(RingSpec("Qxy", [(x_gen(1), 2), (x_gen(2), 2)], []))


def two_term(ring, entry: Poly) -> CurvedComplex:
    dq = entry.degree().q if not entry.is_zero() else 2
    objs = [
        RC_Object(MultiDegree(0, 0, 0), ring),
        RC_Object(MultiDegree(0, -dq, 1), ring),
    ]
    terms = {PM_ONE: {(1, 0): Entry.plain(entry)}} if not entry.is_zero() else {}
    cx = CurvedComplex(objs, ParamSpec.make([]), terms)
    cx.check_homogeneous()
    return cx


# -- parameter algebra ----------------------------------------------------------

def theta_spec():
    return ParamSpec.make([
        ("t1", MultiDegree(0, -2, 1), "odd"),
        ("t2", MultiDegree(0, -4, 1), "odd"),
        ("u", MultiDegree(0, -2, 2), "even"),
    ])


def test_exterior_relations():
    spec = theta_spec()
    th = pm_from(thetas=["t1"])
    thd = pm_from(duals=["t1"])
    # theta^2 = 0, dual^2 = 0
    assert pm_mul(spec, th, th) == []
    assert pm_mul(spec, thd, thd) == []
    # theta-dual theta + theta theta-dual = 1
    a = pm_mul(spec, thd, th)
    b = pm_mul(spec, th, thd)
    combined = {}
    for s, m in a + b:
        combined[m] = combined.get(m, 0) + s
    combined = {m: c for m, c in combined.items() if c}
    assert combined == {PM_ONE: 1}


def test_odd_anticommute_even_central():
    spec = theta_spec()
    t1 = pm_from(thetas=["t1"])
    t2 = pm_from(thetas=["t2"])
    assert pm_mul(spec, t1, t2) == [(1, pm_from(thetas=["t1", "t2"]))]
    assert pm_mul(spec, t2, t1) == [(-1, pm_from(thetas=["t1", "t2"]))]
    u = pm_from(evens={"u": 1})
    assert pm_mul(spec, u, t1) == [(1, PMono((("u", 1),), ("t1",), ()))]
    assert pm_mul(spec, t1, u) == [(1, PMono((("u", 1),), ("t1",), ()))]


def test_pm_degree():
    spec = theta_spec()
    m = PMono((("u", 2),), ("t1",), ("t2",))
    assert pm_degree(spec, m) == MultiDegree(0, -4 - 2 + 4, 2 * 2 + 1 - 1)


# -- middle interchange ------------------------------------------------------------

def test_middle_interchange_sign_law(qx):
    """(f (x) s) o (f' (x) s') = (-1)^{<deg f', deg s>} (f o f') (x) (s' s)
    on homogeneous multiplication monomials."""
    spec = theta_spec()
    objs = [
        RC_Object(MultiDegree(0, 0, 0), qx),
        RC_Object(MultiDegree(0, -2, 1), qx),
    ]
    cx = CurvedComplex(objs, spec)
    rng = random.Random(2)
    monos = [pm_from(thetas=["t1"]), pm_from(thetas=["t2"]),
             pm_from(evens={"u": 1}), PM_ONE]
    for _ in range(30):
        s = rng.choice(monos)
        r = rng.choice(monos)
        i, j = rng.choice([(0, 1), (1, 0), (0, 0), (1, 1)])
        jj, k = j, rng.choice([0, 1])
        f = {s: {(i, j): Entry.plain(Poly.one())}}
        g = {r: {(jj, k): Entry.plain(Poly.one())}}
        lhs = cx.compose_terms(f, g)
        # expected: sign * (f o f') (x) normal_order(s' s) with s' s = r o s
        fdeg = cx.objects[i].degree - cx.objects[jj].degree  # deg of f-entry part
        gdeg = cx.objects[jj].degree - cx.objects[k].degree
        sign = (-1) ** parity(gdeg, pm_degree(spec, s))
        expected = {}
        for ms, mono in pm_mul(spec, s, r):
            expected.setdefault(mono, {})[(i, k)] = ms * sign
        got = {
            mono: {ij: e.plain_part().constant_value() for ij, e in mat.items()}
            for mono, mat in lhs.items()
        }
        want = {
            mono: {ij: Fraction(v) for ij, v in mat.items()}
            for mono, mat in expected.items()
            if any(v for v in mat.values())
        }
        assert got == want, (s, r, i, j, k)


# -- koszul ---------------------------------------------------------------------

def test_koszul_regular_element(qx):
    th = ParamSpec.make([("th", MultiDegree(0, -2, 1), "odd")])
    K = koszul_build(qx, [Poly.gen(x_gen(1))], th)
    assert K.mc_check().ok
    H = homology_truncated(K, Window((0, 0), (-4, 8), (0, 2)))
    assert H.coeffs == {(0, -2, 1): Fraction(1)}


def test_koszul_regular_pair(qxy):
    th = ParamSpec.make([
        ("th1", MultiDegree(0, -2, 1), "odd"),
        ("th2", MultiDegree(0, -2, 1), "odd"),
    ])
    K = koszul_build(qxy, [Poly.gen(x_gen(1)), Poly.gen(x_gen(2))], th)
    H = homology_truncated(K, Window((0, 0), (-6, 6), (0, 3)))
    assert H.coeffs == {(0, -4, 2): Fraction(1)}


def test_koszul_zero_element_splits(qx):
    th = ParamSpec.make([("th", MultiDegree(0, -2, 1), "odd")])
    K = koszul_build(qx, [Poly.zero()], th)
    H = homology_truncated(K, Window((0, 0), (-4, 2), (0, 1)))
    assert H.coeffs[(0, 0, 0)] == 1 and H.coeffs[(0, -2, 1)] == 1


def test_koszul_degree_mismatch_rejected(qx):
    th = ParamSpec.make([("th", MultiDegree(0, -4, 1), "odd")])
    with pytest.raises(ValueError):
        koszul_build(qx, [Poly.gen(x_gen(1))], th)


# -- mc_check ----------------------------------------------------------------------

def test_mc_zero_connection(qx):
    cx = CurvedComplex([RC_Object(MultiDegree(0, 0, 0), qx)], ParamSpec.make([]))
    assert cx.mc_check().ok


def test_mc_reports_offender(qx):
    # a strict deformation with two non-commuting xi fails at a quadratic monomial
    ring0 = GradedRing(RingSpec("Q", [], []))
    objs = [RC_Object(MultiDegree(0, 0, 0), ring0),
            RC_Object(MultiDegree(0, 0, 1), ring0)]
    spec = ParamSpec.make([
        ("uA", MultiDegree(0, 0, 0), "even"),
        ("uB", MultiDegree(0, 0, 2), "even"),
    ])
    terms = {
        pm_from(evens={"uA": 1}): {(1, 0): Entry.plain(Poly.one())},
        pm_from(evens={"uB": 1}): {(0, 1): Entry.plain(Poly.one())},
    }
    cx = CurvedComplex(objs, spec, terms)
    rep = cx.mc_check()
    assert not rep.ok
    assert "uA" in rep.details and "uB" in rep.details


# -- cones and gaussian elimination ------------------------------------------------

def test_cone_identity_contracts(qx):
    one = CurvedComplex([RC_Object(MultiDegree(0, 0, 0), qx)], ParamSpec.make([]))
    idmap = ChainMap(one, one, {PM_ONE: {(0, 0): Entry.plain(Poly.one())}})
    cn = cone(idmap)
    assert homology_truncated(cn, Window((0, 0), (-4, 4), (-2, 2))).coeffs == {}
    red, sdr = gaussian_eliminate(cn, (1, 0))
    assert len(red.objects) == 0
    assert sdr.verify().ok


def test_gauss_rejects_non_unit(qx):
    cx = two_term(qx, Poly.gen(x_gen(1)))
    with pytest.raises(ValueError):
        gaussian_eliminate(cx, (1, 0))


def random_complex(rng, ring):
    from fraylab.cli import random_zero_curvature_complex

    return random_zero_curvature_complex(rng)


def test_gauss_preserves_homology_randomized(qx):
    rng = random.Random(7)
    window = Window((0, 0), (-8, 8), (-2, 4))
    done = 0
    while done < 12:
        cx = random_complex(rng, qx)
        units = [
            ij for ij, e in cx.terms.get(PM_ONE, {}).items()
            if e.plain_part().constant_value() not in (None, 0)
        ]
        if not units:
            continue
        before = homology_truncated(cx, window)
        red, sdr = gaussian_eliminate(cx, units[0])
        assert sdr.verify().ok
        after = homology_truncated(red, window)
        assert before.equal_on(after, window)
        done += 1


# -- strict deformations -------------------------------------------------------------

def test_strict_deformation_conditions(qx):
    base = two_term(qx, Poly.gen(x_gen(1)))
    u = ParamSpec.make([("u1", MultiDegree(0, -2, 2), "even")])
    xi = {PM_ONE: {(0, 1): Entry.plain(Poly.one())}}
    D = strict_deformation(base, [xi], [Poly.gen(x_gen(1))], u)
    assert D.mc_check().ok
    # wrong curvature is rejected
    with pytest.raises(ValueError):
        strict_deformation(base, [xi], [Poly.zero()], u)


def test_strict_deformation_koszul_case(qx):
    # odd parameters, phi = 0 recovers koszul_build
    base = CurvedComplex([RC_Object(MultiDegree(0, 0, 0), qx)], ParamSpec.make([]))
    th = ParamSpec.make([("th", MultiDegree(0, -2, 1), "odd")])
    xi = {PM_ONE: {(0, 0): Entry.plain(Poly.gen(x_gen(1)))}}
    D = strict_deformation(base, [xi], [Poly.zero()], th)
    K = koszul_build(qx, [Poly.gen(x_gen(1))], th)
    assert D.terms.keys() == K.terms.keys()
    for mono in D.terms:
        assert D.terms[mono].keys() == K.terms[mono].keys()


# -- transport ------------------------------------------------------------------------

def test_transport_identity_when_h_zero(qx):
    base = two_term(qx, Poly.gen(x_gen(1)))
    u = ParamSpec.make([("u1", MultiDegree(0, -2, 2), "even")])
    xi = {PM_ONE: {(0, 1): Entry.plain(Poly.one())}}
    D = strict_deformation(base, [xi], [Poly.gen(x_gen(1))], u)
    psi, psi_inv = transport_twist(D, {PM_ONE: {}}, "u1", 1, xi, xi)
    assert set(psi) == {PM_ONE}
    assert all(
        e.plain_part().constant_value() == 1 for e in psi[PM_ONE].values()
    )


def test_transport_square_zero_h(qx):
    base = two_term(qx, Poly.gen(x_gen(1)))
    u = ParamSpec.make([("u1", MultiDegree(0, -2, 2), "even")])
    xi = {PM_ONE: {(0, 1): Entry.plain(Poly.one())}}
    D = strict_deformation(base, [xi], [Poly.gen(x_gen(1))], u)
    h = {PM_ONE: {(0, 1): Entry.plain(Poly.one())}}
    psi, psi_inv = transport_twist(D, h, "u1", 2, xi, xi)
    # Psi = 1 + h u, inverse 1 - h u, product 1 exactly below the cap
    comp = D.compose_terms(psi, psi_inv)
    idm = {PM_ONE: {(0, 0): Entry.plain(Poly.one()), (1, 1): Entry.plain(Poly.one())}}
    diff = CurvedComplex.add_terms(comp, idm, -1)
    for mono, mat in diff.items():
        if mono.total_even_weight() < 2:
            assert all(e.is_zero() for e in mat.values())


def test_transport_conjugation_moves_xi(qx):
    """Psi (delta + xi u) Psi^{-1} = delta + xi' u when [d, h] = xi - xi'."""
    from fraylab.homalg import conjugate_connection

    x = Poly.gen(x_gen(1))
    base = two_term(qx, x)
    u = ParamSpec.make([("u1", MultiDegree(0, -2, 2), "even")])
    xi = {PM_ONE: {(0, 1): Entry.plain(Poly.one())}}
    D = strict_deformation(base, [xi], [x], u)
    h = {PM_ONE: {(0, 1): Entry.plain(Poly.one())}}
    # [d, h] = x on the diagonal: xi' must satisfy xi - xi' = [d,h]... here we
    # conjugate and verify the result still satisfies Maurer-Cartan
    psi, psi_inv = transport_twist(D, h, "u1", 2, xi, xi)
    new_conn = conjugate_connection(D, psi, psi_inv)
    probe = CurvedComplex(
        D.objects, D.params, new_conn, dict(D.curvature), D.cap
    )
    assert probe.mc_check().ok


# -- sdr lifting -----------------------------------------------------------------------

def test_sdr_lift_identities(qx):
    x = Poly.gen(x_gen(1))
    objs = [
        RC_Object(MultiDegree(0, 0, 0), qx),
        RC_Object(MultiDegree(0, 0, 1), qx),
        RC_Object(MultiDegree(0, -2, 1), qx),
    ]
    C3 = CurvedComplex(
        objs,
        ParamSpec.make([]),
        {PM_ONE: {(1, 0): Entry.plain(Poly.one()), (2, 0): Entry.plain(x)}},
    )
    red, sdr = gaussian_eliminate(C3, (1, 0))
    assert sdr.verify().ok
    # lift the zero family and a multiplication family
    u = ParamSpec.make([("v", MultiDegree(0, -2, 2), "even")])
    # xi on the reduced complex: single object, xi must have degree t^{-1}q^2...
    # use the zero family (always a deforming family)
    lifted, lifted_sdr = sdr_lift(sdr, [{PM_ONE: {}}], [Poly.zero()], u)
    assert lifted_sdr.verify().ok
    assert all(not mat for mat in lifted[0].values())


# -- hpt conjugation ----------------------------------------------------------------------

def test_hpt_conjugate_identity(qx):
    from fraylab.homalg import hpt_conjugate

    x = Poly.gen(x_gen(1))
    th = ParamSpec.make([("th", MultiDegree(0, -2, 1), "odd")])
    base = CurvedComplex([RC_Object(MultiDegree(0, 0, 0), qx)], th)
    alpha = {PMono((), ("th",), ()): {(0, 0): Entry.plain(x)}}
    idm = {PM_ONE: {(0, 0): Entry.plain(Poly.one())}}
    out = hpt_conjugate(idm, idm, base, base, alpha, {})
    assert out.terms[PMono((), ("th",), ())][(0, 0)].plain_part() == x


def test_hpt_conjugate_permutation(qxy):
    """A basis-permutation isomorphism transports a Koszul twist to the
    permuted twist."""
    from fraylab.homalg import hpt_conjugate

    x, y = Poly.gen(x_gen(1)), Poly.gen(x_gen(2))
    th = ParamSpec.make([("th", MultiDegree(0, -2, 1), "odd")])
    objs = [RC_Object(MultiDegree(0, 0, 0), qxy), RC_Object(MultiDegree(0, 0, 0), qxy)]
    X = CurvedComplex(objs, th)
    alpha = {
        PMono((), ("th",), ()): {
            (0, 0): Entry.plain(x),
            (1, 1): Entry.plain(y),
        }
    }
    swap = {PM_ONE: {(0, 1): Entry.plain(Poly.one()), (1, 0): Entry.plain(Poly.one())}}
    out = hpt_conjugate(swap, swap, X, X, alpha, {})
    mat = out.terms[PMono((), ("th",), ())]
    assert mat[(0, 0)].plain_part() == y
    assert mat[(1, 1)].plain_part() == x


# -- shifts ------------------------------------------------------------------------------

def test_shift_involution_and_sign(qx):
    x = Poly.gen(x_gen(1))
    cx = two_term(qx, x)
    up = cx.shifted(MultiDegree(0, 0, 1))
    assert up.terms[PM_ONE][(1, 0)].plain_part() == -1 * x
    back = up.shifted(MultiDegree(0, 0, -1))
    assert back.terms[PM_ONE][(1, 0)].plain_part() == x
    assert [o.degree for o in back.objects] == [o.degree for o in cx.objects]
    # q-shifts are sign-inert
    q = cx.shifted(MultiDegree(0, 1, 0))
    assert q.terms[PM_ONE][(1, 0)].plain_part() == x


def test_complex_json_shape(qx):
    cx = two_term(qx, Poly.gen(x_gen(1)))
    data = cx.to_json()
    assert set(data) == {"objects", "params", "connection", "curvature"}
    assert data["objects"][0]["degree"] == [0, 0, 0]


def test_shift_complex_function(qx):
    from fraylab.grading import MultiDegree as MD, ShiftSpec, shift_complex

    x = Poly.gen(x_gen(1))
    cx = two_term(qx, x)
    shifted = shift_complex(cx, ShiftSpec(MD(0, 0, 1)))
    assert shifted.terms[PM_ONE][(1, 0)].plain_part() == -1 * x
    assert shifted.objects[0].degree == MD(0, 0, 1)
    again = shift_complex(shifted, ShiftSpec(MD(0, 0, -1)))
    assert again.terms[PM_ONE][(1, 0)].plain_part() == x
