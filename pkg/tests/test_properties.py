from fractions import Fraction as Q
from math import comb, factorial

from hypothesis import given, settings, strategies as st

from dhmeasure.chambers import convex_hull_h_rep, polytope_vertices
from dhmeasure.measure_engine import single_summand_density, total_mass
from dhmeasure.multiplicity import (YoungDiagram, gaussian_binomial,
                                    kronecker, _partitions)
from dhmeasure.polyring import Polynomial
from dhmeasure.qmarginal import to_spectrum, to_weyl
from dhmeasure.rootdata import (GroupSpec, build_root_data, weyl_orbit_signed)

rationals = st.fractions(min_value=-4, max_value=4, max_denominator=8)


def _poly_from_terms(nvars, terms):
    p = Polynomial.zero(nvars)
    for exps, coeff in terms:
        mono = Polynomial.constant(nvars, coeff)
        for v, e in enumerate(exps):
            mono = mono * Polynomial.variable(nvars, v) ** e
        p = p + mono
    return p


polys2 = st.lists(
    st.tuples(st.tuples(st.integers(0, 3), st.integers(0, 3)), rationals),
    max_size=5).map(lambda t: _poly_from_terms(2, t))
points2 = st.tuples(rationals, rationals)


@settings(max_examples=60, deadline=None)
@given(polys2, polys2, points2)
def test_evaluation_is_a_ring_homomorphism(p, q, x):
    assert (p + q).evaluate(x) == p.evaluate(x) + q.evaluate(x)
    assert (p * q).evaluate(x) == p.evaluate(x) * q.evaluate(x)
    assert (p - q).evaluate(x) == p.evaluate(x) - q.evaluate(x)


@settings(max_examples=40, deadline=None)
@given(polys2, polys2, polys2, points2)
def test_compose_evaluates_pointwise(p, g0, g1, x):
    composed = p.compose([g0, g1])
    assert composed.evaluate(x) == p.evaluate((g0.evaluate(x), g1.evaluate(x)))


@settings(max_examples=40, deadline=None)
@given(st.lists(points2, min_size=1, max_size=8))
def test_convex_hull_contains_its_points(pts):
    eqs, ineqs = convex_hull_h_rep(pts)
    for p in pts:
        for a, b in eqs:
            assert sum(c * x for c, x in zip(a, p)) == b
        for a, b in ineqs:
            assert sum(c * x for c, x in zip(a, p)) <= b
    if not eqs:
        for v in polytope_vertices(list(ineqs)):
            assert v in pts


def _spectrum(weights):
    total = sum(weights)
    return tuple(sorted((Q(w, total) for w in weights), reverse=True))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(1, 9), min_size=2, max_size=4),
                min_size=1, max_size=3))
def test_weyl_spectra_round_trip(factor_weights):
    group = GroupSpec(tuple(len(w) for w in factor_weights))
    spectra = tuple(_spectrum(w) for w in factor_weights)
    w = to_weyl(group, spectra)
    assert all(c >= 0 for c in w.coords)
    assert to_spectrum(group, w).spectra == spectra


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.data())
def test_kronecker_is_symmetric(n, data):
    parts = [tuple(p) for p in _partitions(n)]
    a = data.draw(st.sampled_from(parts))
    b = data.draw(st.sampled_from(parts))
    c = data.draw(st.sampled_from(parts))
    base = kronecker(YoungDiagram(a), YoungDiagram(b), YoungDiagram(c))
    assert base >= 0
    assert kronecker(YoungDiagram(b), YoungDiagram(c), YoungDiagram(a)) == base
    assert kronecker(YoungDiagram(a).transpose(), YoungDiagram(b).transpose(),
                     YoungDiagram(c)) == base


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 8), st.data())
def test_gaussian_binomial_palindromic(m, data):
    r = data.draw(st.integers(0, m))
    coeffs = gaussian_binomial(m, r)
    assert coeffs == coeffs[::-1]
    assert all(c > 0 for c in coeffs)
    assert sum(coeffs) == comb(m, r)
    assert len(coeffs) == r * (m - r) + 1


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(2,), (3,), (2, 2), (4,), (2, 3)]), st.data())
def test_signed_weyl_orbit_signs_cancel(factors, data):
    rd = build_root_data(GroupSpec(factors))
    rank = sum(d - 1 for d in factors)
    lam = tuple(data.draw(st.fractions(min_value=Q(1, 3), max_value=5,
                                       max_denominator=6))
                for _ in range(rank))
    orbit = weyl_orbit_signed(rd, lam)
    assert sum(sign for _, sign in orbit) == 0 or rd.weyl_group_size == 1
    assert len(orbit) <= rd.weyl_group_size


@settings(max_examples=15, deadline=None)
@given(st.lists(st.tuples(st.integers(-2, 2), st.integers(-2, 2)),
                min_size=3, max_size=6, unique=True))
def test_single_summand_mass(weights):
    pts = [tuple(Q(c) for c in w) for w in weights]
    diffs = [tuple(a - b for a, b in zip(p, pts[0])) for p in pts[1:]]
    # need the weights to span affinely, else the summand is degenerate
    rank2 = any(d1[0] * d2[1] - d1[1] * d2[0] != 0
                for i, d1 in enumerate(diffs) for d2 in diffs[i + 1:])
    if not rank2:
        return
    m = single_summand_density([tuple(w) for w in pts])
    assert total_mass(m) == Q(1, factorial(len(pts) - 1))
