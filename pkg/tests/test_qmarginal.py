from fractions import Fraction as Q
from math import factorial

import pytest

from dhmeasure.polyring import Polynomial
from dhmeasure.qmarginal import (AssumptionError, CoadjointOrbit,
                                 MarginalProblem, PureFS, SpectrumTuple,
                                 assumption_check,
                                 average_against_distribution,
                                 average_functional,
                                 average_numeric, eigenvalue_distribution,
                                 moment_polytope, problem_from_json,
                                 problem_to_json, purified_double,
                                 sliced_purified_density, to_spectrum, to_weyl)
from dhmeasure.rootdata import GroupSpec, RepSpec


def _tensor(*dims, state=None):
    rep = RepSpec(GroupSpec(dims), "tensor")
    return MarginalProblem(rep, state) if state is not None \
        else MarginalProblem(rep)


def test_weyl_spectrum_round_trip():
    g = GroupSpec((2, 3))
    spectra = ((Q(3, 4), Q(1, 4)), (Q(1, 2), Q(1, 3), Q(1, 6)))
    w = to_weyl(g, spectra)
    assert w.coords == (Q(1, 2), Q(1, 6), Q(1, 6))
    back = to_spectrum(g, w)
    assert back.spectra == spectra


def test_weyl_spectrum_validation():
    g = GroupSpec((2,))
    with pytest.raises(ValueError):
        to_weyl(g, ((Q(1, 4), Q(3, 4)),))  # increasing
    with pytest.raises(ValueError):
        to_weyl(g, ((Q(1, 2), Q(1, 4)),))  # trace != 1
    with pytest.raises(ValueError):
        to_spectrum(g, (Q(-1, 2),))  # outside the positive chamber


def test_assumption_check_degenerate_bipartite():
    # a 2x5 bipartite pure state: the larger marginal always has at least
    # three zero eigenvalues, so the joint spectra are confined to a wall
    with pytest.raises(AssumptionError):
        assumption_check(_tensor(2, 5))
    # the purified double restores the spanning assumption
    assumption_check(purified_double(
        MarginalProblem(RepSpec(GroupSpec((2,)), "sym", 2),
                        CoadjointOrbit((Q(1, 2), Q(1, 3), Q(1, 6))))))


def test_unequal_bipartite_distribution_is_too_singular():
    # pure (2,3): spec rho_B = (spec rho_A, 0), so the joint law lives in
    # codimension two and has no piecewise representation
    with pytest.raises(AssumptionError):
        eigenvalue_distribution(_tensor(2, 3))


def test_two_qubit_distribution_is_a_layer():
    dist = eigenvalue_distribution(_tensor(2, 2), frame="weyl")
    assert all(d.is_zero() for d in dist.densities)
    assert len(dist.layers) == 1
    assert dist.total_mass() == 1


def test_two_qubit_moments():
    # marginal law of either reduced eigenvalue: 24 (s - 1/2)^2 on [1/2, 1]
    problem = _tensor(2, 2)
    x = Polynomial.variable(2, 0)
    one = Polynomial.constant(2, 1)
    assert average_functional(problem, x * x + (one - x) * (one - x)) == Q(4, 5)
    # the largest eigenvalue itself is not symmetric under reordering, so the
    # dual-route functional refuses it and the single-route integral applies
    with pytest.raises(ValueError):
        average_functional(problem, x)
    assert average_against_distribution(problem, x) == Q(7, 8)


def test_three_qubit_density_closed_form():
    dist = eigenvalue_distribution(_tensor(2, 2, 2), frame="weyl")
    for pt in [(Q(1, 2), Q(1, 3), Q(1, 4)), (Q(1, 4), Q(1, 3), Q(1, 5)),
               (Q(9, 10), Q(9, 11), Q(1, 13))]:
        s, mn = sum(pt), min(pt)
        f = mn / 16 if s <= 1 else max(Q(0), 1 - s + 2 * mn) / 32
        want = factorial(7) * pt[0] * pt[1] * pt[2] * f
        assert dist.evaluate(pt) == want


def test_three_qubit_density_spectra_frame():
    dist = eigenvalue_distribution(_tensor(2, 2, 2), frame="spectra")
    # spectra (3/4, 2/3, 5/8) correspond to Weyl point (1/2, 1/3, 1/4);
    # the chart s = (1 + c)/2 per qubit contributes a Jacobian factor 8
    assert dist.evaluate((Q(3, 4), Q(2, 3), Q(5, 8))) == 8 * Q(175, 64)


def test_three_qubit_moment_polytope():
    poly = moment_polytope(_tensor(2, 2, 2))
    assert set(poly.vertices) == {
        (Q(0), Q(0), Q(0)), (Q(1), Q(0), Q(0)), (Q(0), Q(1), Q(0)),
        (Q(0), Q(0), Q(1)), (Q(1), Q(1), Q(1))}
    # the polygon inequalities include the triangle conditions
    # c_j + c_k - c_i <= 1 on the Weyl coordinates
    ineqs = {(tuple(a), c) for a, c in poly.inequalities}
    assert ((-1, 1, 1), Q(1)) in ineqs
    assert ((1, -1, 1), Q(1)) in ineqs
    assert ((1, 1, -1), Q(1)) in ineqs
    assert poly.contains((Q(1, 2), Q(1, 2), Q(1, 2)))
    assert not poly.contains((Q(1), Q(1), Q(0)))


def test_bosonic_qubits_marginal():
    # two bosonic qubits: marginal density 8 (s - 1/2) on [1/2, 1]
    sym2 = MarginalProblem(RepSpec(GroupSpec((2,)), "sym", 2))
    dist = eigenvalue_distribution(sym2, frame="spectra")
    assert dist.evaluate((Q(7, 10),)) == Q(8, 5)
    assert dist.total_mass() == 1


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_bosonic_qubit_purity(n):
    problem = MarginalProblem(RepSpec(GroupSpec((2,)), "sym", n))
    y = Polynomial.variable(1, 0)
    one = Polynomial.constant(1, 1)
    purity = average_functional(problem, y * y + (one - y) * (one - y))
    assert purity == Q(1, 2) + Q(1, 2 * n)


def test_onesided_qubit_density():
    # qubit with a three-dimensional environment:
    # density 60 s (1-s) (2s-1)^2 on [1/2, 1]
    problem = MarginalProblem(RepSpec(GroupSpec((2,)), "onesided", 3))
    dist = eigenvalue_distribution(problem, frame="spectra")
    s = Q(3, 4)
    assert dist.evaluate((s,)) == 60 * s * (1 - s) * (2 * s - 1) ** 2
    assert dist.total_mass() == 1


def test_mixed_two_qubit_polytope():
    # global spectrum (4/7, 2/7, 1/7, 0): the support is cut out by linear
    # inequalities with sevenths on the right-hand side
    problem = _tensor(2, 2, state=CoadjointOrbit((Q(4, 7), Q(2, 7),
                                                  Q(1, 7), Q(0))))
    dist = eigenvalue_distribution(problem, frame="weyl")
    assert dist.total_mass() == 1
    poly = moment_polytope(problem)
    assert set((tuple(a), c) for a, c in poly.inequalities) == {
        ((-1, 0), Q(0)), ((0, -1), Q(0)),
        ((1, 0), Q(5, 7)), ((0, 1), Q(5, 7)),
        ((1, -1), Q(4, 7)), ((-1, 1), Q(4, 7)),
        ((1, 1), Q(8, 7))}
    assert (Q(3, 7), Q(5, 7)) in poly.vertices


def test_sliced_purified_density_matches_orbit_route():
    problem = _tensor(2, 2, state=CoadjointOrbit((Q(5, 12), Q(1, 3),
                                                  Q(1, 6), Q(1, 12))))
    dist = eigenvalue_distribution(problem, frame="weyl")
    pt = (Q(1, 5), Q(1, 11))
    assert sliced_purified_density(problem, pt) == dist.evaluate(pt)


def test_average_numeric_matches_exact():
    val, err = average_numeric(_tensor(2, 2),
                               lambda xs: xs[0] ** 2 + (1 - xs[0]) ** 2,
                               order=16)
    assert abs(val - 0.8) <= max(err, 1e-12)


def test_problem_json_round_trip():
    for problem in [_tensor(2, 3),
                    MarginalProblem(RepSpec(GroupSpec((2,)), "sym", 3, env=2)),
                    _tensor(2, 2, state=CoadjointOrbit((Q(1, 2), Q(1, 4),
                                                        Q(1, 8), Q(1, 8))))]:
        text = problem_to_json(problem)
        back = problem_from_json(text)
        assert back == problem
        assert problem_to_json(back) == text


def test_spectrum_tuple_and_orbit_validation():
    with pytest.raises(ValueError):
        CoadjointOrbit((Q(1, 4), Q(3, 4)))  # increasing
    with pytest.raises(ValueError):
        CoadjointOrbit((Q(1, 2), Q(1, 4)))  # trace != 1
    st = SpectrumTuple(((Q(1, 2), Q(1, 2)),))
    assert st.spectra[0] == (Q(1, 2), Q(1, 2))
