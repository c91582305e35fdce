from fractions import Fraction as Q
from math import factorial

import pytest

from dhmeasure.polyring import (Polynomial, cone_jump, directional_derivative,
                                integrate_over_simplex, residue_jump)


def test_arithmetic_and_evaluate():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    p = (x + y) * (x - y)
    assert p.evaluate((Q(3), Q(2))) == 5
    assert (x * x - y * y) == p
    assert (p - p).is_zero()
    assert (x + y) ** 3 == x ** 3 + 3 * x * x * y + 3 * x * y * y + y ** 3


def test_linear_form_and_compose():
    f = Polynomial.linear_form([Q(2), Q(-1)], Q(3))  # 2x - y + 3
    assert f.evaluate((Q(1), Q(2))) == 3
    g = f.compose([Polynomial.variable(1, 0),
                   Polynomial.constant(1, 5)])  # 2t - 5 + 3
    assert g.evaluate((Q(4),)) == 6


def test_derivatives():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    p = x ** 2 * y
    assert p.derivative(0) == 2 * x * y
    assert p.derivative(1) == x ** 2
    assert directional_derivative(p, (Q(1), Q(-1))) == 2 * x * y - x ** 2


def test_integrate_over_simplex_volume():
    # unit simplex in dimension r has volume 1/r!
    for r in (1, 2, 3):
        verts = [tuple(Q(0) for _ in range(r))]
        for i in range(r):
            verts.append(tuple(Q(1) if j == i else Q(0) for j in range(r)))
        one = Polynomial.constant(r, 1)
        assert integrate_over_simplex(one, verts) == Q(1, factorial(r))


def test_integrate_over_simplex_monomial():
    # int_{x,y>=0, x+y<=1} x dx dy = 1/6
    verts = [(Q(0), Q(0)), (Q(1), Q(0)), (Q(0), Q(1))]
    x = Polynomial.variable(2, 0)
    assert integrate_over_simplex(x, verts) == Q(1, 6)
    # affine transformation scales by the Jacobian
    verts2 = [(Q(0), Q(0)), (Q(2), Q(0)), (Q(0), Q(2))]
    assert integrate_over_simplex(x, verts2) == Q(8, 6)


def test_residue_jump_single_interval():
    # pushforward of the segment [0,1] spanned by weights 0 and 1 onto the
    # line: crossing the wall at 0 jumps the density from 0 to the constant 1
    f_wall = Polynomial.constant(1, 1)
    jump = residue_jump(f_wall, (Q(0),), [(Q(1),)], (1,), 0)
    assert jump == Polynomial.constant(1, 1)


def test_residue_jump_triangle():
    # standard triangle with vertices 0, e1, e2: crossing the wall x = 0
    # (carrying weights 0 and e2) adds the constant density 1
    f_wall = Polynomial.constant(2, 1)
    jump = residue_jump(f_wall, (Q(0), Q(0)), [(Q(1), Q(0))], (1, 0), 0)
    assert jump == Polynomial.constant(2, 1)


def test_cone_jump_quadrant():
    # cone on e1, e2: crossing the wall x = 0 at a point with y > 0 adds 1
    f_wall = Polynomial.constant(2, 1)
    jump = cone_jump(f_wall, [(Q(1), Q(0))], (1, 0), wall_degree=0)
    assert jump == Polynomial.constant(2, 1)


def test_zero_and_constants():
    z = Polynomial.zero(3)
    assert z.is_zero()
    assert z.degree() == -1  # the zero polynomial reports degree -1
    c = Polynomial.constant(3, Q(5, 7))
    assert c.evaluate((Q(0), Q(0), Q(0))) == Q(5, 7)
