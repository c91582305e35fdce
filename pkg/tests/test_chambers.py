from fractions import Fraction as Q

import pytest

from dhmeasure.chambers import (GeometryError, convex_hull_h_rep,
                                enumerate_cells, integrate_polynomial_over_cell,
                                polytope_vertices, singular_hyperplanes,
                                split_cells, triangulate, walk_to)
from dhmeasure.polyring import Polynomial

SQUARE = [(Q(1), Q(1)), (Q(1), Q(-1)), (Q(-1), Q(1)), (Q(-1), Q(-1))]


def test_singular_hyperplanes_two_qubit_square():
    walls = singular_hyperplanes(SQUARE, "affine")
    # two axis walls and two diagonal walls through opposite vertices,
    # plus the four edges of the square
    lines = {(tuple(w.ell), w.offset) for w in walls}
    assert ((1, -1), Q(0)) in lines or ((-1, 1), Q(0)) in lines
    assert ((1, 1), Q(0)) in lines or ((-1, -1), Q(0)) in lines


def test_convex_hull_square():
    eqs, ineqs = convex_hull_h_rep(SQUARE)
    assert eqs == []
    assert len(ineqs) == 4
    for a, b in ineqs:
        for p in SQUARE:
            assert sum(ai * pi for ai, pi in zip(a, p)) <= b


def test_convex_hull_lower_dimensional():
    eqs, ineqs = convex_hull_h_rep([(Q(0), Q(0)), (Q(1), Q(1))])
    assert len(eqs) == 1  # the segment spans the diagonal line
    a, b = eqs[0]
    assert a[0] + a[1] == 0 and b == 0


def test_polytope_vertices_square():
    _, ineqs = convex_hull_h_rep(SQUARE)
    verts = set(polytope_vertices(ineqs))
    assert verts == set(SQUARE)


def test_split_cells_square():
    walls = singular_hyperplanes(SQUARE, "affine")
    _, bounding = convex_hull_h_rep(SQUARE)
    cells = split_cells(bounding, walls)
    # the square splits into four triangles along the two diagonals
    assert len(cells) == 4
    total = Q(0)
    one = Polynomial.constant(2, 1)
    for c in cells:
        assert c.bounded
        total += integrate_polynomial_over_cell(one, list(c.h_rep),
                                                vertices=c.vertices)
    assert total == 4  # area of the square


def test_walk_to_crossing_parity():
    # a generic interior point is reached after an odd number of inward
    # boundary crossings of the hull
    walls = singular_hyperplanes(SQUARE, "affine")
    crossings = walk_to((Q(1, 3), Q(1, 7)), SQUARE, "affine", walls=walls)
    assert sum(1 for c in crossings if c.in_hull) >= 1


def test_walk_to_rejects_singular_point():
    walls = singular_hyperplanes(SQUARE, "affine")
    with pytest.raises(GeometryError):
        walk_to((Q(0), Q(0)), SQUARE, "affine", walls=walls)


def test_triangulate_square():
    tris = triangulate(SQUARE)
    assert all(len(t) == 3 for t in tris)
    one = Polynomial.constant(2, 1)
    from dhmeasure.polyring import integrate_over_simplex
    assert sum(integrate_over_simplex(one, t) for t in tris) == 4


def test_enumerate_cells_cone():
    gens = [(Q(1), Q(0)), (Q(0), Q(1)), (Q(1), Q(1))]
    complex_ = enumerate_cells(gens, "cone",
                               bounding=[((Q(-1), Q(0)), Q(0)),
                                         ((Q(0), Q(-1)), Q(0)),
                                         ((Q(1), Q(0)), Q(2)),
                                         ((Q(0), Q(1)), Q(2))])
    # the diagonal splits the first-quadrant box into two cells
    assert len(complex_.cells) == 2
    assert len(complex_.adjacency) == 1


def test_integrate_polynomial_over_cell_degenerate():
    # fewer vertices than dimension + 1: zero measure
    h_rep = [((Q(1), Q(0)), Q(0)), ((Q(-1), Q(0)), Q(0)),
             ((Q(0), Q(1)), Q(1)), ((Q(0), Q(-1)), Q(0))]
    one = Polynomial.constant(2, 1)
    assert integrate_polynomial_over_cell(one, h_rep) == 0
