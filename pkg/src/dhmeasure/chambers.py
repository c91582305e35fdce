"""Exact chamber geometry: singular hyperplanes, hull membership, generic
walks, arrangement cell enumeration, convex hulls and triangulation.

All predicates are exact rational decisions; there are no epsilons.  The "+"
side of a wall is always the side where its covector ell increases.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction as Q
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from ._exactlp import feasible, lp_maximize, strict_interior_point
from ._linalg import (Vec, hyperplane_covector, matrix_rank, nullspace,
                      primitive_integer, rref, solve, vdot, vec, vsub)

Constraint = Tuple[Tuple[Q, ...], Q]  # a . x <= b


@dataclass(frozen=True)
class Wall:
    """A singular hyperplane ell(x) = offset with its on-wall weight data."""

    ell: Tuple[int, ...]
    offset: Q
    on_wall_indices: Tuple[int, ...]
    hull: Tuple[Vec, ...]
    kind: str  # 'affine' or 'cone'

    def side(self, point) -> int:
        v = vdot(vec(self.ell), vec(point)) - self.offset
        return (v > 0) - (v < 0)

    def hull_contains(self, point) -> bool:
        """Whether the point lies in the actual singular wall: the convex hull
        (affine kind) or the cone (cone kind) of the on-wall weights."""
        pts = self.hull
        p = vec(point)
        r = len(p)
        nw = len(pts)
        # feasibility of sum t_j w_j = p (+ sum t_j = 1 in the affine kind), t>=0
        rows: List[List[Q]] = []
        rhs: List[Q] = []
        for i in range(r):
            row = [pts[j][i] for j in range(nw)]
            rows.append(row)
            rhs.append(p[i])
            rows.append([-x for x in row])
            rhs.append(-p[i])
        if self.kind == "affine":
            rows.append([Q(1)] * nw)
            rhs.append(Q(1))
            rows.append([Q(-1)] * nw)
            rhs.append(Q(-1))
        for j in range(nw):
            rows.append([Q(-1) if t == j else Q(0) for t in range(nw)])
            rhs.append(Q(0))
        return feasible(rows, rhs)


@dataclass(frozen=True)
class Cell:
    """Full-dimensional arrangement cell as strict half-space constraints.

    ``signs`` (one entry per wall of the arrangement the cell came from) and
    ``vertices`` are carried when the cell was built by ``split_cells``."""

    h_rep: Tuple[Constraint, ...]
    interior_point: Tuple[Q, ...]
    bounded: bool
    signs: Optional[Tuple[int, ...]] = None
    vertices: Optional[Tuple[Tuple[Q, ...], ...]] = None

    def contains(self, point, strict: bool = True) -> bool:
        p = vec(point)
        for a, b in self.h_rep:
            v = vdot(vec(a), p)
            if v > b or (strict and v == b):
                return False
        return True


@dataclass
class ChamberComplex:
    cells: List[Cell]
    adjacency: List[Tuple[int, int, Wall]]
    kind: str


class GeometryError(ValueError):
    """Raised on violated geometric preconditions (dimension, regularity)."""


def _affine_rank(points: Sequence[Vec]) -> int:
    if not points:
        return -1
    return matrix_rank([vsub(p, points[0]) for p in points[1:]])


def singular_hyperplanes(weights: Sequence, kind: str) -> List[Wall]:
    """All singular hyperplanes of the weight system.

    affine: hyperplanes through r affinely independent weights; cone:
    linear hyperplanes through r-1 linearly independent weights."""
    pts = [vec(w) for w in weights]
    if not pts:
        return []
    r = len(pts[0])
    distinct = sorted(set(pts))
    found: Dict[Tuple[Tuple[int, ...], Q], List[int]] = {}
    if kind == "affine":
        if _affine_rank(pts) != r:
            raise GeometryError("weights do not affinely span the ambient space")
        if r == 1:
            for p in distinct:
                found[((1,), p[0])] = []
        else:
            for sub in combinations(distinct, r):
                hc = hyperplane_covector(list(sub))
                if hc is not None:
                    found.setdefault((hc[0], hc[1]), [])
    elif kind == "cone":
        if matrix_rank(pts) != r:
            raise GeometryError("generators do not span the ambient space")
        if r == 1:
            found[((1,), Q(0))] = []
        else:
            nz = [p for p in distinct if any(c != 0 for c in p)]
            for sub in combinations(nz, r - 1):
                if matrix_rank(list(sub)) != r - 1:
                    continue
                ns = nullspace(list(sub))
                if len(ns) != 1:
                    continue
                found.setdefault((primitive_integer(ns[0]), Q(0)), [])
    else:
        raise ValueError(f"unknown kind {kind!r}")
    walls = []
    for (ell, c) in sorted(found):
        ellv = vec(ell)
        idx = tuple(i for i, p in enumerate(pts) if vdot(ellv, p) == c)
        hull = tuple(pts[i] for i in idx)
        walls.append(Wall(ell, c, idx, hull, kind))
    return walls


@dataclass(frozen=True)
class Crossing:
    wall: Wall
    point: Tuple[Q, ...]
    direction: int  # +1 if the walk moves to the ell-positive side
    in_hull: bool


def _in_cone(point: Vec, gens: List[Vec]) -> bool:
    """Whether the point is a nonnegative combination of the generators."""
    r = len(point)
    k = len(gens)
    A: List[List[Q]] = []
    b: List[Q] = []
    for i in range(r):  # sum_j t_j gens[j][i] == point[i], as two inequalities
        row = [gens[j][i] for j in range(k)]
        A.append(row)
        b.append(point[i])
        A.append([-x for x in row])
        b.append(-point[i])
    for j in range(k):
        A.append([Q(-1) if jj == j else Q(0) for jj in range(k)])
        b.append(Q(0))
    return feasible(A, b)


def _walk_seed(point: Vec, salt: int) -> random.Random:
    key = (tuple((c.numerator, c.denominator) for c in point), salt)
    return random.Random(repr(key))


def walk_to(point, weights: Sequence, kind: str,
            walls: Optional[List[Wall]] = None, salt: int = 0,
            max_retries: int = 64, base: Optional[Sequence] = None,
            outward: Optional[Sequence] = None) -> List[Crossing]:
    """Generic straight-line walk from far outside the support to ``point``.

    Returns the ordered wall crossings; each is annotated with whether the
    crossing point lies in the wall's hull (true singular wall) or only on the
    hyperplane's extension (no jump there).  The base point is drawn from a
    deterministic pseudo-random sequence seeded by the input and re-drawn until
    the segment is generic; genericity is verified exactly."""
    p = vec(point)
    r = len(p)
    if walls is None:
        walls = singular_hyperplanes(weights, kind)
    for w in walls:
        if w.side(p) == 0:
            raise GeometryError("query point lies on a singular hyperplane")
    scale = Q(1)
    for w in weights:
        for c in vec(w):
            scale = max(scale, abs(c))
    scale = max(scale, *(abs(c) for c in p)) if p else scale
    fixed_base = vec(base) if base is not None else None
    for attempt in range(max_retries):
        if fixed_base is not None:
            if attempt > 0:
                raise GeometryError("explicit base point gives a non-generic segment")
            start = fixed_base
        elif outward is not None:
            # start far along the given outward direction, mildly perturbed
            rng = _walk_seed(p, salt + attempt)
            ov = vec(outward)
            radius = scale * (r + 2) * 1000
            start = tuple(radius * ov[i]
                          + scale * Q(rng.randrange(-10_000, 10_000), 99_991)
                          for i in range(r))
        else:
            rng = _walk_seed(p, salt + attempt)
            radius = scale * (r + 2) * 1000
            start = tuple(p[i] + radius * Q(rng.randrange(10_000, 1_000_000)
                                            * (1 if rng.random() < 0.5 else -1),
                                            99_991)
                          for i in range(r))
        if outward is not None and _in_cone(start, [vec(w) for w in weights]):
            continue  # base must lie strictly outside the support cone
        seg = vsub(p, start)
        crossings: List[Tuple[Q, Wall, int]] = []
        ok = True
        for w in walls:
            ellv = vec(w.ell)
            denom = vdot(ellv, seg)
            pos0 = vdot(ellv, start)
            if denom == 0:
                if pos0 == w.offset:
                    ok = False
                    break
                continue
            t = (w.offset - pos0) / denom
            if t <= 0 or t >= 1:
                continue
            crossings.append((t, w, 1 if denom > 0 else -1))
        if not ok:
            continue
        ts = [t for t, _, _ in crossings]
        if len(set(ts)) != len(ts):
            continue
        # base must be outside the support region: every wall hyperplane that
        # bounds the support must be on the far side; cheap sufficient check:
        # base is far outside the hull of the weights in every coordinate
        # direction thanks to the radius; verified exactly below via walls.
        crossings.sort(key=lambda c: c[0])
        out = []
        for t, w, direction in crossings:
            x = tuple(start[i] + t * seg[i] for i in range(r))
            out.append(Crossing(w, x, direction, w.hull_contains(x)))
        return out
    raise GeometryError("failed to find a generic walk segment")


def split_cells(bounding: List[Constraint], walls: Sequence[Wall]
                ) -> List[Cell]:
    """Cells of the hyperplane arrangement inside a bounded bounding polytope.

    Purely combinatorial: each cell carries its vertex set, splitting is done
    by sign tests on vertices and segment/hyperplane crossings, so no linear
    programs are solved.  Cells record their sign with respect to every wall;
    two cells are adjacent across wall k iff their sign vectors differ exactly
    at position k (their union minus the wall is convex)."""
    bounding = [(vec(a), Q(b)) for a, b in bounding]
    if not _is_bounded(bounding):
        raise GeometryError("bounding region must be a bounded polytope")
    verts = polytope_vertices(bounding)
    r = len(bounding[0][0])
    if _affine_rank(verts) != r:
        raise GeometryError("bounding region is not full-dimensional")
    # covectors of every hyperplane seen so far; points carry the index set of
    # the hyperplanes tight at them, so edges are detected by rank r-1 of the
    # common tight set and only edge/wall crossings are ever generated
    covectors: List[Vec] = [a for a, _ in bounding]
    pts0 = []
    for p in verts:
        mask = frozenset(i for i, (a, b) in enumerate(bounding)
                         if vdot(a, p) == b)
        pts0.append((p, mask))
    Entry = Tuple[Tuple[Q, ...], frozenset]
    cells: List[Tuple[List[Constraint], List[Entry], List[int]]] = [
        (list(bounding), pts0, [])]
    for w in walls:
        ellv = vec(tuple(Q(c) for c in w.ell))
        c0 = Q(w.offset)
        g = len(covectors)
        covectors.append(ellv)
        nxt: List[Tuple[List[Constraint], List[Entry], List[int]]] = []
        for h_rep, pts, signs in cells:
            vals = [vdot(ellv, p) - c0 for p, _ in pts]
            if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
                touched = [(p, mask | {g}) if v == 0 else (p, mask)
                           for (p, mask), v in zip(pts, vals)]
                nxt.append((h_rep, touched,
                            signs + [1 if any(v > 0 for v in vals) else -1]))
                continue
            shared: Dict[Tuple[Q, ...], frozenset] = {}
            for (p, mask), v in zip(pts, vals):
                if v == 0:
                    shared[p] = mask | {g}
            for (p, mp), vp in zip(pts, vals):
                if vp <= 0:
                    continue
                for (q, mq), vq in zip(pts, vals):
                    if vq >= 0:
                        continue
                    common = mp & mq
                    if matrix_rank([covectors[i] for i in common]) != r - 1:
                        continue  # p and q do not span an edge
                    t = vp / (vp - vq)
                    x = tuple(p[i] + t * (q[i] - p[i]) for i in range(r))
                    shared[x] = common | {g}
            shared_l = sorted(shared.items())
            plus = [(p, m) for (p, m), v in zip(pts, vals) if v > 0] + shared_l
            minus = [(p, m) for (p, m), v in zip(pts, vals) if v < 0] + shared_l
            nxt.append((h_rep + [(tuple(-x for x in ellv), -c0)], plus,
                        signs + [1]))
            nxt.append((h_rep + [(tuple(ellv), c0)], minus, signs + [-1]))
        cells = nxt
    out = []
    for h_rep, pts, signs in cells:
        coords = sorted(p for p, _ in pts)
        ip = tuple(sum(col, Q(0)) / len(coords) for col in zip(*coords))
        out.append(Cell(tuple(h_rep), ip, True, tuple(signs), tuple(coords)))
    return out


def adjacency_from_signs(cells: List[Cell], walls: Sequence[Wall]
                         ) -> List[Tuple[int, int, Wall]]:
    """Wall adjacencies of split_cells output via the sign-vector criterion."""
    out: List[Tuple[int, int, Wall]] = []
    for i, j in combinations(range(len(cells)), 2):
        s1, s2 = cells[i].signs, cells[j].signs
        diff = [k for k in range(len(walls)) if s1[k] != s2[k]]
        if len(diff) == 1:
            out.append((i, j, walls[diff[0]]))
    return out


def _is_bounded(h_rep: List[Constraint]) -> bool:
    if not h_rep:
        return False
    n = len(h_rep[0][0])
    A = [a for a, _ in h_rep]
    b = [bb for _, bb in h_rep]
    for i in range(n):
        for sgn in (1, -1):
            c = [Q(0)] * n
            c[i] = Q(sgn)
            status, _, _ = lp_maximize(c, A, b)
            if status == "unbounded":
                return False
    return True


def enumerate_cells(weights: Sequence, kind: str,
                    box_bound: Optional[Q] = None,
                    bounding: Optional[List[Constraint]] = None) -> ChamberComplex:
    """Materialize the chamber decomposition: all full-dimensional cells of the
    singular arrangement inside conv(weights) (affine) or a bounding box (cone),
    with exact interior points and wall adjacency.  An explicit ``bounding``
    H-representation overrides the default region."""
    pts = [vec(w) for w in weights]
    r = len(pts[0])
    walls = singular_hyperplanes(pts, kind)
    if bounding is not None:
        bounding = [(vec(a), Q(b)) for a, b in bounding]
    elif kind == "affine":
        eqs, ineqs = convex_hull_h_rep(pts)
        if eqs:
            raise GeometryError("weights do not affinely span the ambient space")
        bounding = ineqs
    else:
        B = box_bound
        if B is None:
            B = Q(1)
            for p in pts:
                for c in p:
                    B = max(B, abs(c))
            B = B * (r + 1)
        bounding = []
        for i in range(r):
            e = tuple(Q(1) if j == i else Q(0) for j in range(r))
            bounding.append((e, B))
            bounding.append((tuple(-x for x in e), B))
    cells = split_cells(bounding, walls)
    return ChamberComplex(cells, adjacency_from_signs(cells, walls), kind)


def _facet_dim_ok(c1: Cell, c2: Cell, w: Wall) -> bool:
    """Whether closure(c1) ∩ closure(c2) ∩ wall has dimension r-1."""
    ellv = vec(tuple(Q(c) for c in w.ell))
    r = len(ellv)
    # parametrize the wall hyperplane and check full-dimensionality there
    point_on = _point_on_hyperplane(w)
    basis = _hyperplane_basis(w)
    A: List[List[Q]] = []
    b: List[Q] = []
    for a, rhs in list(c1.h_rep) + list(c2.h_rep):
        av = vec(a)
        row = [vdot(av, bb) for bb in basis]
        rr = rhs - vdot(av, point_on)
        if all(x == 0 for x in row):
            if rr < 0:
                return False
            continue  # the wall itself (or a trivially satisfied constraint)
        A.append(row)
        b.append(rr)
    return strict_interior_point(A, b) is not None


def _point_on_hyperplane(w: Wall) -> Vec:
    sol = solve([list(vec(tuple(Q(c) for c in w.ell)))], [w.offset])
    assert sol is not None
    return sol


def _hyperplane_basis(w: Wall) -> List[Vec]:
    return [vec(v) for v in nullspace([tuple(Q(c) for c in w.ell)])]


# ---------------------------------------------------------------------------
# convex hulls, vertices, triangulation
# ---------------------------------------------------------------------------

def affine_hull(points: Sequence[Vec]) -> Tuple[Vec, List[Vec]]:
    """(origin, basis) of the affine hull."""
    pts = [vec(p) for p in points]
    dirs = [vsub(p, pts[0]) for p in pts[1:]]
    m, pivots = rref(dirs)
    basis = [vec(m[i]) for i in range(len(pivots))]
    return pts[0], basis


def convex_hull_h_rep(points: Sequence) -> Tuple[List[Tuple[Vec, Q]], List[Constraint]]:
    """Brute-force H-representation of conv(points).

    Returns (equalities, inequalities): equalities cut out the affine hull
    (as (covector, value) pairs), inequalities are facets a.x <= b.  Works in
    any dimension at desk scale."""
    pts = sorted(set(vec(p) for p in points))
    if not pts:
        raise ValueError("empty point set")
    r = len(pts[0])
    origin, basis = affine_hull(pts)
    k = len(basis)
    # equalities: covectors vanishing on the affine hull directions
    eqs: List[Tuple[Vec, Q]] = []
    if k < r:
        for nv in nullspace(basis):
            eqs.append((vec(nv), vdot(vec(nv), origin)))
    if k == 0:
        return eqs, []
    # coordinates within the hull
    G = [[vdot(basis[i], basis[j]) for j in range(k)] for i in range(k)]
    coords = []
    for p in pts:
        d = vsub(p, origin)
        rhs = [vdot(basis[i], d) for i in range(k)]
        sol = solve(G, rhs)
        coords.append(vec(sol))
    ineqs_w: List[Constraint] = []
    seen = set()
    for sub in combinations(range(len(coords)), k):
        hc = hyperplane_covector([coords[i] for i in sub]) if k > 1 else (
            ((1,), coords[sub[0]][0]))
        if hc is None:
            continue
        ell, c = vec(tuple(Q(x) for x in hc[0])), Q(hc[1])
        sides = {(_sgn(vdot(ell, q) - c)) for q in coords}
        if 1 in sides and -1 in sides:
            continue
        if -1 in sides or sides == {0}:
            key = (tuple(ell), c)
        else:
            ell, c = tuple(-x for x in ell), -c
            key = (tuple(ell), c)
        if key not in seen:
            seen.add(key)
            ineqs_w.append((vec(key[0]), key[1]))
    # map wall-frame inequalities back to ambient covectors
    ineqs: List[Constraint] = []
    for ell_w, c in ineqs_w:
        amb, c_amb = _pullback_covector(ell_w, c, origin, basis, G)
        ineqs.append((amb, c_amb))
    return eqs, ineqs


def _sgn(x: Q) -> int:
    return (x > 0) - (x < 0)


def _pullback_covector(ell_w: Vec, c: Q, origin: Vec, basis: List[Vec],
                       G: List[List[Q]]) -> Tuple[Vec, Q]:
    """Ambient covector agreeing with ell_w in hull coordinates and vanishing
    on the hull's normal directions."""
    k = len(basis)
    r = len(origin)
    coeff = solve(G, list(ell_w))
    amb = [sum(coeff[i] * basis[i][j] for i in range(k)) for j in range(r)]
    c_amb = c + vdot(vec(amb), origin)
    return vec(amb), c_amb


def polytope_vertices(h_rep: Sequence[Constraint]) -> List[Vec]:
    """Vertices of a (bounded) polyhedron given by a.x <= b constraints."""
    if not h_rep:
        return []
    r = len(h_rep[0][0])
    verts = set()
    for sub in combinations(range(len(h_rep)), r):
        A = [list(h_rep[i][0]) for i in sub]
        b = [h_rep[i][1] for i in sub]
        if matrix_rank(A) != r:
            continue
        x = solve(A, b)
        if x is None:
            continue
        if all(vdot(vec(a), x) <= bb for a, bb in h_rep):
            verts.add(tuple(x))
    return sorted(verts)


def triangulate(vertices: Sequence[Vec]) -> List[List[Vec]]:
    """Triangulation of the convex hull of the given points into simplices of
    the hull's dimension, by recursive facet coning."""
    pts = sorted(set(vec(p) for p in vertices))
    origin, basis = affine_hull(pts)
    k = len(basis)
    if k == 0:
        return [[pts[0]]]
    if len(pts) == k + 1:
        return [list(pts)]
    # work in hull coordinates
    G = [[vdot(basis[i], basis[j]) for j in range(k)] for i in range(k)]
    coords = []
    for p in pts:
        d = vsub(p, origin)
        sol = solve(G, [vdot(basis[i], d) for i in range(k)])
        coords.append(vec(sol))
    back = {c: p for c, p in zip(coords, pts)}
    simplices_w = _triangulate_full_dim(coords)
    return [[back[c] for c in simplex] for simplex in simplices_w]


def _triangulate_full_dim(coords: List[Vec]) -> List[List[Vec]]:
    k = len(coords[0])
    if k == 1:
        lo = min(coords)
        hi = max(coords)
        return [[lo, hi]]
    apex = coords[0]
    _, facets = convex_hull_h_rep(coords)
    out: List[List[Vec]] = []
    for a, b in facets:
        if vdot(a, apex) == b:
            continue  # apex on facet: coned simplices are degenerate
        on_facet = [c for c in coords if vdot(a, c) == b]
        for sub in triangulate(on_facet):
            out.append([apex] + sub)
    return out


def integrate_polynomial_over_cell(poly, h_rep: Sequence[Constraint],
                                   vertices: Optional[Sequence[Vec]] = None
                                   ) -> Q:
    """Exact integral of a polynomial over a bounded cell via triangulation."""
    from .polyring import integrate_over_simplex
    verts = list(vertices) if vertices is not None else polytope_vertices(h_rep)
    if len(verts) <= len(h_rep[0][0]):
        return Q(0)
    total = Q(0)
    for simplex in triangulate(verts):
        if len(simplex) == len(verts[0]) + 1:
            total += integrate_over_simplex(poly, simplex)
    return total
