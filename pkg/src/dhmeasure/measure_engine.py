"""Piecewise-polynomial pushforward measures: single-summand wall-crossing
densities, cone densities, signed fixed-point sums, the derivative principle
with distributional wall layers, and exact mass/evaluation/serialization.

Conventions: the "+" side of a wall is where its covector increases; a wall
layer's frame (origin, basis, u) is lattice-normalized so that the ambient
measure factors as d(ambient) = d(wall coords) ^ d(ell)."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction as Q
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from ._exactlp import strict_interior_point
from ._linalg import (Vec, inverse, kernel_lattice_basis, matrix_rank, solve,
                      vdot, vec, vsub)
from .chambers import (Cell, ChamberComplex, Constraint, Crossing,
                       GeometryError, Wall, convex_hull_h_rep, enumerate_cells,
                       integrate_polynomial_over_cell, polytope_vertices,
                       singular_hyperplanes, split_cells, walk_to)
from .polyring import (Polynomial, cone_jump, integrate_over_simplex,
                       residue_jump)


class EngineError(ValueError):
    """Violated engine precondition."""


@dataclass(frozen=True)
class SignedPointMass:
    point: Tuple[Q, ...]
    sign: int
    weight: Q = Q(1)

    def __post_init__(self):
        object.__setattr__(self, "point", vec(self.point))
        object.__setattr__(self, "weight", Q(self.weight))


@dataclass
class DeltaLayer:
    """Codimension-one distributional layer g(w) * delta^(order) on a wall.

    ``density`` and ``support`` live in the wall coordinates w defined by
    x = origin + sum w_i basis_i + (ell(x) - offset) u."""

    ell: Tuple[int, ...]
    offset: Q
    origin: Vec
    basis: Tuple[Vec, ...]
    density: Polynomial
    support: Tuple[Constraint, ...]
    order: int = 0

    def point_at(self, w: Sequence[Q]) -> Vec:
        x = list(self.origin)
        for wi, b in zip(w, self.basis):
            for i in range(len(x)):
                x[i] += wi * b[i]
        return tuple(x)


@dataclass
class PiecewiseMeasure:
    """Finite list of (cell, polynomial density) pairs plus delta layers."""

    kind: str  # 'affine' or 'cone'
    frame: str
    cells: List[Cell]
    densities: List[Polynomial]
    layers: List[DeltaLayer] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.cells[0].interior_point) if self.cells else 0

    def cell_polynomial_at(self, point) -> Optional[Polynomial]:
        """Density polynomial of the cell strictly containing the point."""
        p = vec(point)
        for cell, dens in zip(self.cells, self.densities):
            if cell.contains(p):
                return dens
        return None

    def evaluate(self, point) -> Q:
        p = vec(point)
        poly = self.cell_polynomial_at(p)
        if poly is not None:
            return poly.evaluate(p)
        for cell in self.cells:
            if cell.contains(p, strict=False):
                raise EngineError("evaluation point lies on a cell boundary")
        return Q(0)  # outside the materialized region: zero by construction

    def total_mass(self) -> Q:
        total = Q(0)
        for cell, dens in zip(self.cells, self.densities):
            if dens.is_zero():
                continue
            if not cell.bounded:
                raise EngineError("total mass of an unbounded support")
            total += integrate_polynomial_over_cell(dens, list(cell.h_rep),
                                                    vertices=cell.vertices)
        for layer in self.layers:
            if layer.order != 0:
                raise EngineError("mass of a higher-order layer is undefined")
            if layer.density.is_zero():
                continue
            total += integrate_polynomial_over_cell(layer.density,
                                                    list(layer.support))
        return total


# ---------------------------------------------------------------------------
# wall frames
# ---------------------------------------------------------------------------

def wall_coordinate_frame(ell: Sequence[int], offset: Q
                          ) -> Tuple[Vec, List[Vec], Vec, List[Vec]]:
    """(origin, basis, u, dual_rows): lattice frame of the wall ell(x)=offset.

    The matrix [basis | u] is unimodular, so ambient Lebesgue measure splits as
    d(wall coords) ^ d(ell); dual_rows are the rows of its inverse (the first
    r-1 of them give the wall coordinates of x - origin)."""
    basis_int, u = kernel_lattice_basis(tuple(int(c) for c in ell))
    r = len(u)
    origin = tuple(Q(offset) * u[i] for i in range(r))
    cols = [[Q(basis_int[j][i]) for j in range(r - 1)] + [Q(u[i])]
            for i in range(r)]
    dual = inverse(cols)
    basis = [vec(b) for b in basis_int]
    return origin, basis, vec(u), [vec(row) for row in dual]


def _wall_coords(point: Vec, origin: Vec, dual_rows: List[Vec]) -> Vec:
    d = vsub(vec(point), origin)
    return tuple(vdot(row, d) for row in dual_rows[:-1])


def _pullback_to_wall(ambient_constraints: Sequence[Constraint], origin: Vec,
                      basis: List[Vec]) -> List[Constraint]:
    out: List[Constraint] = []
    for a, b in ambient_constraints:
        av = vec(a)
        row = tuple(vdot(av, bb) for bb in basis)
        rhs = Q(b) - vdot(av, origin)
        if all(x == 0 for x in row):
            continue  # parallel to the wall: either trivial or the wall itself
        out.append((row, rhs))
    return out


# ---------------------------------------------------------------------------
# density queries by generic walks (no global cell enumeration needed)
# ---------------------------------------------------------------------------

_WALL_CACHE: Dict[Tuple[str, Tuple[Vec, ...]], List[Wall]] = {}


def _walls_for(points: Sequence[Vec], kind: str) -> List[Wall]:
    key = (kind, tuple(points))
    if key not in _WALL_CACHE:
        _WALL_CACHE[key] = singular_hyperplanes(points, kind)
    return _WALL_CACHE[key]


def affine_density_query(weights: Sequence, point, salt: int = 0) -> Polynomial:
    """Local density polynomial of the simplex pushforward at a regular point,
    accumulated along a generic walk from the zero-density region."""
    pts = [vec(w) for w in weights]
    r = len(pts[0])
    walls = _walls_for(pts, "affine")
    crossings = walk_to(point, pts, "affine", walls=walls, salt=salt)
    poly = Polynomial.zero(r)
    for cr in crossings:
        if not cr.in_hull:
            continue
        jump = _affine_wall_jump(pts, cr.wall, cr.point, salt)
        poly = poly + (jump if cr.direction > 0 else -jump)
    return poly


def _affine_wall_jump(pts: List[Vec], wall: Wall, xpoint: Vec,
                      salt: int) -> Polynomial:
    r = len(pts[0])
    n = len(pts) - 1
    on = set(wall.on_wall_indices)
    off = [pts[i] for i in range(len(pts)) if i not in on]
    m = len(on)
    if r == 1:
        f_wall = Polynomial.constant(1, Q(1, math.factorial(m - 1)))
        return residue_jump(f_wall, (wall.offset,), off, wall.ell, n - 1)
    origin, basis, u, dual = wall_coordinate_frame(wall.ell, wall.offset)
    rec_weights = [_wall_coords(pts[i], origin, dual)
                   for i in sorted(on)]
    wx = _wall_coords(xpoint, origin, dual)
    f_w = affine_density_query(rec_weights, wx, salt=salt)
    # pull the wall polynomial back to ambient coordinates
    forms = [Polynomial.linear_form(dual[i], -vdot(dual[i], origin))
             for i in range(r - 1)]
    f_wall = f_w.compose(forms)
    return residue_jump(f_wall, pts[sorted(on)[0]], off, wall.ell, n - r)


def cone_density_query(generators: Sequence, point, salt: int = 0) -> Polynomial:
    """Local density polynomial of the orthant pushforward (cone picture)."""
    gens = [vec(g) for g in generators]
    r = len(gens[0])
    if r == 1:
        return _cone_base_polynomial(gens, vec(point))
    walls = _walls_for(gens, "cone")
    inward = [sum(g[i] for g in gens) for i in range(r)]
    outward = tuple(-c for c in inward)
    crossings = walk_to(point, gens, "cone", walls=walls, salt=salt,
                        outward=outward)
    poly = Polynomial.zero(r)
    for cr in crossings:
        if not cr.in_hull:
            continue
        jump = _cone_wall_jump(gens, cr.wall, cr.point, salt)
        poly = poly + (jump if cr.direction > 0 else -jump)
    return poly


def _cone_base_polynomial(gens: List[Vec], point: Vec) -> Polynomial:
    """Rank-one cone density: all generators on one side of 0."""
    signs = {1 if g[0] > 0 else -1 for g in gens if g[0] != 0}
    if len(signs) != 1 or any(g[0] == 0 for g in gens):
        raise EngineError("rank-one generators must lie on one open half-line")
    s = signs.pop()
    if point[0] * s <= 0:
        return Polynomial.zero(1)
    n = len(gens)
    c = Q(1)
    for g in gens:
        c /= abs(g[0])
    c /= math.factorial(n - 1)
    return (Polynomial.variable(1, 0) * s) ** (n - 1) * c


def _cone_wall_jump(gens: List[Vec], wall: Wall, xpoint: Vec,
                    salt: int) -> Polynomial:
    r = len(gens[0])
    on_idx = list(wall.on_wall_indices)
    off = [gens[i] for i in range(len(gens)) if i not in set(on_idx)]
    m = len(on_idx)
    origin, basis, u, dual = wall_coordinate_frame(wall.ell, Q(0))
    rec_gens = [_wall_coords(gens[i], origin, dual) for i in on_idx]
    wx = _wall_coords(xpoint, origin, dual)
    if r - 1 == 1:
        f_w = _cone_base_polynomial(rec_gens, wx)
    else:
        f_w = cone_density_query(rec_gens, wx, salt=salt)
    forms = [Polynomial.linear_form(dual[i]) for i in range(r - 1)]
    f_wall = f_w.compose(forms)
    return cone_jump(f_wall, off, wall.ell, wall_degree=m - (r - 1))


def minimal_affine_wall_jump(weights: Sequence, wall: Wall) -> Polynomial:
    """Closed-form jump across a wall containing exactly r weights:
    (1/|det[omega_1-omega_0, ..., omega_{r-1}-omega_0, u]|)
    * (prod_offwall ell(omega_k - omega_0))^-1 * ell(lam-omega_0)^{n-r}/(n-r)!

    Independent of the residue route; the two must agree on minimal walls."""
    from ._linalg import det
    pts = [vec(w) for w in weights]
    r = len(pts[0])
    on = sorted(wall.on_wall_indices)
    if len(on) != r:
        raise EngineError("not a minimal wall: expected exactly r weights on it")
    n = len(pts) - 1
    ellv = vec(wall.ell)
    w0 = pts[on[0]]
    origin, basis, u, dual = wall_coordinate_frame(wall.ell, wall.offset)
    cols = [vsub(pts[i], w0) for i in on[1:]] + [u]
    c = Q(1) / abs(det([[cols[j][i] for j in range(r)] for i in range(r)]))
    for i in range(len(pts)):
        if i not in on:
            c /= vdot(ellv, vsub(pts[i], w0))
    c /= math.factorial(n - r)
    form = Polynomial.linear_form(ellv, -Q(wall.offset))
    return c * form ** (n - r)


def projective_fixed_point_terms(weights: Sequence
                                 ) -> List[Tuple[SignedPointMass, List[Vec]]]:
    """Fixed-point data of the simplex pushforward for the signed-sum route:
    one term per weight, with the isotropy differences renormalized into the
    gamma-negative half-space and sign (-1)^(number of flipped differences).

    gamma is drawn deterministically and verified non-orthogonal to every
    difference of weights."""
    pts = [vec(w) for w in weights]
    if len(set(pts)) != len(pts):
        raise EngineError("fixed-point data needs multiplicity-one weights")
    r = len(pts[0])
    diffs = [vsub(q, p) for p in pts for q in pts if p != q]
    gamma = None
    for seed in range(64):
        base = 10007 + 2 * seed
        cand = vec([Q(base ** i, 99991) for i in range(r)])
        if all(vdot(cand, d) != 0 for d in diffs):
            gamma = cand
            break
    if gamma is None:
        raise EngineError("no generic renormalization direction found")
    terms: List[Tuple[SignedPointMass, List[Vec]]] = []
    for k, p in enumerate(pts):
        gens: List[Vec] = []
        flips = 0
        for l, q in enumerate(pts):
            if l == k:
                continue
            d = vsub(q, p)
            if vdot(gamma, d) > 0:
                d = tuple(-x for x in d)
                flips += 1
            gens.append(d)
        terms.append((SignedPointMass(p, (-1) ** flips), gens))
    return terms


# ---------------------------------------------------------------------------
# materialized measures
# ---------------------------------------------------------------------------

def single_summand_density(weights: Sequence, frame: str = "",
                           bounding: Optional[List[Constraint]] = None,
                           salt: int = 0) -> PiecewiseMeasure:
    """Pushforward density of the normalized simplex measure (total mass 1/n!)
    under t -> sum t_k omega_k, computed by wall-crossing walks.

    Requires multiplicity-one weights; repeated weights must go through the
    cone/fixed-point path instead."""
    pts = [vec(w) for w in weights]
    if len(set(pts)) != len(pts):
        raise EngineError("repeated weights: use the cone or fixed-point path")
    r = len(pts[0])
    n = len(pts) - 1
    cc = enumerate_cells(pts, "affine", bounding=bounding)
    densities = []
    for cell in cc.cells:
        poly = affine_density_query(pts, cell.interior_point, salt=salt)
        if poly.degree() > n - r:
            raise EngineError("density degree exceeds the dimension bound")
        densities.append(poly)
    out = PiecewiseMeasure("affine", frame, cc.cells, densities)
    out._adjacency = cc.adjacency  # type: ignore[attr-defined]
    return out


def cone_density(generators: Sequence, frame: str = "",
                 box_bound: Optional[Q] = None,
                 bounding: Optional[List[Constraint]] = None,
                 salt: int = 0) -> PiecewiseMeasure:
    """Piecewise homogeneous density of the pushforward of Lebesgue measure on
    the positive orthant along t -> sum t_k omega_k."""
    gens = [vec(g) for g in generators]
    r = len(gens[0])
    if matrix_rank(gens) != r:
        raise EngineError("generators do not span the ambient space")
    # proper cone: a strictly separating functional must exist
    rows = [[-c for c in g] for g in gens]
    if strict_interior_point(rows, [Q(0)] * len(gens)) is None:
        raise EngineError("generators span a cone containing a line")
    cc = enumerate_cells(gens, "cone", box_bound=box_bound, bounding=bounding)
    densities = []
    for cell in cc.cells:
        poly = cone_density_query(gens, cell.interior_point, salt=salt)
        if poly.degree() > len(gens) - r:
            raise EngineError("density degree exceeds the dimension bound")
        densities.append(poly)
    out = PiecewiseMeasure("cone", frame, cc.cells, densities)
    out._adjacency = cc.adjacency  # type: ignore[attr-defined]
    return out


def heckman_sum(terms: Sequence[Tuple[SignedPointMass, Sequence]],
                frame: str = "",
                bounding: Optional[List[Constraint]] = None,
                salt: int = 0) -> PiecewiseMeasure:
    """Signed sum of translated cone densities over fixed-point data, evaluated
    on the common refinement of all summand chamber complexes.

    Renormalization signs are caller-provided via the SignedPointMass entries.
    Summands whose generators span a proper subspace are carried as delta
    layers (codimension one only)."""
    if not terms:
        raise EngineError("no fixed-point terms")
    r = len(terms[0][0].point)
    full_terms: List[Tuple[SignedPointMass, List[Vec]]] = []
    layer_terms: List[Tuple[SignedPointMass, List[Vec]]] = []
    hyperplanes: Dict[Tuple[Tuple[int, ...], Q], None] = {}
    cone_cache: Dict[Tuple[Vec, ...], PiecewiseMeasure] = {}
    for mass, gens_in in terms:
        gens = [vec(g) for g in gens_in]
        if len(gens[0]) != r:
            raise EngineError("inconsistent frames across fixed-point terms")
        rank = matrix_rank(gens)
        if rank < r:
            if rank != r - 1:
                raise EngineError(
                    "degenerate summand of codimension > 1 is unsupported")
            layer_terms.append((mass, gens))
            continue
        rows = [[-c for c in g] for g in gens]
        if strict_interior_point(rows, [Q(0)] * len(gens)) is None:
            raise EngineError("a summand cone contains a line")
        full_terms.append((mass, gens))
        for w in _walls_for(tuple(gens), "cone"):
            hyperplanes[(w.ell, vdot(vec(w.ell), mass.point))] = None
    if bounding is None:
        B = Q(1)
        for mass, _ in terms:
            for c in mass.point:
                B = max(B, abs(c))
        B = B + 1
        bounding = []
        for i in range(r):
            e = tuple(Q(1) if j == i else Q(0) for j in range(r))
            bounding.append((e, B))
            bounding.append((tuple(-x for x in e), B))
    pseudo_walls = [Wall(ell, c, (), (), "affine")
                    for (ell, c) in sorted(hyperplanes)]
    cells = split_cells(list(bounding), pseudo_walls)
    densities = []
    for cell in cells:
        poly = Polynomial.zero(r)
        ip = vec(cell.interior_point)
        for mass, gens in full_terms:
            key = tuple(gens)
            if key not in cone_cache:
                cone_cache[key] = cone_density(gens, salt=salt)
            local = cone_cache[key].cell_polynomial_at(vsub(ip, mass.point))
            if local is None:
                local = cone_density_query(gens, vsub(ip, mass.point), salt=salt)
            shift = [Polynomial.linear_form(
                tuple(Q(1) if j == i else Q(0) for j in range(r)),
                -mass.point[i]) for i in range(r)]
            poly = poly + (mass.sign * mass.weight) * local.compose(shift)
        densities.append(poly)
    adjacency = _complex_adjacency(cells, pseudo_walls)
    out = PiecewiseMeasure("affine", frame, cells, densities)
    out._adjacency = adjacency  # type: ignore[attr-defined]
    for mass, gens in layer_terms:
        out.layers.append(_degenerate_summand_layer(mass, gens))
    return out


def _degenerate_summand_layer(mass: SignedPointMass,
                              gens: List[Vec]) -> DeltaLayer:
    """A summand supported on a translated hyperplane becomes a delta layer."""
    from ._linalg import nullspace, primitive_integer
    r = len(mass.point)
    if r != 2:
        raise EngineError("degenerate summands supported in dimension 2 only")
    ns = nullspace([list(g) for g in gens])  # covector killing the generators
    ell = primitive_integer(ns[0])
    offset = vdot(vec(ell), mass.point)
    origin, basis, u, dual = wall_coordinate_frame(ell, offset)
    dirs = [tuple(vdot(dual[k], g) for k in range(r - 1)) for g in gens]
    apex_w = _wall_coords(mass.point, origin, dual)
    poly = _cone_base_polynomial(dirs, dirs[0])  # valid branch of the 1D cone
    s = 1 if dirs[0][0] > 0 else -1
    shift = [Polynomial.linear_form((Q(1),), -apex_w[0])]
    density = (mass.sign * mass.weight) * poly.compose(shift)
    support: Tuple[Constraint, ...] = (((Q(-s),), -s * apex_w[0]),)
    return DeltaLayer(ell, offset, origin, tuple(basis), density, support)


def _complex_adjacency(cells: List[Cell], walls: Sequence[Wall]
                       ) -> List[Tuple[int, int, Wall]]:
    from .chambers import _facet_dim_ok, adjacency_from_signs
    if all(c.signs is not None and len(c.signs) == len(walls) for c in cells):
        return adjacency_from_signs(cells, walls)
    out = []
    for (i, c1), (j, c2) in combinations(list(enumerate(cells)), 2):
        for w in walls:
            if w.side(c1.interior_point) * w.side(c2.interior_point) != -1:
                continue
            if _facet_dim_ok(c1, c2, w):
                out.append((i, j, w))
    return out


def signed_dirac_convolve(points: Sequence[SignedPointMass],
                          m: PiecewiseMeasure,
                          bounding: Optional[List[Constraint]] = None
                          ) -> PiecewiseMeasure:
    """Signed sum of translates of a measure on the common refinement."""
    from ._linalg import primitive_integer
    r = m.dim
    hyperplanes: Dict[Tuple[Tuple[int, ...], Q], None] = {}
    for pm in points:
        for cell in m.cells:
            for a, b in cell.h_rep:
                av = vec(a)
                ell = primitive_integer(av)
                scalef = next(Q(e) / c for e, c in zip(ell, av) if c != 0)
                hyperplanes[(ell, (Q(b) + vdot(av, pm.point)) * scalef)] = None
    if bounding is None:
        B = Q(1)
        for (a, b) in hyperplanes:
            B = max(B, abs(b))
        B = B * r + 1
        bounding = []
        for i in range(r):
            e = tuple(Q(1) if j == i else Q(0) for j in range(r))
            bounding.append((e, B))
            bounding.append((tuple(-x for x in e), B))
    pseudo_walls = [Wall(ell, c, (), (), "affine")
                    for (ell, c) in sorted(hyperplanes)]
    cells = split_cells(list(bounding), pseudo_walls)
    densities = []
    for cell in cells:
        ip = vec(cell.interior_point)
        poly = Polynomial.zero(r)
        for pm in points:
            local = m.cell_polynomial_at(vsub(ip, pm.point))
            if local is None:
                continue
            shift = [Polynomial.linear_form(
                tuple(Q(1) if j == i else Q(0) for j in range(r)),
                -pm.point[i]) for i in range(r)]
            poly = poly + (pm.sign * pm.weight) * local.compose(shift)
        densities.append(poly)
    layers: List[DeltaLayer] = []
    for pm in points:
        for layer in m.layers:
            origin = tuple(layer.origin[i] + pm.point[i] for i in range(r))
            offset = layer.offset + vdot(vec(layer.ell), pm.point)
            layers.append(DeltaLayer(layer.ell, offset, origin, layer.basis,
                                     (pm.sign * pm.weight) * layer.density,
                                     layer.support, layer.order))
    return PiecewiseMeasure(m.kind, m.frame, cells, densities, layers)


def sliced_cone_density(weights: Sequence, multiplicities: Sequence[int],
                        frame: str = "",
                        bounding: Optional[List[Constraint]] = None,
                        salt: int = 0) -> PiecewiseMeasure:
    """Simplex pushforward for weights with multiplicities, via the lifted cone:
    generators (omega_i, 1) with repetition, sliced at height one.  The slice of
    the cone density is exactly the simplex measure with total mass 1/n!."""
    pts = [vec(w) for w in weights]
    r = len(pts[0])
    if len(multiplicities) != len(pts) or any(m < 1 for m in multiplicities):
        raise EngineError("need one positive multiplicity per weight")
    lifted: List[Vec] = []
    for p, mult in zip(pts, multiplicities):
        lifted.extend([tuple(p) + (Q(1),)] * mult)
    n = len(lifted) - 1
    from ._linalg import primitive_integer
    walls3 = _walls_for(tuple(lifted), "cone")
    seen: Dict[Tuple[Tuple[int, ...], Q], None] = {}
    sliced_walls: List[Wall] = []
    for w in walls3:
        ellx = w.ell[:r]
        if all(c == 0 for c in ellx):
            continue  # parallel to the slice: no trace on it
        ell = primitive_integer(ellx)
        scalef = next(Q(e) / c for e, c in zip(ell, ellx) if c != 0)
        key = (ell, -Q(w.ell[r]) * scalef)
        if key not in seen:
            seen[key] = None
            sliced_walls.append(Wall(key[0], key[1], (), (), "affine"))
    if bounding is None:
        _, bounding = convex_hull_h_rep(pts)
    cells = split_cells(list(bounding), sliced_walls)
    densities = []
    for cell in cells:
        ip = tuple(cell.interior_point) + (Q(1),)
        poly3 = cone_density_query(lifted, ip, salt=salt)
        poly = poly3.compose([Polynomial.variable(r, i) for i in range(r)]
                             + [Polynomial.constant(r, 1)])
        if poly.degree() > n - r:
            raise EngineError("density degree exceeds the dimension bound")
        densities.append(poly)
    out = PiecewiseMeasure("affine", frame, cells, densities)
    out._adjacency = adjacency_from_signs_local(cells, sliced_walls)
    return out


def adjacency_from_signs_local(cells, walls):
    from .chambers import adjacency_from_signs
    return adjacency_from_signs(cells, walls)


def multiply_polynomial(m: PiecewiseMeasure, p: Polynomial) -> PiecewiseMeasure:
    """Multiply a measure by an ambient-coordinate polynomial density."""
    densities = [d * p for d in m.densities]
    layers = []
    for layer in m.layers:
        if layer.order != 0:
            raise EngineError("cannot multiply a higher-order layer")
        imgs = [Polynomial.linear_form([b[i] for b in layer.basis],
                                       layer.origin[i]) for i in range(m.dim)]
        layers.append(replace(layer, density=layer.density * p.compose(imgs)))
    out = PiecewiseMeasure(m.kind, m.frame, m.cells, densities, layers)
    adj = getattr(m, "_adjacency", None)
    if adj is not None:
        out._adjacency = adj  # type: ignore[attr-defined]
    return out


def scale_measure(m: PiecewiseMeasure, c) -> PiecewiseMeasure:
    c = Q(c)
    return PiecewiseMeasure(
        m.kind, m.frame, m.cells, [d * c for d in m.densities],
        [replace(layer, density=layer.density * c) for layer in m.layers])


def affine_pushforward(m: PiecewiseMeasure, A: Sequence[Sequence],
                       b: Sequence, frame: str) -> PiecewiseMeasure:
    """Pushforward along the invertible affine map y = A x + b (mass-preserving:
    cell densities pick up 1/|det A|, layers the matching wall-frame factor)."""
    from ._linalg import det, primitive_integer
    r = m.dim
    Arows = [vec(row) for row in A]
    bv = vec(b)
    Ainv = [vec(row) for row in inverse(Arows)]
    adet = abs(det(Arows))

    def map_point(x: Vec) -> Vec:
        return tuple(vdot(Arows[i], x) + bv[i] for i in range(r))

    def pull_row(a: Vec) -> Vec:  # covector on y-space: a . Ainv
        return tuple(sum(a[i] * Ainv[i][j] for i in range(r)) for j in range(r))

    x_of_y = [Polynomial.linear_form(vec([Ainv[i][j] for j in range(r)]),
                                     -vdot(Ainv[i], bv)) for i in range(r)]
    cells = []
    densities = []
    for cell, dens in zip(m.cells, m.densities):
        h_rep = []
        for a, c in cell.h_rep:
            row = pull_row(vec(a))
            h_rep.append((row, Q(c) + vdot(row, bv)))
        verts = cell.vertices
        if verts is not None:
            verts = tuple(map_point(v) for v in verts)
        cells.append(Cell(tuple(h_rep), map_point(vec(cell.interior_point)),
                          cell.bounded, None, verts))
        densities.append(dens.compose(x_of_y) * (Q(1) / adet))
    layers = []
    for layer in m.layers:
        if layer.order != 0:
            raise EngineError("cannot push forward a higher-order layer")
        row = pull_row(vec(layer.ell))
        ell2 = primitive_integer(row)
        scalef = next(Q(e) / c for e, c in zip(ell2, row) if c != 0)
        off2 = (Q(layer.offset) + vdot(row, bv)) * scalef
        origin2, basis2, u2, dual2 = wall_coordinate_frame(ell2, off2)
        # express old wall coordinates as an affine function of the new ones
        x0 = tuple(vdot(Ainv[i], vsub(origin2, bv)) for i in range(r))
        Mcols = [tuple(sum(Ainv[i][k] * b2[k] for k in range(r))
                       for i in range(r)) for b2 in basis2]
        origin_old = layer.origin
        _, _, _, dual_old = wall_coordinate_frame(layer.ell, layer.offset)
        M = [[sum(dual_old[i][k] * Mcols[j][k] for k in range(r))
              for j in range(r - 1)] for i in range(r - 1)]
        m0 = [vdot(dual_old[i], vsub(x0, origin_old)) for i in range(r - 1)]
        mdet = abs(det(M))
        if mdet == 0:
            raise EngineError("degenerate layer transport")
        w_of_w2 = [Polynomial.linear_form(vec(M[i]), m0[i])
                   for i in range(r - 1)]
        density2 = layer.density.compose(w_of_w2) * mdet
        support2 = []
        for a, c in layer.support:
            rowM = tuple(sum(Q(a[i]) * M[i][j] for i in range(r - 1))
                         for j in range(r - 1))
            support2.append((rowM, Q(c) - sum(Q(a[i]) * m0[i]
                                              for i in range(r - 1))))
        layers.append(DeltaLayer(ell2, off2, origin2, tuple(basis2), density2,
                                 tuple(support2), 0))
    return PiecewiseMeasure(m.kind, frame, cells, densities, layers)


# ---------------------------------------------------------------------------
# derivative principle
# ---------------------------------------------------------------------------

def derivative_principle(m: PiecewiseMeasure, rd,
                         root_order: Optional[Sequence[int]] = None
                         ) -> PiecewiseMeasure:
    """Apply the product of directional derivatives along the negative roots
    distributionally, then restrict to the open positive chamber.

    Per-cell classical derivatives are taken everywhere; wherever the measure
    value jumps across a wall, a codimension-one delta layer is emitted with
    density (jump restricted to the wall) times ell(direction).  Iterated
    transversal derivatives raise the layer order; any layer of order >= 1
    surviving inside the open positive chamber is an error."""
    roots = list(rd.positive_roots)
    if root_order is not None:
        roots = [roots[i] for i in root_order]
    adjacency = getattr(m, "_adjacency", None)
    if adjacency is None:
        adjacency = _complex_adjacency(m.cells, _cell_walls(m.cells))
    cur_cells = m.cells
    cur_dens = list(m.densities)
    cur_layers = list(m.layers)
    for alpha in roots:
        v = tuple(-c for c in alpha)
        new_layers: List[DeltaLayer] = []
        # jumps across interior walls emit delta layers
        for i, j, w in adjacency:
            si = w.side(cur_cells[i].interior_point)
            plus, minus = (i, j) if si > 0 else (j, i)
            jump = cur_dens[plus] - cur_dens[minus]
            if jump.is_zero():
                continue
            ellv = vec(w.ell)
            lv = vdot(ellv, vec(v))
            if lv == 0:
                continue
            origin, basis, u, dual = wall_coordinate_frame(w.ell, w.offset)
            # restrict the jump to the wall and express it in wall coordinates
            imgs = [Polynomial.linear_form([basis[k][i2] for k in range(m.dim - 1)],
                                           origin[i2]) for i2 in range(m.dim)]
            jw = jump.compose(imgs)
            # the facet is (r-1)-dimensional by the adjacency criterion, so
            # the pulled-back support is full-dimensional in wall coordinates
            support = _pullback_to_wall(
                list(cur_cells[i].h_rep) + list(cur_cells[j].h_rep), origin,
                basis)
            new_layers.append(DeltaLayer(w.ell, w.offset, origin, tuple(basis),
                                         lv * jw, tuple(support), 0))
        # differentiate existing layers: tangential part keeps the order,
        # transversal part raises it
        for layer in cur_layers:
            origin, basis, u, dual = wall_coordinate_frame(layer.ell,
                                                           layer.offset)
            # decompose v in the layer frame
            cols = [[basis[k][i2] for k in range(m.dim - 1)] + [u[i2]]
                    for i2 in range(m.dim)]
            coeff = solve(cols, list(v))
            tang = Polynomial.zero(m.dim - 1)
            for k in range(m.dim - 1):
                if coeff[k]:
                    tang = tang + coeff[k] * layer.density.derivative(k)
            if not tang.is_zero():
                new_layers.append(replace(layer, density=tang))
            trans = coeff[m.dim - 1]
            if trans != 0 and not layer.density.is_zero():
                new_layers.append(replace(layer, density=trans * layer.density,
                                          order=layer.order + 1))
        cur_dens = [_dd(poly, v) for poly in cur_dens]
        cur_layers = new_layers
    out = PiecewiseMeasure(m.kind, m.frame, cur_cells, cur_dens, cur_layers)
    out._adjacency = adjacency  # type: ignore[attr-defined]
    return restrict_positive_chamber(out, rd, check_layers=True)


def _dd(poly: Polynomial, v: Sequence) -> Polynomial:
    from .polyring import directional_derivative
    return directional_derivative(poly, v)


def _cell_walls(cells: List[Cell]) -> List[Wall]:
    seen: Dict[Tuple[Tuple[int, ...], Q], None] = {}
    out = []
    for cell in cells:
        for a, b in cell.h_rep:
            av = vec(a)
            try:
                from ._linalg import primitive_integer
                ell = primitive_integer(av)
            except ValueError:
                continue
            scalef = next(Q(e) / c for e, c in zip(ell, av) if c != 0)
            key = (ell, Q(b) * scalef)
            if key not in seen:
                seen[key] = None
                out.append(Wall(ell, key[1], (), (), "affine"))
    return out


def restrict_positive_chamber(m: PiecewiseMeasure, rd,
                              check_layers: bool = False) -> PiecewiseMeasure:
    """Restrict to the open positive Weyl chamber (the positive orthant in
    fundamental-weight coordinates)."""
    r = m.dim
    orthant = [(tuple(Q(-1) if j == i else Q(0) for j in range(r)), Q(0))
               for i in range(r)]
    cells: List[Cell] = []
    densities: List[Polynomial] = []
    for cell, dens in zip(m.cells, m.densities):
        h_rep = list(cell.h_rep) + orthant
        ip = cell.interior_point
        if not all(c > 0 for c in ip):
            ip = strict_interior_point([a for a, _ in h_rep],
                                       [b for _, b in h_rep])
            if ip is None:
                continue
        verts = cell.vertices
        if verts is not None and not all(c >= 0 for v in verts for c in v):
            verts = None  # clipped by the orthant: vertex list invalidated
        cells.append(Cell(tuple(h_rep), tuple(ip), cell.bounded, None, verts))
        densities.append(dens)
    layers: List[DeltaLayer] = []
    for layer in m.layers:
        wall_orthant = _pullback_to_wall(orthant, layer.origin,
                                         list(layer.basis))
        # the orthant constraint parallel to the wall must hold on its interior
        ok = True
        for a, b in orthant:
            av = vec(a)
            if all(vdot(av, bb) == 0 for bb in layer.basis):
                if vdot(av, layer.origin) >= b:
                    ok = False
        if not ok:
            continue
        support = list(layer.support) + wall_orthant
        if strict_interior_point([a for a, _ in support],
                                 [b for _, b in support]) is None:
            continue
        if layer.density.is_zero():
            continue
        if check_layers and layer.order > 0:
            raise EngineError(
                "a derivative-of-delta layer survives in the open chamber")
        layers.append(replace(layer, support=tuple(support)))
    return PiecewiseMeasure(m.kind, m.frame, cells, densities, layers)


def total_mass(m: PiecewiseMeasure) -> Q:
    return m.total_mass()


def evaluate(m: PiecewiseMeasure, point) -> Q:
    return m.evaluate(point)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _q_str(x: Q) -> str:
    x = Q(x)
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def _q_parse(s) -> Q:
    return Q(s)


def measure_to_json(m: PiecewiseMeasure) -> dict:
    """Documented JSON schema: rationals are 'p/q' strings, never floats."""
    def poly_json(p: Polynomial) -> dict:
        return {"nvars": p.nvars,
                "terms": [[list(mono), _q_str(c)]
                          for mono, c in sorted(p.terms.items())]}

    def cons_json(cs) -> list:
        return [[[_q_str(x) for x in a], _q_str(b)] for a, b in cs]

    return {
        "schema": "piecewise-measure/1",
        "kind": m.kind,
        "frame": m.frame,
        "dim": m.dim,
        "cells": [{
            "h_rep": cons_json(cell.h_rep),
            "interior_point": [_q_str(x) for x in cell.interior_point],
            "bounded": cell.bounded,
            "density": poly_json(dens),
        } for cell, dens in zip(m.cells, m.densities)],
        "delta_layers": [{
            "ell": list(layer.ell),
            "offset": _q_str(layer.offset),
            "origin": [_q_str(x) for x in layer.origin],
            "basis": [[_q_str(x) for x in b] for b in layer.basis],
            "density": poly_json(layer.density),
            "support": cons_json(layer.support),
            "order": layer.order,
        } for layer in m.layers],
    }


def measure_from_json(data: dict) -> PiecewiseMeasure:
    if data.get("schema") != "piecewise-measure/1":
        raise ValueError("unknown measure schema")

    def poly_parse(d) -> Polynomial:
        return Polynomial(d["nvars"],
                          {tuple(mono): _q_parse(c) for mono, c in d["terms"]})

    def cons_parse(cs):
        return [(vec([_q_parse(x) for x in a]), _q_parse(b)) for a, b in cs]

    cells = []
    densities = []
    for cd in data["cells"]:
        cells.append(Cell(tuple(cons_parse(cd["h_rep"])),
                          vec([_q_parse(x) for x in cd["interior_point"]]),
                          cd["bounded"]))
        densities.append(poly_parse(cd["density"]))
    layers = []
    for ld in data["delta_layers"]:
        layers.append(DeltaLayer(tuple(ld["ell"]), _q_parse(ld["offset"]),
                                 vec([_q_parse(x) for x in ld["origin"]]),
                                 tuple(vec([_q_parse(x) for x in b])
                                       for b in ld["basis"]),
                                 poly_parse(ld["density"]),
                                 tuple(cons_parse(ld["support"])),
                                 ld["order"]))
    return PiecewiseMeasure(data["kind"], data["frame"], cells, densities,
                            layers)


def measures_equal(a: PiecewiseMeasure, b: PiecewiseMeasure) -> bool:
    """Exact equality as measures on their common domain: compares densities at
    each other's cell interior points and layer data up to ordering."""
    for cell, dens in zip(a.cells, a.densities):
        other = b.cell_polynomial_at(cell.interior_point)
        if other is None:
            if not dens.is_zero():
                return False
        elif other != dens:
            return False
    for cell, dens in zip(b.cells, b.densities):
        other = a.cell_polynomial_at(cell.interior_point)
        if other is None and not dens.is_zero():
            return False
    def layer_key(layer: DeltaLayer):
        return (layer.ell, layer.offset, layer.order)
    la = sorted(a.layers, key=layer_key)
    lb = sorted(b.layers, key=layer_key)
    if len(la) != len(lb):
        return False
    for x, y in zip(la, lb):
        if layer_key(x) != layer_key(y) or x.density != y.density:
            return False
    return True
