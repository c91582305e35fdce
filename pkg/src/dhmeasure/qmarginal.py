"""Joint eigenvalue distributions of one-body reduced density matrices of
random quantum states.

A MarginalProblem pairs a representation (distinguishable subsystems, bosons,
fermions, a one-sided bipartite system, or any of these with an adjoined
environment factor) with a global state: Haar-random pure (PureFS) or uniform
on the isospectral manifold of a fixed density-matrix spectrum
(CoadjointOrbit).  The eigenvalue distribution is the exact
piecewise-polynomial probability measure on the reduced spectra; its support is
the solution of the one-body marginal problem (the moment polytope)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction as Q
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ._linalg import Vec, matrix_rank, vdot, vec, vsub
from .chambers import (Constraint, convex_hull_h_rep,
                       integrate_polynomial_over_cell, polytope_vertices)
from .measure_engine import (EngineError, PiecewiseMeasure, SignedPointMass,
                             affine_pushforward, derivative_principle,
                             heckman_sum, multiply_polynomial, scale_measure,
                             single_summand_density, sliced_cone_density)
from .polyring import Polynomial, directional_derivative
from .rootdata import (GroupSpec, RationalVector, RepSpec, RootData,
                       build_root_data, coords_of, epsilon_matrix,
                       volume_polynomial, weights_of, weyl_orbit_signed,
                       _eps_to_omega)


class AssumptionError(EngineError):
    """The problem violates the non-degeneracy assumption (the reduced-spectra
    support lies inside a Weyl-chamber wall); the standard remedy is to pass to
    the purified double."""


@dataclass(frozen=True)
class PureFS:
    """Global state drawn from the unitary-invariant (Fubini-Study) measure on
    pure states."""


@dataclass(frozen=True)
class CoadjointOrbit:
    """Global state drawn uniformly from the unitary orbit of density matrices
    with the given eigenvalue spectrum (nonincreasing, trace one)."""

    spectrum: Tuple[Q, ...]

    def __post_init__(self):
        object.__setattr__(self, "spectrum", vec(self.spectrum))
        s = self.spectrum
        if any(s[i] < s[i + 1] for i in range(len(s) - 1)) or any(c < 0 for c in s):
            raise ValueError("spectrum must be nonincreasing and nonnegative")
        if sum(s) != 1:
            raise ValueError("spectrum must sum to one")


GlobalState = Union[PureFS, CoadjointOrbit]


@dataclass(frozen=True)
class SpectrumTuple:
    """One nonincreasing trace-one spectrum per tracked subsystem."""

    spectra: Tuple[Tuple[Q, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "spectra",
                           tuple(vec(s) for s in self.spectra))


@dataclass(frozen=True)
class MarginalProblem:
    rep: RepSpec
    global_state: GlobalState = field(default_factory=PureFS)

    @property
    def group(self) -> GroupSpec:
        """The symmetry group whose one-body spectra are reported."""
        return self.rep.symmetry_group


# ---------------------------------------------------------------------------
# coordinate frames: Weyl (fundamental-weight) vs spectra
# ---------------------------------------------------------------------------


def _check_spectrum(s: Vec, d: int) -> None:
    if len(s) != d:
        raise ValueError(f"expected a spectrum of length {d}")
    if sum(s) != 1:
        raise ValueError("spectrum must sum to one")
    if any(s[i] < s[i + 1] for i in range(d - 1)):
        raise ValueError("spectrum must be nonincreasing")


def to_weyl(group: GroupSpec, spectra) -> RationalVector:
    """Exact bijection from subsystem spectra to positive-Weyl-chamber
    coordinates: with x = spectrum - 1/d, the fundamental coordinates are
    c_k = x_k - x_{k+1}."""
    if isinstance(spectra, SpectrumTuple):
        spectra = spectra.spectra
    spectra = [vec(s) for s in spectra]
    if len(spectra) != len(group.factors):
        raise ValueError("need one spectrum per factor")
    out: List[Q] = []
    for s, d in zip(spectra, group.factors):
        _check_spectrum(s, d)
        out.extend(s[k] - s[k + 1] for k in range(d - 1))
    return RationalVector(tuple(out), group.frame)


def to_spectrum(group: GroupSpec, weyl) -> SpectrumTuple:
    """Inverse of to_weyl: spectrum = 1/d + epsilon-coordinate expansion."""
    cv = coords_of(weyl)
    if isinstance(weyl, RationalVector) and weyl.frame not in ("", group.frame):
        raise ValueError(f"coordinates are in frame {weyl.frame!r}, "
                         f"expected {group.frame!r}")
    out = []
    for (start, stop), d in zip(group.coord_slices(), group.factors):
        block = cv[start:stop]
        if any(c < 0 for c in block):
            raise ValueError("point lies outside the positive chamber")
        M = epsilon_matrix(d)
        out.append(tuple(Q(1, d) + vdot(M[i], block) for i in range(d)))
    return SpectrumTuple(tuple(out))


def spectra_frame(group: GroupSpec) -> str:
    return "spec:" + group.frame

def _spectra_map(group: GroupSpec) -> Tuple[List[List[Q]], List[Q]]:
    """Block-diagonal affine map from Weyl coordinates to the spectra chart
    (the first d-1 eigenvalues of each subsystem)."""
    r = group.rank
    A = [[Q(0)] * r for _ in range(r)]
    b = [Q(0)] * r
    for (start, stop), d in zip(group.coord_slices(), group.factors):
        M = epsilon_matrix(d)
        for i in range(d - 1):
            b[start + i] = Q(1, d)
            for k in range(d - 1):
                A[start + i][start + k] = M[i][k]
    return A, b


# ---------------------------------------------------------------------------
# assumption screening
# ---------------------------------------------------------------------------


def assumption_check(problem: MarginalProblem) -> None:
    """Raise AssumptionError when the reduced spectra are forced onto a
    Weyl-chamber wall (the weights fail to span affinely), with a purification
    hint.  For tensor problems with an environment factor the sharp dimension
    criterion d_env <= prod d_i + 1 is screened as well."""
    rep = problem.rep
    pts = [w.coords for w, _ in weights_of(rep)]
    r = rep.symmetry_group.rank
    diffs = [vsub(p, pts[0]) for p in pts[1:]]
    if matrix_rank(diffs) < r:
        raise AssumptionError(
            "the weights do not span the dual torus algebra affinely, so every "
            "reduced spectrum is degenerate; pass to purified_double(problem)")
    if rep.kind == "tensor":
        dims = list(rep.group.factors)
        total = rep.dim_hilbert
        for j, d in enumerate(dims):
            rest = total // d
            # a reduced density matrix has rank at most the dimension of the
            # complementary factor, so more than one forced zero eigenvalue
            # pins the spectrum to a chamber wall
            if d > rest + 1:
                raise AssumptionError(
                    f"factor {j} has dimension {d} > {rest} + 1 "
                    "(the complementary dimension), so its reduced spectrum "
                    "is always degenerate; trace it out or enlarge the rest")
        if rep.env is not None and rep.env > (total // rep.env) + 1:
            raise AssumptionError(
                f"environment dimension {rep.env} exceeds "
                f"{total // rep.env} + 1, so its reduced spectrum is always "
                "degenerate")


def purified_double(problem: MarginalProblem) -> MarginalProblem:
    """Adjoin one distinguishable particle carrying a copy of the full Hilbert
    space; the global state becomes Haar-random pure.  The distribution of the
    original mixed-state problem is the slice of the purified one at the global
    spectrum (see sliced_purified_density)."""
    rep = problem.rep
    if rep.env is not None:
        raise ValueError("problem already carries an environment factor")
    return MarginalProblem(
        RepSpec(rep.group, rep.kind, rep.power, rep.highest_weight,
                env=rep.dim_hilbert),
        PureFS())


# ---------------------------------------------------------------------------
# Abelian stage
# ---------------------------------------------------------------------------


def _positive_box(pts: Sequence[Vec], r: int) -> List[Constraint]:
    B = max((c for p in pts for c in p), default=Q(0)) + 1
    box: List[Constraint] = []
    for i in range(r):
        e = tuple(Q(1) if j == i else Q(0) for j in range(r))
        ne = tuple(-c for c in e)
        box.append((ne, Q(0)))
        box.append((e, B))
    return box


def orbit_fixed_point_terms(rep: RepSpec, spectrum: Sequence[Q]
                            ) -> Tuple[List[Tuple[SignedPointMass, List[Vec]]], Q]:
    """Signed fixed-point data of the torus pushforward for a coadjoint orbit
    global state, together with the orbit's Liouville volume.

    One term per Weyl image of the global spectrum; the translation point is
    the projection sum_I y_I omega_I of the permuted diagonal entries, and the
    cone generators are the projected negated positive roots omega_J - omega_I
    (I < J in the weight-basis order)."""
    n = rep.dim_hilbert
    spec = vec(spectrum)
    _check_spectrum(spec, n)
    if any(spec[i] == spec[i + 1] for i in range(n - 1)):
        raise AssumptionError(
            "the global spectrum is degenerate; perturb it or pass to "
            "purified_double(problem)")
    ws = [w.coords for w, m in weights_of(rep) for _ in range(m)]
    r = len(ws[0])
    gens: List[Vec] = []
    for i in range(n):
        for j in range(i + 1, n):
            g = vsub(ws[j], ws[i])
            if all(c == 0 for c in g):
                raise AssumptionError(
                    "two basis states share the same one-body weight; pass to "
                    "purified_double(problem)")
            gens.append(g)
    x_eps = tuple(s - Q(1, n) for s in spec)
    rd_h = build_root_data(GroupSpec((n,)))
    lam_h = _eps_to_omega(n, x_eps)
    vol = volume_polynomial(rd_h).evaluate(lam_h)
    M = epsilon_matrix(n)
    terms: List[Tuple[SignedPointMass, List[Vec]]] = []
    for image, sign in weyl_orbit_signed(rd_h, RationalVector(lam_h, "su" + str(n))):
        y = [vdot(M[i], image.coords) for i in range(n)]
        point = tuple(sum(y[i] * ws[i][k] for i in range(n)) for k in range(r))
        terms.append((SignedPointMass(point, sign), gens))
    return terms, vol


def abelian_distribution(problem: MarginalProblem,
                         bounding: Optional[List[Constraint]] = None,
                         positive_box: bool = False
                         ) -> Tuple[PiecewiseMeasure, Q]:
    """Torus-pushforward measure of the problem's invariant global measure,
    together with the Liouville volume of the global state manifold (so that
    measure/volume is the distribution of the diagonal entries of the reduced
    density matrices, in Weyl coordinates)."""
    rep = problem.rep
    group = rep.symmetry_group
    r = group.rank
    assumption_check(problem)
    wlist = weights_of(rep)
    pts = [w.coords for w, _ in wlist]
    if bounding is None:
        if positive_box:
            bounding = _positive_box(pts, r)
        else:
            eqs, bounding = convex_hull_h_rep(pts)
            if eqs:
                raise AssumptionError("the weights do not span affinely")
    if isinstance(problem.global_state, CoadjointOrbit):
        if rep.kind != "tensor" or rep.env is not None:
            raise EngineError(
                "coadjoint-orbit global states are implemented for tensor "
                "representations; otherwise pass to the purified double")
        terms, vol = orbit_fixed_point_terms(rep, problem.global_state.spectrum)
        measure = heckman_sum(terms, group.frame, bounding=bounding)
        return measure, vol
    n = rep.dim_hilbert - 1
    vol = Q(1, factorial(n))
    if all(m == 1 for _, m in wlist):
        return single_summand_density(pts, group.frame, bounding=bounding), vol
    return sliced_cone_density(pts, [m for _, m in wlist],
                               group.frame, bounding=bounding), vol


# ---------------------------------------------------------------------------
# eigenvalue distributions
# ---------------------------------------------------------------------------


def _kappa_matrix(rep: RepSpec) -> List[List[Q]]:
    """Diagonal rescaling kappa(lambda) = lambda/N on the indistinguishable
    block (the moment map of the diagonal action counts each particle once);
    env coordinates are left untouched."""
    group = rep.symmetry_group
    r = group.rank
    base_rank = rep.group.factors[0] - 1
    return [[(Q(1, rep.power) if i < base_rank else Q(1)) if i == j else Q(0)
             for j in range(r)] for i in range(r)]


def eigenvalue_distribution(problem: MarginalProblem, frame: str = "spectra",
                            _unnormalized_weyl: bool = False) -> PiecewiseMeasure:
    """Exact joint probability distribution of the one-body reduced spectra.

    frame='spectra': coordinates are the first d-1 eigenvalues of each
    subsystem.  frame='weyl': positive-Weyl-chamber coordinates (for
    indistinguishable particles these are already rescaled by 1/N)."""
    rep = problem.rep
    group = rep.symmetry_group
    rd = build_root_data(group)
    abelian, vol = abelian_distribution(problem, positive_box=True)
    na = derivative_principle(abelian, rd)
    prob = scale_measure(multiply_polynomial(na, volume_polynomial(rd)),
                         Q(1) / vol)
    mass = prob.total_mass()
    if mass == 0:
        # all densities and codimension-one layers vanished: the joint law
        # concentrates in codimension two or higher (e.g. a bipartite pure
        # state with unequal local dimensions, where one spectrum determines
        # the other together with forced zeros)
        raise AssumptionError(
            "the joint spectra concentrate in codimension two or higher, "
            "which the piecewise representation cannot carry; track fewer "
            "factors (e.g. a onesided problem) or purify")
    if mass != 1:
        raise EngineError(f"probability normalization failed: mass {mass}")
    if not _unnormalized_weyl and rep.kind in ("sym", "alt"):
        prob = affine_pushforward(prob, _kappa_matrix(rep),
                                  [Q(0)] * group.rank, group.frame)
    if frame == "weyl":
        return prob
    if frame != "spectra":
        raise ValueError("frame must be 'spectra' or 'weyl'")
    A, b = _spectra_map(group)
    return affine_pushforward(prob, A, b, spectra_frame(group))


def sliced_purified_density(problem: MarginalProblem, point) -> Q:
    """Density of the mixed-state problem, recovered from its purified double.

    The purified joint density at (marginal point, global spectrum) equals
    (1/Z) p^2(global spectrum) times the mixed-state density, with p the
    symplectic volume polynomial of the unitary group of the global space and
    Z the polytope integral of p^2."""
    if not isinstance(problem.global_state, CoadjointOrbit):
        raise ValueError("expected a coadjoint-orbit problem")
    from .measure_engine import affine_density_query
    rep = problem.rep
    n = rep.dim_hilbert
    pure = purified_double(MarginalProblem(rep, PureFS()))
    group = pure.rep.symmetry_group
    rd = build_root_data(group)
    spec = problem.global_state.spectrum
    x_eps = tuple(s - Q(1, n) for s in spec)
    lam_h = _eps_to_omega(n, x_eps)
    full = tuple(coords_of(point)) + tuple(lam_h)
    # local Abelian polynomial via a single wall-crossing walk, then the
    # classical part of the derivative principle (valid at interior points of
    # a chamber, where no delta layer passes through)
    ws = [w.coords for w, _ in weights_of(pure.rep)]
    g = affine_density_query(ws, full)
    for alpha in rd.positive_roots:
        g = directional_derivative(g, tuple(-c for c in alpha))
    nH = len(ws) - 1
    joint_val = (g.evaluate(full) * volume_polynomial(rd).evaluate(full)
                 * factorial(nH))
    p_h = volume_polynomial(build_root_data(GroupSpec((n,))))
    # Z = integral of p^2 over the density-matrix simplex in Weyl coordinates
    eqs, simplex = convex_hull_h_rep(
        [_eps_to_omega(n, tuple((Q(1) if j == i else Q(0)) - Q(1, n)
                                for j in range(n))) for i in range(n)])
    if eqs:
        raise EngineError("degenerate spectrum simplex")
    # the hull of the coordinate spectra is the union of the n! Weyl images of
    # the ordered-spectra chamber, and p^2 is Weyl-invariant
    Z = integrate_polynomial_over_cell(p_h * p_h, simplex) / factorial(n)
    return joint_val * Z / (p_h.evaluate(lam_h) ** 2)


# ---------------------------------------------------------------------------
# moment polytope
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentPolytope:
    """Support of the eigenvalue distribution: the solution of the one-body
    quantum marginal problem, in Weyl coordinates."""

    equalities: Tuple[Tuple[Vec, Q], ...]
    inequalities: Tuple[Constraint, ...]
    vertices: Tuple[Vec, ...]
    chambers: Tuple[Tuple[Constraint, ...], ...]

    def contains(self, point, strict: bool = False) -> bool:
        p = vec(point)
        for a, c in self.equalities:
            if vdot(a, p) != c:
                return False
        for a, c in self.inequalities:
            v = vdot(a, p)
            if v > c or (strict and v == c):
                return False
        return True


def moment_polytope(problem: MarginalProblem) -> MomentPolytope:
    """Union of the closures of the chambers carrying nonzero density (cells
    and delta-layer supports); verified to be convex, else a diagnostic error
    is raised."""
    rep = problem.rep
    group = rep.symmetry_group
    rd = build_root_data(group)
    abelian, _ = abelian_distribution(problem, positive_box=True)
    na = derivative_principle(abelian, rd)
    if rep.kind in ("sym", "alt"):
        na = affine_pushforward(na, _kappa_matrix(rep),
                                [Q(0)] * group.rank, group.frame)
    verts: List[Vec] = []
    chambers: List[Tuple[Constraint, ...]] = []
    zero_cells: List[Vec] = []
    for cell, dens in zip(na.cells, na.densities):
        if dens.is_zero():
            zero_cells.append(cell.interior_point)
            continue
        vs = cell.vertices if cell.vertices is not None else \
            tuple(polytope_vertices(list(cell.h_rep)))
        verts.extend(vs)
        chambers.append(cell.h_rep)
    for layer in na.layers:
        for w in polytope_vertices(list(layer.support)):
            verts.append(layer.point_at(w))
    if not verts:
        raise EngineError("the distribution has empty support")
    dedup = sorted(set(verts))
    eqs, ineqs = convex_hull_h_rep(dedup)
    hull_vertices = [v for v in dedup
                     if sum(1 for a, c in ineqs if vdot(a, v) == c)
                     >= len(dedup[0]) - len(eqs)]
    poly = MomentPolytope(tuple(eqs), tuple(ineqs), tuple(hull_vertices),
                          tuple(chambers))
    for ip in zero_cells:
        if poly.contains(ip, strict=True):
            raise EngineError(
                "support is not convex: a zero-density chamber lies strictly "
                "inside the hull of the support")
    return poly


# ---------------------------------------------------------------------------
# averages
# ---------------------------------------------------------------------------


def _pair_measure(m: PiecewiseMeasure, f: Polynomial) -> Q:
    """Exact integral of the polynomial f against the measure."""
    total = Q(0)
    for cell, dens in zip(m.cells, m.densities):
        g = dens * f
        if g.is_zero():
            continue
        total += integrate_polynomial_over_cell(
            g, list(cell.h_rep), vertices=cell.vertices)
    for layer in m.layers:
        if layer.order != 0:
            raise EngineError("cannot average against a higher-order layer")
        imgs = [Polynomial.linear_form([b[i] for b in layer.basis],
                                       layer.origin[i]) for i in range(m.dim)]
        g = layer.density * f.compose(imgs)
        if g.is_zero():
            continue
        total += integrate_polynomial_over_cell(g, list(layer.support))
    return total


def _is_weyl_invariant(group: GroupSpec, f: Polynomial) -> bool:
    """Whether the polynomial (in Weyl coordinates) is fixed by every simple
    reflection s_i: c_j -> c_j - C_{ji} c_i with C the (type A) Cartan
    matrix of each factor."""
    r = group.rank
    for start, stop in group.coord_slices():
        for i in range(start, stop):
            images = []
            for j in range(r):
                x = Polynomial.variable(r, j)
                if j == i:
                    x = x * Q(-1)
                elif start <= j < stop and abs(j - i) == 1:
                    x = x + Polynomial.variable(r, i)
                images.append(x)
            if f.compose(images) != f:
                return False
    return True


def average_against_distribution(problem: MarginalProblem, f: Polynomial,
                                 frame: str = "spectra") -> Q:
    """Exact expectation of an arbitrary polynomial observable, by direct
    integration against the eigenvalue distribution (single route; use
    average_functional for the dual-route variant, which is restricted to
    Weyl-invariant observables)."""
    return _pair_measure(eigenvalue_distribution(problem, frame=frame), f)


def average_functional(problem: MarginalProblem, f: Polynomial,
                       frame: str = "spectra") -> Q:
    """Exact expectation of a polynomial observable of the reduced spectra.

    Computed along two independent routes that must agree exactly:
    (a) integration against the eigenvalue distribution, and (b) the Abelian
    pairing E[f] = <torus measure, prod_{alpha>0} d_alpha (p_K f)> / (|W| vol),
    which never materializes the non-Abelian measure."""
    rep = problem.rep
    group = rep.symmetry_group
    rd = build_root_data(group)
    r = group.rank
    if frame == "spectra":
        A, b = _spectra_map(group)
        f_weyl_unit = f.compose([
            Polynomial.linear_form([A[i][j] for j in range(r)], b[i])
            for i in range(r)])
    elif frame == "weyl":
        f_weyl_unit = f
    else:
        raise ValueError("frame must be 'spectra' or 'weyl'")
    if not _is_weyl_invariant(group, f_weyl_unit):
        # the Abelian pairing only sees the Weyl symmetrization of the
        # observable, so the two routes can agree only on invariant ones
        raise ValueError(
            "the observable is not symmetric under reordering each "
            "subsystem's eigenvalues; use average_against_distribution for "
            "general polynomials")
    # route (a): integrate against the distribution in the requested frame
    dist = eigenvalue_distribution(problem, frame=frame)
    val_a = _pair_measure(dist, f)
    # route (b): Abelian pairing on the unscaled Weyl-coordinate measure
    if rep.kind in ("sym", "alt"):
        K = _kappa_matrix(rep)
        f_weyl = f_weyl_unit.compose([
            Polynomial.variable(r, i) * K[i][i] for i in range(r)])
    else:
        f_weyl = f_weyl_unit
    abelian, vol = abelian_distribution(problem)
    g = volume_polynomial(rd) * f_weyl
    for alpha in rd.positive_roots:
        g = directional_derivative(g, alpha)
    val_b = _pair_measure(abelian, g) / (rd.weyl_group_size * vol)
    if val_a != val_b:
        raise EngineError(
            f"average routes disagree: distribution route {val_a}, "
            f"Abelian pairing {val_b}")
    return val_a


def average_numeric(problem: MarginalProblem, fn, order: int = 24,
                    frame: str = "spectra") -> Tuple[float, float]:
    """APPROXIMATE average of an arbitrary scalar function of the reduced
    spectra (e.g. von Neumann entropy), by fixed-order Gauss-Legendre
    quadrature over a simplicial decomposition of each chamber.

    Returns (value, error estimate); the estimate is the difference against a
    lower-order rule.  Exact polynomial observables should use
    average_functional instead."""
    import numpy as np

    dist = eigenvalue_distribution(problem, frame=frame)

    def quad(n_noes: int) -> float:
        total = 0.0
        for cell, dens in zip(dist.cells, dist.densities):
            if dens.is_zero():
                continue
            vs = cell.vertices if cell.vertices is not None else \
                tuple(polytope_vertices(list(cell.h_rep)))
            total += _simplex_quad(vs, dens, fn, n_noes, np)
        for layer in dist.layers:
            vs = tuple(polytope_vertices(list(layer.support)))

            def flayer(w, layer=layer):
                return fn([float(c) for c in layer.point_at(
                    [Q(x).limit_denominator(10**12) for x in w])])

            total += _simplex_quad(vs, layer.density, flayer, n_noes, np)
        return total

    hi = quad(order)
    lo = quad(max(2, order - 8))
    return hi, abs(hi - lo)


def _simplex_quad(vertices, density: Polynomial, fn, order: int, np) -> float:
    """Gauss-Legendre quadrature of density*fn over the convex hull of the
    vertices: a segment, a simplex, or a planar polygon (fanned after angular
    sorting), via the Duffy cube-to-simplex map."""
    import math as _math

    dedup = sorted(set(tuple(v) for v in vertices))
    verts = [np.array([float(c) for c in v]) for v in dedup]
    amb = len(verts[0])
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes = (nodes + 1.0) / 2.0
    weights = weights / 2.0

    def dens_at(x) -> float:
        return float(density.evaluate([Q(c).limit_denominator(10**12)
                                       for c in x]))

    v0 = verts[0]
    edges = [v - v0 for v in verts[1:]]
    dim = int(np.linalg.matrix_rank(np.array(edges), tol=1e-12)) if edges else 0
    if dim == 0:
        return 0.0
    if dim == 1:
        far = max(edges, key=lambda e: float(e @ e))
        length = float(np.linalg.norm(far))
        total = 0.0
        for u, w in zip(nodes, weights):
            x = v0 + u * far
            total += w * length * dens_at(x) * fn(list(x))
        return total
    if len(verts) == dim + 1:
        simplices = [edges]
    elif dim == 2:
        # fan a convex polygon around its centroid after angular sorting
        centroid = sum(verts) / len(verts)
        b1 = edges[0] / np.linalg.norm(edges[0])
        b2 = None
        for e in edges[1:]:
            p = e - (e @ b1) * b1
            if np.linalg.norm(p) > 1e-12:
                b2 = p / np.linalg.norm(p)
                break
        ordered = sorted(verts, key=lambda v: _math.atan2(
            float((v - centroid) @ b2), float((v - centroid) @ b1)))
        simplices = []
        for i in range(len(ordered)):
            a, b = ordered[i], ordered[(i + 1) % len(ordered)]
            simplices.append([a - centroid, b - centroid])
        v0 = centroid
    else:
        raise NotImplementedError(
            "numeric quadrature over non-simplicial chambers is implemented "
            "up to dimension 2")
    total = 0.0
    for E in simplices:
        E = np.array(E)
        G = E @ E.T
        vol = abs(float(np.linalg.det(G))) ** 0.5 if E.shape[0] != amb \
            else abs(float(np.linalg.det(E)))
        if vol < 1e-14:
            continue
        idx = np.indices([len(nodes)] * dim).reshape(dim, -1)
        for flat in idx.T:
            u = nodes[flat]
            w = float(np.prod(weights[flat]))
            bary = np.zeros(dim)
            scale = 1.0
            jac = 1.0
            for k in range(dim):
                bary[k] = scale * u[k]
                jac *= scale
                scale *= (1.0 - u[k])
            x = v0 + bary @ E
            total += w * jac * vol * dens_at(x) * fn(list(x))
    return total


# ---------------------------------------------------------------------------
# problem serialization
# ---------------------------------------------------------------------------


def _q_str(x: Q) -> str:
    return f"{x.numerator}/{x.denominator}"


def problem_to_json(problem: MarginalProblem) -> str:
    rep = problem.rep
    data: Dict[str, object] = {
        "schema": "marginal-problem/1",
        "factors": list(rep.group.factors),
        "kind": rep.kind,
        "power": rep.power,
    }
    if rep.highest_weight is not None:
        data["highest_weight"] = list(rep.highest_weight)
    if rep.env is not None:
        data["env"] = rep.env
    gs = problem.global_state
    if isinstance(gs, CoadjointOrbit):
        data["global_state"] = {"orbit": [_q_str(c) for c in gs.spectrum]}
    else:
        data["global_state"] = "pure"
    return json.dumps(data, indent=1)


def problem_from_json(text: str) -> MarginalProblem:
    data = json.loads(text)
    if data.get("schema") != "marginal-problem/1":
        raise ValueError("unknown problem schema")
    rep = RepSpec(GroupSpec(tuple(data["factors"])), data["kind"],
                  data.get("power", 1),
                  tuple(data["highest_weight"]) if "highest_weight" in data else None,
                  data.get("env"))
    gs_data = data.get("global_state", "pure")
    gs: GlobalState
    if gs_data == "pure":
        gs = PureFS()
    else:
        gs = CoadjointOrbit(tuple(Q(c) for c in gs_data["orbit"]))
    return MarginalProblem(rep, gs)
