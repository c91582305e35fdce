"""Sparse multivariate polynomials over Q, truncated series, residue jumps and
exact simplex integration."""

from __future__ import annotations

import math
from fractions import Fraction as Q
from itertools import combinations_with_replacement
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ._linalg import Vec, det, vdot, vec, vsub

Monomial = Tuple[int, ...]


class Polynomial:
    """Multivariate polynomial with exact rational coefficients.

    Stored as a sparse monomial -> coefficient table over ``nvars`` coordinates;
    zero coefficients are pruned after every operation.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Optional[Dict[Monomial, Q]] = None):
        self.nvars = nvars
        self.terms: Dict[Monomial, Q] = {}
        if terms:
            for mono, coeff in terms.items():
                c = Q(coeff)
                if c:
                    self.terms[tuple(mono)] = c

    # -- constructors -----------------------------------------------------
    @staticmethod
    def zero(nvars: int) -> "Polynomial":
        return Polynomial(nvars)

    @staticmethod
    def constant(nvars: int, c) -> "Polynomial":
        return Polynomial(nvars, {(0,) * nvars: Q(c)})

    @staticmethod
    def variable(nvars: int, i: int) -> "Polynomial":
        mono = tuple(1 if j == i else 0 for j in range(nvars))
        return Polynomial(nvars, {mono: Q(1)})

    @staticmethod
    def linear_form(coeffs: Sequence, constant=0) -> "Polynomial":
        n = len(coeffs)
        terms: Dict[Monomial, Q] = {}
        for i, c in enumerate(coeffs):
            if Q(c):
                terms[tuple(1 if j == i else 0 for j in range(n))] = Q(c)
        if Q(constant):
            terms[(0,) * n] = Q(constant)
        return Polynomial(n, terms)

    # -- ring operations --------------------------------------------------
    def _check(self, other: "Polynomial") -> None:
        if self.nvars != other.nvars:
            raise ValueError("polynomial arity mismatch")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out.get(mono, Q(0)) + c
        return Polynomial(self.nvars, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            c = Q(other)
            return Polynomial(self.nvars, {m: c * v for m, v in self.terms.items()})
        self._check(other)
        out: Dict[Monomial, Q] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                out[mono] = out.get(mono, Q(0)) + c1 * c2
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        out = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        return (isinstance(other, Polynomial) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    # -- calculus / evaluation --------------------------------------------
    def evaluate(self, point: Sequence) -> Q:
        pt = [Q(x) for x in point]
        total = Q(0)
        for mono, c in self.terms.items():
            v = c
            for x, e in zip(pt, mono):
                if e:
                    v *= x ** e
            total += v
        return total

    def derivative(self, i: int) -> "Polynomial":
        out: Dict[Monomial, Q] = {}
        for mono, c in self.terms.items():
            if mono[i]:
                new = list(mono)
                new[i] -= 1
                out[tuple(new)] = out.get(tuple(new), Q(0)) + c * mono[i]
        return Polynomial(self.nvars, out)

    def compose(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute variable i -> images[i]."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        nv = images[0].nvars if images else 0
        out = Polynomial.zero(nv)
        for mono, c in self.terms.items():
            term = Polynomial.constant(nv, c)
            for img, e in zip(images, mono):
                if e:
                    term = term * (img ** e)
            out = out + term
        return out

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for mono in sorted(self.terms, key=lambda m: (sum(m), m)):
            c = self.terms[mono]
            var = "*".join(f"x{i}^{e}" if e > 1 else f"x{i}"
                           for i, e in enumerate(mono) if e)
            bits.append(f"{c}" + (f"*{var}" if var else ""))
        return " + ".join(bits)


def directional_derivative(p: Polynomial, v: Sequence) -> Polynomial:
    """sum_i v_i dp/dx_i."""
    v = [Q(x) for x in v]
    if len(v) != p.nvars:
        raise ValueError("direction frame mismatch")
    out = Polynomial.zero(p.nvars)
    for i, vi in enumerate(v):
        if vi:
            out = out + vi * p.derivative(i)
    return out


class TruncatedSeries:
    """Laurent series in z with aux-polynomial coefficients.

    Coefficients live in Q[x_1..x_s][lambda_1..lambda_r], stored as
    {z_power: {aux_monomial: Polynomial in lambda}}; aux total degree is capped
    at ``aux_cap`` and z powers are kept within [zmin, zmax]."""

    __slots__ = ("coeffs", "aux_cap", "zmin", "zmax", "aux_dim", "lam_dim")

    def __init__(self, aux_dim: int, lam_dim: int, aux_cap: int,
                 zmin: int, zmax: int):
        self.coeffs: Dict[int, Dict[Monomial, Polynomial]] = {}
        self.aux_dim = aux_dim
        self.lam_dim = lam_dim
        self.aux_cap = aux_cap
        self.zmin = zmin
        self.zmax = zmax

    def add_term(self, zpow: int, aux_mono: Monomial, coeff: Polynomial) -> None:
        if zpow < self.zmin or zpow > self.zmax or sum(aux_mono) > self.aux_cap:
            return
        layer = self.coeffs.setdefault(zpow, {})
        cur = layer.get(aux_mono)
        layer[aux_mono] = coeff if cur is None else cur + coeff

    def multiply(self, other: "TruncatedSeries") -> "TruncatedSeries":
        out = TruncatedSeries(self.aux_dim, self.lam_dim, self.aux_cap,
                              self.zmin, self.zmax)
        for z1, layer1 in self.coeffs.items():
            for z2, layer2 in other.coeffs.items():
                z = z1 + z2
                if z < self.zmin or z > self.zmax:
                    continue
                for m1, c1 in layer1.items():
                    for m2, c2 in layer2.items():
                        mono = tuple(a + b for a, b in zip(m1, m2))
                        if sum(mono) > self.aux_cap:
                            continue
                        out.add_term(z, mono, c1 * c2)
        return out


def _aux_monomials(dim: int, total: int) -> Iterable[Monomial]:
    """All monomials in ``dim`` variables of total degree exactly ``total``."""
    if dim == 0:
        if total == 0:
            yield ()
        return
    for combo in combinations_with_replacement(range(dim), total):
        mono = [0] * dim
        for i in combo:
            mono[i] += 1
        yield tuple(mono)


def residue_core(F_aux: Dict[Monomial, Q], a: List[Q], b_forms: List[Vec],
                 exp_aux: List[Polynomial], L0: Polynomial,
                 D: int) -> Polynomial:
    """Extract Res_{z=0}[ F(d_aux) e^{z L0(lam) + sum exp_aux_i(lam) aux_i}
    * prod_k 1/(z a_k + b_k(aux)) ]|_{aux=0}.

    ``F_aux``: homogeneous degree-D polynomial in the aux variables (rational
    coefficients); ``a``: nonzero leading scalars; ``b_forms``: linear aux forms
    per factor; ``exp_aux[i]``: lambda-polynomial multiplying aux_i in the
    exponential; ``L0``: lambda-polynomial multiplying z."""
    K = len(a)
    s = len(exp_aux)
    lam_dim = L0.nvars
    zmin, zmax = -(K + D), -1

    def series() -> TruncatedSeries:
        return TruncatedSeries(s, lam_dim, D, zmin, zmax)

    # prod_k 1/(z a_k + b_k) = prod_k sum_j z^{-(j+1)} (-1)^j b_k^j / a_k^{j+1}
    prod: Optional[TruncatedSeries] = None
    for ak, form in zip(a, b_forms):
        fac = series()
        bpow: Dict[Monomial, Q] = {(0,) * s: Q(1)}
        base = {tuple(1 if j == i else 0 for j in range(s)): Q(form[i])
                for i in range(s) if form[i]}
        for j in range(D + 1):
            scal = Q((-1) ** j) / ak ** (j + 1)
            for mono, c in bpow.items():
                fac.add_term(-(j + 1), mono, Polynomial.constant(lam_dim, scal * c))
            nxt: Dict[Monomial, Q] = {}
            for m1, c1 in bpow.items():
                for m2, c2 in base.items():
                    mono = tuple(x + y for x, y in zip(m1, m2))
                    nxt[mono] = nxt.get(mono, Q(0)) + c1 * c2
            bpow = nxt
        prod = fac if prod is None else prod.multiply(fac)
    assert prod is not None
    # exp(z L0) contributes z-powers 0 .. K+D-1 with coefficients L0^i / i!;
    # combine directly with the factor product, keeping only z^{-1}.
    combined = series()
    Lpow = Polynomial.constant(lam_dim, 1)
    for i in range(K + D):
        coeff = Lpow * Q(1, math.factorial(i))
        for zp, layer in prod.coeffs.items():
            if zp + i != -1:
                continue
            for mono, cpoly in layer.items():
                combined.add_term(-1, mono, cpoly * coeff)
        Lpow = Lpow * L0
    # exp(sum exp_aux_i aux_i): aux monomials beta with coefficient
    # prod exp_aux_i^{beta_i} / beta_i!  (z^0 layer), multiplied in.
    final: Dict[Monomial, Polynomial] = {}
    res_layer = combined.coeffs.get(-1, {})
    for total in range(D + 1):
        for beta in _aux_monomials(s, total):
            lam_part = Polynomial.constant(lam_dim, 1)
            denom = 1
            for i, e in enumerate(beta):
                if e:
                    lam_part = lam_part * (exp_aux[i] ** e)
                    denom *= math.factorial(e)
            lam_part = lam_part * Q(1, denom)
            for mono, cpoly in res_layer.items():
                new = tuple(x + y for x, y in zip(mono, beta))
                if sum(new) > D:
                    continue
                contrib = cpoly * lam_part
                cur = final.get(new)
                final[new] = contrib if cur is None else cur + contrib
    result = Polynomial.zero(lam_dim)
    for mono, cf in F_aux.items():
        cpoly = final.get(tuple(mono))
        if cpoly is None:
            continue
        fact = 1
        for e in mono:
            fact *= math.factorial(e)
        result = result + (cf * Q(fact)) * cpoly
    return result


def _primitive_scale(ellv: Vec) -> Vec:
    """Rescale a covector to its primitive integer representative, keeping the
    orientation, so jump outputs are invariant under ell -> c*ell (c > 0)."""
    from ._linalg import primitive_integer
    prim = primitive_integer(ellv)
    first = next(c for c in ellv if c != 0)
    if first * next(c for c in prim if c != 0) < 0:
        prim = tuple(-c for c in prim)
    return vec(prim)


def residue_jump(wall_poly: Polynomial, offset_weight: Sequence,
                 off_wall_weights: Sequence[Sequence], ell: Sequence,
                 homogeneity: int) -> Polynomial:
    """Jump of a piecewise density across a singular wall, by residue extraction.

    ``wall_poly`` is the wall density (degree m - r in the ambient coordinates),
    ``offset_weight`` a weight on the wall, ``off_wall_weights`` the weights off
    the wall's hyperplane, ``ell`` the wall covector and ``homogeneity`` the
    expected degree of the output (for validation).  Returns the polynomial
    f(ell-positive side) - f(ell-negative side).  The result depends only on
    the oriented hyperplane, so ``ell`` is normalized to its primitive
    representative first."""
    w0 = vec(offset_weight)
    r = len(w0)
    ellv = _primitive_scale(vec(ell))
    if wall_poly.is_zero():
        return Polynomial.zero(r)
    off = [vec(w) for w in off_wall_weights]
    a = []
    for w in off:
        ak = vdot(ellv, vsub(w, w0))
        if ak == 0:
            raise ValueError("off-wall weight lies on the wall hyperplane")
        a.append(ak)
    # homogeneity = n - r = (#off-wall - 1) + (m - r) fixes the homogenization
    # degree m - r even when the wall polynomial degenerates to lower degree.
    D = homogeneity - len(off) + 1
    if D < 0 or wall_poly.degree() > D:
        raise ValueError("wall polynomial degree inconsistent with homogeneity")
    # Aux variables: x_1..x_r paired with lambda, plus y paired with 1; the wall
    # polynomial is homogenized into the y variable before differentiation.
    F_aux: Dict[Monomial, Q] = {}
    for mono, c in wall_poly.terms.items():
        F_aux[tuple(mono) + (D - sum(mono),)] = c
    b_forms = [tuple(w) + (Q(1),) for w in off]
    exp_aux = [Polynomial.variable(r, i) for i in range(r)]
    exp_aux.append(Polynomial.constant(r, 1))
    L0 = Polynomial.linear_form(ellv, -vdot(ellv, w0))
    return residue_core(F_aux, a, b_forms, exp_aux, L0, D)


def cone_jump(wall_poly: Polynomial, off_wall_generators: Sequence[Sequence],
              ell: Sequence, wall_degree: Optional[int] = None) -> Polynomial:
    """Homogeneous-picture analogue of :func:`residue_jump` for cone densities:
    the wall passes through the origin and ``wall_poly`` is homogeneous."""
    ellv = _primitive_scale(vec(ell))
    r = len(ellv)
    if wall_poly.is_zero():
        return Polynomial.zero(r)
    D = wall_degree if wall_degree is not None else wall_poly.degree()
    if wall_poly.degree() > D:
        raise ValueError("wall polynomial degree exceeds declared degree")
    gens = [vec(g) for g in off_wall_generators]
    a = []
    for g in gens:
        ak = vdot(ellv, g)
        if ak == 0:
            raise ValueError("off-wall generator lies on the wall hyperplane")
        a.append(ak)
    F_aux = {tuple(m): c for m, c in wall_poly.terms.items()}
    b_forms = [tuple(g) for g in gens]
    exp_aux = [Polynomial.variable(r, i) for i in range(r)]
    L0 = Polynomial.linear_form(ellv)
    return residue_core(F_aux, a, b_forms, exp_aux, L0, D)


def integrate_over_simplex(p: Polynomial, vertices: Sequence[Sequence]) -> Q:
    """Exact integral of ``p`` over the simplex with the given vertices, in the
    coordinate Lebesgue measure (Dirichlet closed form per monomial)."""
    verts = [vec(v) for v in vertices]
    d = p.nvars
    if len(verts) != d + 1:
        raise ValueError("need dim+1 vertices for a full-dimensional simplex")
    edges = [vsub(v, verts[0]) for v in verts[1:]]
    jac = abs(det(edges))
    if jac == 0:
        raise ValueError("degenerate simplex")
    # x = v0 + T t with T columns = edges
    images = []
    for i in range(d):
        coeffs = [edges[j][i] for j in range(d)]
        images.append(Polynomial.linear_form(coeffs, verts[0][i]))
    q = p.compose(images)
    total = Q(0)
    for mono, c in q.terms.items():
        num = 1
        for e in mono:
            num *= math.factorial(e)
        total += c * Q(num, math.factorial(sum(mono) + d))
    return jac * total
