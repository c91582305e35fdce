"""Root and weight data for products of special unitary groups.

Coordinates: the dual torus algebra of each SU(d) factor is written in the
fundamental-weight basis, so lattice-normalized Lebesgue measure is the
coordinate Lebesgue measure.  For SU(2)^N this makes the positive roots
2e_1, ..., 2e_N and rho = (1, ..., 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as Q
from itertools import combinations, combinations_with_replacement, permutations, product
from typing import Dict, List, Optional, Tuple

from ._linalg import Vec, solve, vdot, vec
from .polyring import Polynomial


@dataclass(frozen=True)
class GroupSpec:
    """A product SU(d_1) x ... x SU(d_N)."""

    factors: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(int(d) for d in self.factors))
        if any(d < 1 for d in self.factors):
            raise ValueError("every SU(d) factor needs d >= 1")

    @property
    def rank(self) -> int:
        return sum(d - 1 for d in self.factors)

    @property
    def frame(self) -> str:
        return "su" + "x".join(str(d) for d in self.factors)

    def coord_slices(self) -> List[Tuple[int, int]]:
        """(start, stop) of each factor's coordinate block."""
        out = []
        pos = 0
        for d in self.factors:
            out.append((pos, pos + d - 1))
            pos += d - 1
        return out


@dataclass(frozen=True)
class RationalVector:
    """Exact rational coordinate tuple tagged with its frame."""

    coords: Tuple[Q, ...]
    frame: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coords", vec(self.coords))

    def _check(self, other: "RationalVector") -> None:
        if self.frame != other.frame:
            raise ValueError(f"frame mismatch: {self.frame!r} vs {other.frame!r}")

    def __add__(self, other: "RationalVector") -> "RationalVector":
        self._check(other)
        return RationalVector(tuple(a + b for a, b in zip(self.coords, other.coords)),
                              self.frame)

    def __sub__(self, other: "RationalVector") -> "RationalVector":
        self._check(other)
        return RationalVector(tuple(a - b for a, b in zip(self.coords, other.coords)),
                              self.frame)

    def __neg__(self) -> "RationalVector":
        return RationalVector(tuple(-a for a in self.coords), self.frame)

    def scale(self, c) -> "RationalVector":
        c = Q(c)
        return RationalVector(tuple(c * a for a in self.coords), self.frame)

    def __len__(self) -> int:
        return len(self.coords)


def coords_of(v) -> Vec:
    """Accept a RationalVector or a bare coordinate sequence."""
    if isinstance(v, RationalVector):
        return v.coords
    return vec(v)


@dataclass(frozen=True)
class RepSpec:
    """Representation selector over a GroupSpec.

    kind: 'tensor' (defining reps of all factors, distinguishable subsystems),
    'sym'/'alt' (Sym^N / Alt^N of the defining rep of a single SU(d) factor),
    'irrep' (irreducible of given dominant highest weight), 'onesided'
    (defining rep of a single SU(d) tensored with an untracked C^power
    environment, so every weight has multiplicity power).

    env: optionally tensor an extra C^env factor whose SU(env) symmetry IS
    tracked; the weight frame then gains an SU(env) coordinate block."""

    group: GroupSpec
    kind: str
    power: int = 1
    highest_weight: Optional[Tuple[int, ...]] = None
    env: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("tensor", "sym", "alt", "irrep", "onesided"):
            raise ValueError(f"unknown representation kind {self.kind!r}")
        if self.env is not None and (self.env < 2 or self.kind == "onesided"):
            raise ValueError("env must be >= 2 and is not combinable with 'onesided'")
        if self.kind == "onesided":
            if len(self.group.factors) != 1 or self.power < 1:
                raise ValueError("onesided needs a single factor and power >= 1")
        if self.kind in ("sym", "alt"):
            if len(self.group.factors) != 1:
                raise ValueError("sym/alt powers are taken over a single factor")
            if self.power < 0:
                raise ValueError("power must be nonnegative")
            if self.kind == "alt" and self.power > self.group.factors[0]:
                raise ValueError("alternating power exceeds the dimension")
        if self.kind == "irrep":
            hw = self.highest_weight
            if hw is None or len(hw) != self.group.rank or any(c < 0 for c in hw):
                raise ValueError("irrep needs a dominant integral highest weight")

    @property
    def symmetry_group(self) -> GroupSpec:
        """The group whose action is tracked, including any env factor."""
        if self.env is None:
            return self.group
        return GroupSpec(self.group.factors + (self.env,))

    @property
    def dim_hilbert(self) -> int:
        """Dimension of the representation space."""
        from math import comb
        envdim = self.env or 1
        if self.kind == "tensor":
            out = 1
            for d in self.group.factors:
                out *= d
            return out * envdim
        d = self.group.factors[0]
        if self.kind == "sym":
            return comb(self.power + d - 1, d - 1) * envdim
        if self.kind == "alt":
            return comb(d, self.power) * envdim
        if self.kind == "onesided":
            return d * self.power
        return len(weights_of(self)) * envdim  # irrep, SU(2)-scale only


def _defining_weights(d: int) -> List[Vec]:
    """Weights of the defining rep of SU(d) in fundamental-weight coordinates."""
    out = []
    for i in range(1, d + 1):
        v = [Q(0)] * (d - 1)
        if i <= d - 1:
            v[i - 1] += 1
        if i >= 2:
            v[i - 2] -= 1
        out.append(tuple(v))
    return out


def epsilon_matrix(d: int) -> List[Vec]:
    """Rows i of the matrix sending fundamental-weight coordinates to traceless
    diagonal coordinates: row i is the i-th coordinate functional."""
    # lambda = sum_k c_k omega_k with omega_k = e_1 + ... + e_k - (k/d) * 1
    rows = []
    for i in range(1, d + 1):
        row = []
        for k in range(1, d):
            row.append((Q(1) if i <= k else Q(0)) - Q(k, d))
        rows.append(tuple(row))
    return rows


@dataclass(frozen=True)
class RootData:
    """Positive/negative roots, rho, Weyl order and Gram matrix of a GroupSpec."""

    group: GroupSpec
    positive_roots: Tuple[Vec, ...]
    rho: Vec
    weyl_group_size: int
    gram: Tuple[Vec, ...]

    @property
    def negative_roots(self) -> Tuple[Vec, ...]:
        return tuple(tuple(-c for c in a) for a in self.positive_roots)

    def pairing(self, x, y) -> Q:
        xv, yv = coords_of(x), coords_of(y)
        return sum(xv[i] * vdot(self.gram[i], yv) for i in range(len(xv)))


def build_root_data(spec: GroupSpec) -> RootData:
    r = spec.rank
    roots: List[Vec] = []
    gram = [[Q(0)] * r for _ in range(r)]
    for (start, stop), d in zip(spec.coord_slices(), spec.factors):
        eps = _defining_weights(d)
        for j, k in combinations(range(d), 2):
            alpha = [Q(0)] * r
            for t in range(stop - start):
                alpha[start + t] = eps[j][t] - eps[k][t]
            roots.append(tuple(alpha))
        M = epsilon_matrix(d)
        for a in range(d - 1):
            for b in range(d - 1):
                gram[start + a][start + b] = sum(M[i][a] * M[i][b] for i in range(d))
    rho = [Q(0)] * r
    for alpha in roots:
        for i, c in enumerate(alpha):
            rho[i] += Q(c, 2)
    wsize = 1
    for d in spec.factors:
        f = 1
        for i in range(2, d + 1):
            f *= i
        wsize *= f
    return RootData(spec, tuple(roots), tuple(rho), wsize,
                    tuple(tuple(row) for row in gram))


def weights_of(rep: RepSpec) -> List[Tuple[RationalVector, int]]:
    """Full weight system with multiplicities."""
    if rep.env is not None:
        base = weights_of(RepSpec(rep.group, rep.kind, rep.power, rep.highest_weight))
        frame = rep.symmetry_group.frame
        return [(RationalVector(tuple(w.coords) + ew, frame), m)
                for (w, m) in base for ew in _defining_weights(rep.env)]
    g = rep.group
    frame = g.frame
    if rep.kind == "onesided":
        return [(RationalVector(w, frame), rep.power) for w in _defining_weights(g.factors[0])]
    if rep.kind == "tensor":
        per_factor = [_defining_weights(d) for d in g.factors]
        out = []
        for combo in product(*per_factor):
            out.append((RationalVector(sum((list(w) for w in combo), []), frame), 1))
        return out
    d = g.factors[0]
    eps = _defining_weights(d)
    if rep.kind == "sym":
        out = []
        for combo in combinations_with_replacement(range(d), rep.power):
            w = [Q(0)] * (d - 1)
            for i in combo:
                for t in range(d - 1):
                    w[t] += eps[i][t]
            out.append((RationalVector(w, frame), 1))
        return out
    if rep.kind == "alt":
        out = []
        for combo in combinations(range(d), rep.power):
            w = [Q(0)] * (d - 1)
            for i in combo:
                for t in range(d - 1):
                    w[t] += eps[i][t]
            out.append((RationalVector(w, frame), 1))
        return out
    # irrep: implemented at SU(2) scale, where the weight string is an interval.
    if g.factors != (2,):
        raise NotImplementedError("irrep weight systems are provided for SU(2) only")
    n = rep.highest_weight[0]
    return [(RationalVector((Q(k),), frame), 1) for k in range(-n, n + 1, 2)]


def volume_polynomial(rd: RootData) -> Polynomial:
    """prod_{alpha>0} <lambda, alpha> / <rho, alpha> as an exact polynomial.

    Each factor is a ratio of pairings, so the result does not depend on the
    Gram normalization."""
    r = rd.group.rank
    out = Polynomial.constant(r, 1)
    for alpha in rd.positive_roots:
        galpha = [vdot(rd.gram[i], alpha) for i in range(r)]
        denom = vdot(vec(rd.rho), vec(galpha))
        out = out * Polynomial.linear_form([c / denom for c in galpha])
    return out


def _factor_weyl_images(d: int, x_eps: Vec) -> List[Tuple[Vec, int]]:
    """All (permuted epsilon-coordinates, sign) for one SU(d) factor."""
    out = []
    for perm in permutations(range(d)):
        sign = 1
        seen = [False] * d
        for i in range(d):
            if not seen[i]:
                j, clen = i, 0
                while not seen[j]:
                    seen[j] = True
                    j = perm[j]
                    clen += 1
                if clen % 2 == 0:
                    sign = -sign
        out.append((tuple(x_eps[perm[i]] for i in range(d)), sign))
    return out


def _eps_to_omega(d: int, x: Vec) -> Vec:
    """Invert the epsilon expansion (x must be traceless)."""
    M = epsilon_matrix(d)
    cols = [[M[i][k] for k in range(d - 1)] for i in range(d)]
    sol = solve(cols, x)
    if sol is None:
        raise ValueError("coordinates are not traceless")
    return sol


def weyl_orbit_signed(rd: RootData, lam) -> List[Tuple[RationalVector, int]]:
    """Signed Weyl orbit: distinct images with their summed (-1)^length signs.

    For a generic lambda each image appears with sign +-1; on stabilized points
    opposite signs cancel and the point is dropped."""
    g = rd.group
    lamv = coords_of(lam)
    per_factor: List[List[Tuple[Vec, int]]] = []
    for (start, stop), d in zip(g.coord_slices(), g.factors):
        block = lamv[start:stop]
        M = epsilon_matrix(d)
        x_eps = tuple(vdot(M[i], block) for i in range(d))
        images = []
        for y_eps, sign in _factor_weyl_images(d, x_eps):
            images.append((_eps_to_omega(d, y_eps), sign))
        per_factor.append(images)
    acc: Dict[Vec, int] = {}
    for combo in product(*per_factor):
        point: List[Q] = []
        sign = 1
        for blk, s in combo:
            point.extend(blk)
            sign *= s
        key = tuple(point)
        acc[key] = acc.get(key, 0) + sign
    return [(RationalVector(pt, g.frame), s) for pt, s in sorted(acc.items()) if s != 0]
