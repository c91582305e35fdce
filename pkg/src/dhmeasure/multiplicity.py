"""Quantized counterparts of the pushforward measures: exact weight
multiplicities as lattice-point counts, highest-weight multiplicities by
finite differences, Kronecker coefficients via three-dimensional contingency
tables, discrete multiplicity measures, q-binomial plethysm characters, and an
independent symmetric-group character oracle."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as Q
from functools import lru_cache
from itertools import permutations
from math import factorial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from ._linalg import vec, vdot, vsub
from .rootdata import (GroupSpec, RationalVector, RepSpec, RootData,
                       build_root_data, coords_of, volume_polynomial,
                       weights_of, weyl_orbit_signed)


class ScaleError(ValueError):
    """The requested computation exceeds the desk-scale guard."""


# ---------------------------------------------------------------------------
# Young diagrams
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class YoungDiagram:
    """Weakly decreasing nonnegative integer parts."""

    parts: Tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts if p != 0)
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError("parts must be weakly decreasing")
        if any(p < 0 for p in parts):
            raise ValueError("parts must be nonnegative")
        object.__setattr__(self, "parts", parts)

    @property
    def boxes(self) -> int:
        return sum(self.parts)

    @property
    def height(self) -> int:
        return len(self.parts)

    def transpose(self) -> "YoungDiagram":
        if not self.parts:
            return self
        return YoungDiagram(tuple(
            sum(1 for p in self.parts if p > i) for i in range(self.parts[0])))


# ---------------------------------------------------------------------------
# weight multiplicities of symmetric powers
# ---------------------------------------------------------------------------


def weight_multiplicity(rep: RepSpec, lam, k: int) -> int:
    """Number of degree-k monomials in the weight basis of the representation
    with total weight lam: lattice points of {t >= 0 integral :
    sum t_j omega_j = lam, sum t_j = k}, counted by depth-first enumeration
    with componentwise linear-relaxation pruning."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    ws = [w.coords for w, m in weights_of(rep) for _ in range(m)]
    target = coords_of(lam)
    r = len(ws[0])
    # suffix bounds: min/max of each coordinate over the remaining weights
    n = len(ws)
    mins = [[Q(0)] * r for _ in range(n + 1)]
    maxs = [[Q(0)] * r for _ in range(n + 1)]
    for j in range(n - 1, -1, -1):
        for i in range(r):
            mins[j][i] = min(ws[j][i], mins[j + 1][i]) if j < n - 1 else ws[j][i]
            maxs[j][i] = max(ws[j][i], maxs[j + 1][i]) if j < n - 1 else ws[j][i]

    def count(j: int, rem: int, residual: Tuple[Q, ...]) -> int:
        if rem == 0:
            return 1 if all(c == 0 for c in residual) else 0
        if j == n:
            return 0
        if j == n - 1:
            return 1 if all(residual[i] == rem * ws[j][i] for i in range(r)) else 0
        for i in range(r):
            if residual[i] < rem * mins[j][i] or residual[i] > rem * maxs[j][i]:
                return 0
        total = 0
        for t in range(rem + 1):
            total += count(j + 1, rem - t,
                           tuple(residual[i] - t * ws[j][i] for i in range(r)))
        return total

    return count(0, k, tuple(target))


class WeightMultiplicityFn:
    """Memoized weight-multiplicity map lam -> m_T(lam) at a fixed degree."""

    def __init__(self, fn: Callable[[Tuple[Q, ...]], int]):
        self._fn = fn
        self._memo: Dict[Tuple[Q, ...], int] = {}

    @classmethod
    def for_symmetric_power(cls, rep: RepSpec, k: int) -> "WeightMultiplicityFn":
        return cls(lambda lam: weight_multiplicity(rep, lam, k))

    @classmethod
    def from_table(cls, table: Dict[Tuple[Q, ...], int]) -> "WeightMultiplicityFn":
        return cls(lambda lam: table.get(tuple(lam), 0))

    def __call__(self, lam) -> int:
        key = tuple(coords_of(lam))
        if key not in self._memo:
            self._memo[key] = self._fn(key)
        return self._memo[key]


# ---------------------------------------------------------------------------
# Steinberg finite differences
# ---------------------------------------------------------------------------


def steinberg_multiplicity(m_T: Callable, rd: RootData, lam) -> int:
    """Multiplicity of the irreducible with highest weight lam from torus
    multiplicities, via the Weyl-collapsed finite-difference formula
    sum_w (-1)^(l(w)) m_T(lam + rho - w rho)."""
    lamv = coords_of(lam)
    if any(c < 0 for c in lamv):
        raise ValueError("highest weight must be dominant")
    rho = RationalVector(rd.rho, rd.group.frame)
    total = 0
    for image, sign in weyl_orbit_signed(rd, rho):
        shift = vsub(rd.rho, image.coords)
        total += sign * m_T(tuple(a + b for a, b in zip(lamv, shift)))
    return total


def steinberg_multiplicity_subsets(m_T: Callable, rd: RootData, lam) -> int:
    """Literal inclusion-exclusion over subsets of positive roots,
    sum_S (-1)^|S| m_T(lam + sum S); must agree with the collapsed form."""
    lamv = coords_of(lam)
    if any(c < 0 for c in lamv):
        raise ValueError("highest weight must be dominant")
    roots = rd.positive_roots
    if len(roots) > 20:
        raise ScaleError("subset form is exponential in the number of roots")
    total = 0
    for mask in range(1 << len(roots)):
        shift = [Q(0)] * len(lamv)
        bits = 0
        for i, alpha in enumerate(roots):
            if mask >> i & 1:
                bits += 1
                for j, c in enumerate(alpha):
                    shift[j] += c
        total += (-1) ** bits * m_T(tuple(a + b for a, b in zip(lamv, shift)))
    return total


# ---------------------------------------------------------------------------
# Kronecker coefficients via contingency tables
# ---------------------------------------------------------------------------


def _staircase_shifts(marg: Tuple[int, ...]) -> List[Tuple[Tuple[int, ...], int]]:
    """All componentwise-nonnegative Weyl shifts lam + delta - w delta of a
    GL-coordinate marginal, with signs; delta is the staircase."""
    d = len(marg)
    delta = tuple(range(d - 1, -1, -1))
    out = []
    for perm in permutations(range(d)):
        shifted = tuple(marg[i] + delta[i] - delta[perm[i]] for i in range(d))
        if any(c < 0 for c in shifted):
            continue
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
        out.append((shifted, sign))
    return out


def _table_count(A: Tuple[int, ...], B: Tuple[int, ...], C: Tuple[int, ...]) -> int:
    """Number of nonnegative integer a x b x c arrays with the given
    one-dimensional marginals, by a layer-by-layer dynamic program."""
    if sum(A) != sum(B) or sum(B) != sum(C):
        return 0

    b, c = len(B), len(C)

    @lru_cache(maxsize=None)
    def count(i: int, brem: Tuple[int, ...], crem: Tuple[int, ...]) -> int:
        if i == len(A):
            return 1 if all(x == 0 for x in brem) and all(x == 0 for x in crem) else 0
        total = 0

        # enumerate the b x c slab for layer i entry by entry
        def fill(idx: int, rem: int, brm: List[int], crm: List[int]):
            nonlocal total
            if idx == b * c:
                if rem == 0:
                    total += count(i + 1, tuple(brm), tuple(crm))
                return
            j, l = divmod(idx, c)
            # remaining capacity bound for pruning
            if rem > sum(brm[j:]):
                return
            hi = min(rem, brm[j], crm[l])
            for t in range(hi + 1):
                brm[j] -= t
                crm[l] -= t
                fill(idx + 1, rem - t, brm, crm)
                brm[j] += t
                crm[l] += t

        fill(0, A[i], list(brem), list(crem))
        return total

    return count(0, tuple(B), tuple(C))


def kronecker(lam: YoungDiagram, mu: YoungDiagram, nu: YoungDiagram) -> int:
    """Kronecker coefficient g(lam, mu, nu) of the symmetric group: computed
    as the multiplicity of the triple of GL irreducibles inside
    Sym^k(C^a (x) C^b (x) C^c), by Weyl finite differences of contingency-table
    counts."""
    k = lam.boxes
    if mu.boxes != k or nu.boxes != k:
        raise ValueError("the three diagrams must have the same box count")
    if k == 0:
        return 1
    ds = [lam, mu, nu]
    # the coefficient is symmetric in its arguments and invariant under
    # transposing any two of them; a height-one diagram resolves it directly
    for i in range(3):
        if ds[i].height == 1:
            a, b = ds[(i + 1) % 3], ds[(i + 2) % 3]
            return 1 if a == b else 0
    # transposing a pair can lower the total Weyl-group size
    best = None
    for ti in (None, 0, 1, 2):
        cur = list(ds)
        if ti is not None:
            cur[(ti + 1) % 3] = cur[(ti + 1) % 3].transpose()
            cur[(ti + 2) % 3] = cur[(ti + 2) % 3].transpose()
        cost = 1
        for d in cur:
            cost *= factorial(d.height)
        if best is None or cost < best[0]:
            best = (cost, cur)
    ds = best[1]
    # the normalization can expose a height-one diagram (e.g. three single
    # columns become two rows and a column); resolve it directly again
    for i in range(3):
        if ds[i].height == 1:
            a, b = ds[(i + 1) % 3], ds[(i + 2) % 3]
            return 1 if a == b else 0
    margs = [tuple(d.parts) for d in ds]
    total = 0
    for sa, ga in _staircase_shifts(margs[0]):
        for sb, gb in _staircase_shifts(margs[1]):
            for sc, gc in _staircase_shifts(margs[2]):
                n = _table_count(sa, sb, sc)
                if n:
                    total += ga * gb * gc * n
    return total


# ---------------------------------------------------------------------------
# symmetric-group character oracle (independent route)
# ---------------------------------------------------------------------------


def _partitions(n: int, cap: Optional[int] = None):
    if n == 0:
        yield ()
        return
    if cap is None:
        cap = n
    for first in range(min(n, cap), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _mn_character(lam: Tuple[int, ...], rho: Tuple[int, ...]) -> int:
    """Murnaghan-Nakayama: character of the irreducible [lam] of S_n on the
    conjugacy class of cycle type rho."""
    if not rho:
        return 1
    t = rho[0]
    rest = rho[1:]
    total = 0
    # border strips via beta-numbers (first-column hook lengths): removing a
    # size-t strip moves one beta-number down by t without collision
    beta = [lam[i] + (len(lam) - 1 - i) for i in range(len(lam))]
    bset = set(beta)
    for b in beta:
        if b - t >= 0 and (b - t) not in bset:
            nb = sorted((bset - {b}) | {b - t}, reverse=True)
            height = sum(1 for x in bset if b - t < x < b)
            m = len(nb)
            newlam = tuple(nb[i] - (m - 1 - i) for i in range(m))
            newlam = tuple(p for p in newlam if p > 0)
            total += (-1) ** height * _mn_character(newlam, rest)
    return total


def character_oracle(lam: YoungDiagram, mu: YoungDiagram, nu: YoungDiagram) -> int:
    """Kronecker coefficient by the class-sum formula
    (1/n!) sum_rho |class(rho)| chi^lam chi^mu chi^nu, with characters from the
    Murnaghan-Nakayama rule.  Test oracle; guarded to n <= 10."""
    n = lam.boxes
    if mu.boxes != n or nu.boxes != n:
        raise ValueError("the three diagrams must have the same box count")
    if n > 10:
        raise ScaleError("character oracle is guarded to 10 boxes")
    if n == 0:
        return 1
    total = 0
    for rho in _partitions(n):
        z = 1
        counts: Dict[int, int] = {}
        for p in rho:
            counts[p] = counts.get(p, 0) + 1
        for p, m in counts.items():
            z *= p ** m * factorial(m)
        total += (_mn_character(lam.parts, rho) * _mn_character(mu.parts, rho)
                  * _mn_character(nu.parts, rho) * (factorial(n) // z))
    if total % factorial(n):
        raise ArithmeticError("class-sum formula did not divide evenly")
    return total // factorial(n)


# ---------------------------------------------------------------------------
# discrete multiplicity measures
# ---------------------------------------------------------------------------


def _dominant_grid(rd: RootData, bound: int):
    """All dominant integral weights with coordinates in [0, bound]."""
    r = rd.group.rank

    def rec(i: int, acc: List[int]):
        if i == r:
            yield tuple(Q(c) for c in acc)
            return
        for c in range(bound + 1):
            yield from rec(i + 1, acc + [c])

    yield from rec(0, [])


def multiplicity_measure(problem_or_rep, k: int,
                         grid_guard: int = 200000) -> List[Tuple[RationalVector, Q]]:
    """Discrete measure k^-(n-R) sum_lam m_K(lam) delta_(lam/k) whose weak
    limit is the unnormalized non-Abelian pushforward measure.

    Accepts a RepSpec (projective-space case: multiplicities in the k-th
    symmetric power) or a MarginalProblem with a coadjoint-orbit global state
    (branching multiplicities; Kronecker route for two tensor factors)."""
    from .qmarginal import CoadjointOrbit, MarginalProblem

    if k < 1:
        raise ValueError("k must be positive")
    if isinstance(problem_or_rep, MarginalProblem) and \
            isinstance(problem_or_rep.global_state, CoadjointOrbit):
        return _orbit_multiplicity_measure(problem_or_rep, k)
    rep = problem_or_rep.rep if isinstance(problem_or_rep, MarginalProblem) \
        else problem_or_rep
    group = rep.symmetry_group
    rd = build_root_data(group)
    ws = [w.coords for w, _ in weights_of(rep)]
    n = rep.dim_hilbert - 1
    R = len(rd.positive_roots)
    bound = int(max(max(abs(c) for c in w) for w in ws)) * k
    if (bound + 1) ** group.rank > grid_guard:
        raise ScaleError("dominant-weight grid exceeds the desk-scale guard")
    m_T = WeightMultiplicityFn.for_symmetric_power(rep, k)
    out: List[Tuple[RationalVector, Q]] = []
    scale = Q(1, k ** (n - R))
    for lam in _dominant_grid(rd, bound):
        m = steinberg_multiplicity(m_T, rd, lam)
        if m < 0:
            raise ArithmeticError("negative multiplicity")
        if m:
            out.append((RationalVector(tuple(c / k for c in lam), group.frame),
                        m * scale))
    return out


def _orbit_multiplicity_measure(problem, k: int) -> List[Tuple[RationalVector, Q]]:
    rep = problem.rep
    spec = problem.global_state.spectrum
    n = rep.dim_hilbert
    parts = [c * k for c in spec]
    if any(p.denominator != 1 for p in parts):
        raise ValueError("k times the spectrum must be integral")
    glam = YoungDiagram(tuple(int(p) for p in parts))
    if rep.group.factors == (n,):
        # the group acts on its own coadjoint orbit: branching to itself
        x = tuple(s - Q(1, n) for s in spec)
        from .rootdata import _eps_to_omega
        lam = _eps_to_omega(n, x)
        return [(RationalVector(lam, rep.group.frame), Q(1))]
    if rep.kind != "tensor" or len(rep.group.factors) != 2:
        raise ScaleError("orbit multiplicity measures are implemented for "
                         "two tensor factors")
    a, b = rep.group.factors
    ncplx = sum(1 for i in range(n) for j in range(i + 1, n)
                if spec[i] != spec[j])
    R = sum(d * (d - 1) // 2 for d in rep.group.factors)
    scale = Q(1, k ** (ncplx - R))
    out: List[Tuple[RationalVector, Q]] = []
    for la in _bounded_partitions(k, a):
        for lb in _bounded_partitions(k, b):
            g = kronecker(glam, YoungDiagram(la), YoungDiagram(lb))
            if g:
                point = []
                for partsj, d in ((la, a), (lb, b)):
                    padded = list(partsj) + [0] * (d - len(partsj))
                    point.extend(Q(padded[i] - padded[i + 1], k)
                                 for i in range(d - 1))
                out.append((RationalVector(tuple(point),
                                           rep.group.frame), g * scale))
    return out


def _bounded_partitions(n: int, height: int):
    def rec(rem: int, cap: int, h: int):
        if h == 0:
            if rem == 0:
                yield ()
            return
        for first in range(min(rem, cap), -1, -1):
            if first == 0:
                if rem == 0:
                    yield (0,) * h
                return
            for rest in rec(rem - first, first, h - 1):
                yield (first,) + rest

    yield from rec(n, n, height)


# ---------------------------------------------------------------------------
# plethysm: Sym^k of Sym^N(C^2) via q-binomials
# ---------------------------------------------------------------------------


def _poly_mul(p: List[int], q: List[int]) -> List[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _poly_divexact(p: List[int], q: List[int]) -> List[int]:
    out = [0] * (len(p) - len(q) + 1)
    rem = list(p)
    for i in range(len(out) - 1, -1, -1):
        c = rem[i + len(q) - 1]
        if c % q[-1]:
            raise ArithmeticError("inexact polynomial division")
        c //= q[-1]
        out[i] = c
        for j, b in enumerate(q):
            rem[i + j] -= c * b
    if any(rem):
        raise ArithmeticError("inexact polynomial division")
    return out


def gaussian_binomial(m: int, r: int) -> List[int]:
    """Coefficient list (in q) of the Gaussian binomial [m choose r]_q."""
    if r < 0 or r > m:
        return [0]
    num = [1]
    den = [1]
    for i in range(1, r + 1):
        num = _poly_mul(num, [1] * (m - r + i))   # 1 + q + ... + q^(m-r+i-1)
        den = _poly_mul(den, [1] * i)
    return _poly_divexact(num, den)


def plethysm_character_sym2(k: int, N: int = 2) -> Dict[int, int]:
    """Weight-multiplicity table of Sym^k(Sym^N(C^2)) from the q-binomial
    character qbinom(k+N, N) evaluated at q^2, shifted by q^(-kN): maps the
    SU(2) weight to its multiplicity."""
    if k < 0 or N < 0:
        raise ValueError("k and N must be nonnegative")
    coeffs = gaussian_binomial(k + N, N)
    table: Dict[int, int] = {}
    for i, c in enumerate(coeffs):
        if c:
            table[2 * i - k * N] = c
    return table


def weyl_dimension(rd: RootData, lam) -> int:
    """Dimension of the irreducible with highest weight lam, as the ratio
    prod <lam+rho, alpha> / <rho, alpha>."""
    lamv = coords_of(lam)
    shifted = tuple(a + b for a, b in zip(lamv, rd.rho))
    num = volume_polynomial(rd).evaluate(shifted)
    # volume polynomial is already normalized by <rho, alpha>
    val = num
    if val.denominator != 1:
        raise ArithmeticError("non-integral Weyl dimension")
    return int(val)
