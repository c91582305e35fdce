"""Exact rational linear algebra helpers (Fraction-based, dense, desk scale)."""

from __future__ import annotations

from fractions import Fraction as Q
from math import gcd
from typing import List, Optional, Sequence, Tuple

Vec = Tuple[Q, ...]


def vec(xs: Sequence) -> Vec:
    return tuple(Q(x) for x in xs)


def vadd(x: Vec, y: Vec) -> Vec:
    return tuple(a + b for a, b in zip(x, y))


def vsub(x: Vec, y: Vec) -> Vec:
    return tuple(a - b for a, b in zip(x, y))


def vscale(c, x: Vec) -> Vec:
    c = Q(c)
    return tuple(c * a for a in x)


def vdot(x: Vec, y: Vec) -> Q:
    if len(x) != len(y):
        raise ValueError("dimension mismatch")
    return sum((a * b for a, b in zip(x, y)), Q(0))


def det(rows: Sequence[Sequence]) -> Q:
    """Determinant by fraction Gaussian elimination."""
    n = len(rows)
    m = [[Q(x) for x in row] for row in rows]
    if any(len(row) != n for row in m):
        raise ValueError("determinant needs a square matrix")
    sign = Q(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Q(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            if f:
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    out = sign
    for i in range(n):
        out *= m[i][i]
    return out


def rref(rows: Sequence[Sequence]) -> Tuple[List[List[Q]], List[int]]:
    """Reduced row echelon form; returns (matrix, pivot column indices)."""
    m = [[Q(x) for x in row] for row in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: List[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        f = m[r][col]
        m[r] = [x / f for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                g = m[i][col]
                m[i] = [a - g * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m, pivots


def matrix_rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def solve(A: Sequence[Sequence], b: Sequence) -> Optional[Vec]:
    """One solution of A x = b, or None if inconsistent (A may be non-square)."""
    if not A:
        return ()
    ncols = len(A[0])
    aug = [list(row) + [bb] for row, bb in zip(A, b)]
    m, pivots = rref(aug)
    for row in m:
        if all(x == 0 for x in row[:ncols]) and row[ncols] != 0:
            return None
    x = [Q(0)] * ncols
    for i, col in enumerate(pivots):
        if col == ncols:
            return None
        x[col] = m[i][ncols]
    return tuple(x)


def inverse(A: Sequence[Sequence]) -> List[List[Q]]:
    n = len(A)
    aug = [[Q(x) for x in row] + [Q(1) if i == j else Q(0) for j in range(n)]
           for i, row in enumerate(A)]
    m, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in m]


def nullspace(rows: Sequence[Sequence]) -> List[Vec]:
    """Basis of the right kernel of the given matrix."""
    if not rows:
        return []
    ncols = len(rows[0])
    m, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Q(0)] * ncols
        v[fc] = Q(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(tuple(v))
    return basis


def primitive_integer(v: Sequence[Q]) -> Tuple[int, ...]:
    """Scale a nonzero rational vector to coprime integers, fixing sign by the
    first nonzero entry being positive."""
    v = [Q(x) for x in v]
    if all(x == 0 for x in v):
        raise ValueError("zero vector has no primitive representative")
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints]
    first = next(x for x in ints if x != 0)
    if first < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def kernel_lattice_basis(ell: Sequence[int]) -> Tuple[List[Tuple[int, ...]], Tuple[int, ...]]:
    """For a primitive integer covector ell on Z^r, return (basis, u) where basis
    spans {v in Z^r : ell.v = 0} and ell(u) = 1, with det[basis | u] = +-1.

    Computed by unimodular column operations driving ell to (0, ..., 0, 1)."""
    r = len(ell)
    row = list(ell)
    U = [[1 if i == j else 0 for j in range(r)] for i in range(r)]  # columns of U

    def colop_sub(dst: int, src: int, q: int) -> None:
        row[dst] -= q * row[src]
        for i in range(r):
            U[i][dst] -= q * U[i][src]

    def colswap(i: int, j: int) -> None:
        row[i], row[j] = row[j], row[i]
        for k in range(r):
            U[k][i], U[k][j] = U[k][j], U[k][i]

    # Euclidean algorithm across columns until one nonzero entry remains.
    while True:
        nz = [i for i in range(r) if row[i] != 0]
        if len(nz) == 1:
            break
        nz.sort(key=lambda i: abs(row[i]))
        a, b = nz[0], nz[1]
        q = row[b] // row[a]
        colop_sub(b, a, q)
    k = next(i for i in range(r) if row[i] != 0)
    if row[k] < 0:
        row[k] = -row[k]
        for i in range(r):
            U[i][k] = -U[i][k]
    if row[k] != 1:
        raise ValueError("covector is not primitive")
    colswap(k, r - 1)
    basis = [tuple(U[i][j] for i in range(r)) for j in range(r - 1)]
    u = tuple(U[i][r - 1] for i in range(r))
    return basis, u


def hyperplane_covector(points: Sequence[Vec]) -> Optional[Tuple[Tuple[int, ...], Q]]:
    """Primitive integral (ell, c) with ell(p) = c for all given points, if the
    points affinely span exactly a hyperplane; None otherwise."""
    if not points:
        return None
    r = len(points[0])
    dirs = [vsub(p, points[0]) for p in points[1:]]
    if matrix_rank(dirs) != r - 1:
        return None
    ns = nullspace(dirs)
    if len(ns) != 1:
        return None
    ell = primitive_integer(ns[0])
    c = vdot(vec(ell), points[0])
    return ell, c
