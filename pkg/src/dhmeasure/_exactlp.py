"""Small exact-rational simplex solver (Bland's rule, two-phase, dense).

Solves desk-scale linear programs that back the chamber geometry: strict
interior points, full-dimensionality checks and exact feasibility.  All
arithmetic is fractions.Fraction; no epsilons anywhere.
"""

from __future__ import annotations

from fractions import Fraction as Q
from typing import List, Optional, Sequence, Tuple

Vec = Tuple[Q, ...]


def _simplex(T: List[List[Q]], basis: List[int], nvars: int) -> str:
    """Run Bland simplex on tableau T (rows: constraints then objective row).

    Tableau layout: T[i] = [a_{i,0..nvars-1} | rhs] for constraint rows,
    last row = [reduced costs | -objective].  Maximization."""
    m = len(T) - 1
    while True:
        obj = T[m]
        enter = next((j for j in range(nvars) if obj[j] > 0), None)
        if enter is None:
            return "optimal"
        best: Optional[Tuple[Q, int]] = None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = T[i][nvars] / T[i][enter]
                if best is None or ratio < best[0] or (
                        ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded"
        r = best[1]
        piv = T[r][enter]
        T[r] = [x / piv for x in T[r]]
        for i in range(m + 1):
            if i != r and T[i][enter]:
                f = T[i][enter]
                T[i] = [a - f * b for a, b in zip(T[i], T[r])]
        basis[r] = enter


def lp_maximize(c: Sequence, A: Sequence[Sequence], b: Sequence
                ) -> Tuple[str, Optional[Vec], Optional[Q]]:
    """Maximize c.x subject to A x <= b, x free.

    Returns (status, x, value) with status in {optimal, unbounded, infeasible}.
    Free variables are split x = u - v internally."""
    n = len(c)
    m = len(A)
    c = [Q(x) for x in c]
    A = [[Q(x) for x in row] for row in A]
    b = [Q(x) for x in b]
    # Columns: u (n), v (n), slacks (m), artificials (added as needed).
    ncols = 2 * n + m
    rows: List[List[Q]] = []
    art_cols: List[int] = []
    basis: List[int] = []
    for i in range(m):
        row = A[i] + [-x for x in A[i]] + [Q(0)] * m + [b[i]]
        row[2 * n + i] = Q(1)
        if b[i] < 0:
            row = [-x for x in row]
        rows.append(row)
    # Phase I: ensure a feasible basis.  Slack is basic when its coefficient is
    # +1 after the sign flip; otherwise add an artificial.
    total = ncols
    for i in range(m):
        if rows[i][2 * n + i] == 1:
            basis.append(2 * n + i)
        else:
            art_cols.append(total)
            basis.append(total)
            total += 1
    if art_cols:
        for i in range(m):
            rows[i] = rows[i][:ncols] + [Q(0)] * len(art_cols) + [rows[i][ncols]]
            if basis[i] >= ncols:
                rows[i][basis[i]] = Q(1)
        obj = [Q(0)] * total + [Q(0)]
        for j in art_cols:
            obj[j] = Q(-1)
        T = [row[:] for row in rows] + [obj]
        for i in range(m):  # price out basic artificials
            if basis[i] in art_cols:
                T[-1] = [a + bb for a, bb in zip(T[-1], T[i])]
        _simplex(T, basis, total)
        if T[-1][total] != 0:
            return "infeasible", None, None
        # Drive any remaining artificial variables out of the basis.
        for i in range(m):
            if basis[i] in art_cols:
                enter = next((j for j in range(ncols) if T[i][j] != 0), None)
                if enter is None:
                    continue
                piv = T[i][enter]
                T[i] = [x / piv for x in T[i]]
                for k in range(m + 1):
                    if k != i and T[k][enter]:
                        f = T[k][enter]
                        T[k] = [a - f * bbb for a, bbb in zip(T[k], T[i])]
                basis[i] = enter
        rows = [[x for j, x in enumerate(row[:-1]) if j not in art_cols] + [row[-1]]
                for row in T[:-1]]
        remap = {}
        k = 0
        for j in range(total):
            if j not in art_cols:
                remap[j] = k
                k += 1
        basis = [remap.get(bs, -1) for bs in basis]
    # Phase II.
    obj = [Q(x) for x in c] + [-Q(x) for x in c] + [Q(0)] * m + [Q(0)]
    T = [row[:] for row in rows] + [obj]
    for i in range(len(rows)):
        if basis[i] >= 0 and T[-1][basis[i]] != 0:
            f = T[-1][basis[i]]
            T[-1] = [a - f * bb for a, bb in zip(T[-1], T[i])]
    status = _simplex(T, basis, ncols)
    if status == "unbounded":
        return "unbounded", None, None
    x = [Q(0)] * ncols
    for i in range(len(rows)):
        if 0 <= basis[i] < ncols:
            x[basis[i]] = T[i][ncols]
    sol = tuple(x[j] - x[n + j] for j in range(n))
    value = -T[-1][ncols]
    return "optimal", sol, value


def strict_interior_point(A: Sequence[Sequence], b: Sequence) -> Optional[Vec]:
    """A point x with A x < b componentwise, or None if the open polyhedron is
    empty.  The polyhedron may be unbounded; a data-derived bounding box keeps
    the auxiliary program bounded."""
    if not A:
        return ()
    n = len(A[0])
    bigm = Q(1)
    for row, bb in zip(A, b):
        bigm += abs(Q(bb)) + sum(abs(Q(x)) for x in row)
    rows = [list(row) + [Q(1)] for row in A]
    rhs = list(b)
    for j in range(n):  # |x_j| <= bigm, non-strict (no +t)
        e = [Q(0)] * n
        e[j] = Q(1)
        rows.append(e + [Q(0)])
        rhs.append(bigm)
        rows.append([-x for x in e] + [Q(0)])
        rhs.append(bigm)
    rows.append([Q(0)] * n + [Q(1)])  # t <= 1
    rhs.append(Q(1))
    cobj = [Q(0)] * n + [Q(1)]
    status, sol, value = lp_maximize(cobj, rows, rhs)
    if status != "optimal" or value is None or value <= 0:
        return None
    return sol[:n]


def feasible(A: Sequence[Sequence], b: Sequence) -> bool:
    """Whether {x : A x <= b} is nonempty."""
    if not A:
        return True
    n = len(A[0])
    status, _, _ = lp_maximize([Q(0)] * n, A, b)
    return status != "infeasible"
