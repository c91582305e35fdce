"""Floating-point Monte-Carlo oracle.

Samples invariant-measure random states, computes reduced-density-matrix
spectra by partial trace and a cyclic-Jacobi eigendecomposition, and compares
empirical statistics against the exact piecewise-polynomial laws.

Random source: numpy's Philox4x64 counter-based generator keyed by the 64-bit
seed, so streams are reproducible and mergeable across disjoint sub-seeds.
Set DHMEASURE_NO_NUMBA=1 to force the pure-numpy eigensolver path.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction as Q
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .chambers import integrate_polynomial_over_cell, polytope_vertices
from .measure_engine import PiecewiseMeasure
from .qmarginal import CoadjointOrbit, MarginalProblem, PureFS

_JACOBI_TOL = 1e-13
_MAX_SWEEPS = 100
_DIM_GUARD = 4096


class SampleError(ValueError):
    pass


# ---------------------------------------------------------------------------
# cyclic Jacobi eigensolver (numba kernel with pure-numpy fallback)
# ---------------------------------------------------------------------------


def _jacobi_batch_numpy(mats: np.ndarray) -> np.ndarray:
    """Vectorized cyclic Jacobi over a batch of Hermitian matrices."""
    A = mats.astype(np.complex128, copy=True)
    d = A.shape[1]
    for _ in range(_MAX_SWEEPS):
        off = 0.0
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[:, p, q]
                r = np.abs(apq)
                off = max(off, float(r.max(initial=0.0)))
                live = r > 1e-300
                phase = np.where(live, apq / np.where(live, r, 1.0), 1.0)
                app = A[:, p, p].real
                aqq = A[:, q, q].real
                denom = np.where(live, 2.0 * np.where(live, r, 1.0), 1.0)
                tau = (aqq - app) / denom
                t = np.sign(tau) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
                t = np.where(tau == 0.0, 1.0, t)
                t = np.where(live, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                colp = A[:, :, p].copy()
                colq = A[:, :, q].copy()
                A[:, :, p] = c[:, None] * colp - (s * np.conj(phase))[:, None] * colq
                A[:, :, q] = (s * phase)[:, None] * colp + c[:, None] * colq
                rowp = A[:, p, :].copy()
                rowq = A[:, q, :].copy()
                A[:, p, :] = c[:, None] * rowp - (s * phase)[:, None] * rowq
                A[:, q, :] = (s * np.conj(phase))[:, None] * rowp + c[:, None] * rowq
        if off < _JACOBI_TOL:
            break
    eig = np.real(np.einsum("...ii->...i", A))
    eig.sort(axis=1)
    return eig[:, ::-1].copy()


def _jacobi_batch_scalar(A):  # compiled by numba; plain loops only
    n = A.shape[0]
    d = A.shape[1]
    out = np.empty((n, d), dtype=np.float64)
    for m in range(n):
        for _ in range(_MAX_SWEEPS):
            off = 0.0
            for p in range(d - 1):
                for q in range(p + 1, d):
                    apq = A[m, p, q]
                    r = abs(apq)
                    if r > off:
                        off = r
                    if r <= 1e-300:
                        continue
                    phase = apq / r
                    tau = (A[m, q, q].real - A[m, p, p].real) / (2.0 * r)
                    if tau == 0.0:
                        t = 1.0
                    elif tau > 0.0:
                        t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                    c = 1.0 / np.sqrt(1.0 + t * t)
                    s = t * c
                    for k in range(d):
                        xp = A[m, k, p]
                        xq = A[m, k, q]
                        A[m, k, p] = c * xp - s * np.conj(phase) * xq
                        A[m, k, q] = s * phase * xp + c * xq
                    for k in range(d):
                        xp = A[m, p, k]
                        xq = A[m, q, k]
                        A[m, p, k] = c * xp - s * phase * xq
                        A[m, q, k] = s * np.conj(phase) * xp + c * xq
            if off < _JACOBI_TOL:
                break
        for i in range(d):
            out[m, i] = A[m, i, i].real
        out[m].sort()
        for i in range(d // 2):
            tmp = out[m, i]
            out[m, i] = out[m, d - 1 - i]
            out[m, d - 1 - i] = tmp
    return out


_NUMBA_KERNEL = None


def _use_numba() -> bool:
    return os.environ.get("DHMEASURE_NO_NUMBA", "") == ""


def eigenvalues_batch(mats: np.ndarray) -> np.ndarray:
    """Eigenvalues (sorted nonincreasing) of a batch of Hermitian matrices,
    d <= 8, by cyclic Jacobi rotations to 1e-13 off-diagonal norm."""
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise ValueError("expected a (count, d, d) batch")
    if mats.shape[1] > 8:
        raise SampleError("Jacobi eigensolver is guarded to d <= 8")
    if mats.shape[1] == 1:
        return mats[:, 0, 0].real.reshape(-1, 1).astype(np.float64)
    global _NUMBA_KERNEL
    if _use_numba():
        if _NUMBA_KERNEL is None:
            from numba import njit
            _NUMBA_KERNEL = njit(cache=True)(_jacobi_batch_scalar)
        return _NUMBA_KERNEL(mats.astype(np.complex128, copy=True))
    return _jacobi_batch_numpy(mats)


# ---------------------------------------------------------------------------
# state sampling
# ---------------------------------------------------------------------------


@dataclass
class SampleBatch:
    problem: MarginalProblem
    seed: int
    count: int
    samples: List[Tuple[Tuple[float, ...], ...]] = field(default_factory=list)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def _gaussian_states(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    z = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _haar_unitaries(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    z = (rng.standard_normal((count, dim, dim))
         + 1j * rng.standard_normal((count, dim, dim)))
    qs = np.empty_like(z)
    for i in range(count):
        q, r = np.linalg.qr(z[i])
        qs[i] = q * (np.diag(r) / np.abs(np.diag(r)))[None, :]
    return qs


def _multiset_index(d: int, N: int) -> List[Tuple[int, ...]]:
    out: List[Tuple[int, ...]] = []

    def rec(start: int, left: int, acc: List[int]):
        if left == 0:
            out.append(tuple(acc))
            return
        for i in range(start, d):
            rec(i, left - 1, acc + [i])

    rec(0, N, [])
    return out


def _sym_embedding(d: int, N: int) -> np.ndarray:
    """Isometry from the occupation basis of Sym^N(C^d) into (C^d)^(x)N:
    each occupation class spreads over its word orbit with multinomial
    normalization 1/sqrt(N!/prod n_i!)."""
    cols = _multiset_index(d, N)
    E = np.zeros((d ** N, len(cols)))
    strides = [d ** (N - 1 - i) for i in range(N)]
    from itertools import permutations
    for j, word in enumerate(cols):
        counts: Dict[int, int] = {}
        for x in word:
            counts[x] = counts.get(x, 0) + 1
        mult = factorial(N)
        for c in counts.values():
            mult //= factorial(c)
        norm = 1.0 / np.sqrt(mult)
        for perm in set(permutations(word)):
            idx = sum(p * s for p, s in zip(perm, strides))
            E[idx, j] = norm
    return E


def _alt_embedding(d: int, N: int) -> np.ndarray:
    """Isometry from the ordered-subset basis of Alt^N(C^d) into (C^d)^(x)N."""
    from itertools import combinations, permutations
    cols = list(combinations(range(d), N))
    E = np.zeros((d ** N, len(cols)))
    strides = [d ** (N - 1 - i) for i in range(N)]
    norm = 1.0 / np.sqrt(factorial(N))
    for j, subset in enumerate(cols):
        for perm in permutations(range(N)):
            sign = 1
            seen = [False] * N
            for i in range(N):
                if not seen[i]:
                    k, clen = i, 0
                    while not seen[k]:
                        seen[k] = True
                        k = perm[k]
                        clen += 1
                    if clen % 2 == 0:
                        sign = -sign
            word = tuple(subset[perm[i]] for i in range(N))
            idx = sum(p * s for p, s in zip(word, strides))
            E[idx, j] = sign * norm
    return E


def _first_slot_rho(psis: np.ndarray, d: int) -> np.ndarray:
    """Reduced matrices on the first tensor slot of dimension d."""
    count = psis.shape[0]
    X = psis.reshape(count, d, -1)
    return np.einsum("nik,njk->nij", X, np.conj(X))


def sample(problem: MarginalProblem, count: int, seed: int) -> SampleBatch:
    """Draw reduced-spectrum samples for the marginal problem.

    Pure global states are normalized complex Gaussians (the unitarily
    invariant measure); orbit states apply a Haar unitary to the fixed
    spectrum; symmetric/antisymmetric subspaces are sampled in an orthonormal
    occupation basis and embedded isometrically into the tensor power before
    the partial trace."""
    rep = problem.rep
    if rep.dim_hilbert > _DIM_GUARD:
        raise SampleError("dimension exceeds the sampling guard")
    rng = _rng(seed)
    group = rep.symmetry_group
    dims = group.factors
    rhos_per_factor: List[np.ndarray] = []

    if isinstance(problem.global_state, CoadjointOrbit):
        spec = np.array([float(s) for s in problem.global_state.spectrum])
        n = rep.dim_hilbert
        U = _haar_unitaries(rng, count, n)
        rho = np.einsum("nij,j,nkj->nik", U, spec, np.conj(U))
        rhos_per_factor = [_partial_trace(rho, dims, j)
                           for j in range(len(dims))]
    elif rep.kind == "tensor":
        psi = _gaussian_states(rng, count, rep.dim_hilbert)
        Nf = len(dims)
        for j in range(Nf):
            perm = (0, 1 + j) + tuple(1 + i for i in range(Nf) if i != j)
            moved = psi.reshape((count,) + tuple(dims)).transpose(perm)
            X = moved.reshape(count, dims[j], -1)
            rhos_per_factor.append(np.einsum("nik,njk->nij", X, np.conj(X)))
    elif rep.kind in ("sym", "alt"):
        d = rep.group.factors[0]
        N = rep.power
        E = _sym_embedding(d, N) if rep.kind == "sym" else _alt_embedding(d, N)
        D = E.shape[1]
        env = rep.env or 1
        psi = _gaussian_states(rng, count, D * env)
        M = psi.reshape(count, D, env)
        big = np.einsum("ab,nbe->nae", E, M).reshape(count, d ** N * env)
        rhos_per_factor.append(_first_slot_rho(big, d))
        if rep.env is not None:
            rho_env = np.einsum("nae,naf->nef", np.conj(M), M)
            rhos_per_factor.append(rho_env.conj())
    elif rep.kind == "onesided":
        a = rep.group.factors[0]
        b = rep.power
        psi = _gaussian_states(rng, count, a * b)
        rhos_per_factor.append(_first_slot_rho(psi, a))
    else:
        raise SampleError(f"sampling not implemented for kind {rep.kind!r}")

    spectra: List[np.ndarray] = []
    for rho in rhos_per_factor:
        tr = np.real(np.einsum("nii->n", rho))
        if np.max(np.abs(tr - 1.0)) > 1e-10:
            raise SampleError("partial trace lost normalization")
        eig = eigenvalues_batch(rho)
        if eig.min(initial=0.0) < -1e-12:
            raise SampleError("reduced matrix not positive semidefinite")
        spectra.append(eig)
    samples = [tuple(tuple(float(x) for x in spectra[f][i])
                     for f in range(len(spectra)))
               for i in range(count)]
    return SampleBatch(problem=problem, seed=seed, count=count, samples=samples)


def _partial_trace(rho: np.ndarray, dims: Sequence[int], keep: int) -> np.ndarray:
    """Reduce a batch of density matrices on a tensor product to factor keep."""
    count = rho.shape[0]
    Nf = len(dims)
    t = rho.reshape((count,) + tuple(dims) + tuple(dims))
    remaining = list(range(Nf))
    for other in [o for o in range(Nf) if o != keep]:
        pos = remaining.index(other)
        n = len(remaining)
        t = np.trace(t, axis1=1 + pos, axis2=1 + n + pos)
        remaining.pop(pos)
    return t


# ---------------------------------------------------------------------------
# statistics and Kolmogorov-Smirnov comparison
# ---------------------------------------------------------------------------


def statistic_values(batch: SampleBatch, stat) -> np.ndarray:
    """Scalar statistic per sample.  stat is ('lmax', factor_index),
    ('purity', factor_index) or ('linear', coefficient tuple over the
    truncated spectra coordinates)."""
    if not batch.samples:
        raise SampleError("empty batch")
    kind = stat[0]
    if kind == "lmax":
        j = stat[1]
        return np.array([s[j][0] for s in batch.samples])
    if kind == "purity":
        j = stat[1]
        return np.array([sum(x * x for x in s[j]) for s in batch.samples])
    if kind == "linear":
        coeffs = [float(c) for c in stat[1]]
        vals = []
        for s in batch.samples:
            flat: List[float] = []
            for spec in s:
                flat.extend(spec[:-1])
            vals.append(sum(c * x for c, x in zip(coeffs, flat)))
        return np.array(vals)
    raise ValueError(f"unknown statistic {stat!r}")


def _statistic_covector(measure: PiecewiseMeasure, problem: MarginalProblem,
                        stat) -> List[Q]:
    dims = problem.rep.symmetry_group.factors
    r = sum(d - 1 for d in dims)
    if stat[0] == "lmax":
        a = [Q(0)] * r
        a[sum(d - 1 for d in dims[:stat[1]])] = Q(1)
        return a
    if stat[0] == "linear":
        a = [Q(c) for c in stat[1]]
        if len(a) != r:
            raise ValueError("linear statistic has the wrong length")
        return a
    raise ValueError("exact CDFs are available for 'lmax' and 'linear' only")


class ExactCDF:
    """Exact cumulative distribution of a linear statistic a . x under a
    piecewise measure.

    Pointwise queries clip every cell by the halfspace {a . x <= t}; full and
    empty cells are resolved from cached vertex extremes without integration.
    The distribution is a piecewise polynomial in t whose breakpoints are the
    vertex values of the statistic, so ``interpolate`` reconstructs it from
    finitely many exact queries and makes dense grids cheap."""

    def __init__(self, measure: PiecewiseMeasure, a: Sequence[Q]):
        self.measure = measure
        self.a = [Q(c) for c in a]
        # pieces: [h_rep, density, vmin, vmax, cached full mass(, ell, shift)]
        self._pieces: List[list] = []
        self._max_degree = 0
        for cell, dens in zip(measure.cells, measure.densities):
            if dens.is_zero():
                continue
            vals = [sum(ai * vi for ai, vi in zip(self.a, v))
                    for v in cell.vertices]
            self._pieces.append([list(cell.h_rep), dens, min(vals), max(vals),
                                 None])
            self._max_degree = max(self._max_degree, _total_degree(dens))
        for layer in measure.layers:
            if layer.order != 0:
                raise SampleError("CDF of a higher-order layer is undefined")
            if layer.density.is_zero():
                continue
            ell_w = tuple(sum(ai * layer.basis[i][k]
                              for k, ai in enumerate(self.a))
                          for i in range(len(layer.basis)))
            shift = sum(ai * oi for ai, oi in zip(self.a, layer.origin))
            if all(c == 0 for c in ell_w):
                # statistic is constant on the wall: a jump at `shift`
                mass = integrate_polynomial_over_cell(layer.density,
                                                      list(layer.support))
                self._pieces.append([list(layer.support), layer.density,
                                     shift, shift, mass])
                continue
            verts = polytope_vertices(list(layer.support))
            vals = [sum(ai * wi for ai, wi in zip(ell_w, w)) + shift
                    for w in verts]
            support = [(c[0], c[1]) for c in layer.support]
            # store in wall coordinates with the statistic rewritten there
            self._pieces.append([support, layer.density, min(vals), max(vals),
                                 None, ell_w, shift])
            self._max_degree = max(self._max_degree,
                                   _total_degree(layer.density))
        if not self._pieces:
            raise SampleError("CDF of an identically zero measure")
        self.lo = min(p[2] for p in self._pieces)
        self.hi = max(p[3] for p in self._pieces)

    def _full_mass(self, piece) -> Q:
        if piece[4] is None:
            piece[4] = integrate_polynomial_over_cell(piece[1], piece[0])
        return piece[4]

    def __call__(self, t) -> Q:
        t = Q(t)
        total = Q(0)
        for piece in self._pieces:
            h_rep, dens, vmin, vmax = piece[0], piece[1], piece[2], piece[3]
            if vmax <= t:
                total += self._full_mass(piece)
                continue
            if vmin >= t:
                continue
            if len(piece) == 7:
                ell, shift = piece[5], piece[6]
                clipped = list(h_rep) + [(tuple(ell), t - shift)]
            else:
                clipped = list(h_rep) + [(tuple(self.a), t)]
            verts = polytope_vertices(clipped)
            if len(verts) > len(clipped[0][0]):
                total += integrate_polynomial_over_cell(dens, clipped,
                                                        vertices=verts)
        return total

    def interpolate(self):
        """Piecewise-polynomial representation: (breakpoints, coefficient
        lists per interval, jump list); reconstructed by Newton interpolation
        at exact nodes inside each breakpoint interval."""
        breaks = sorted({self.lo, self.hi}
                        | {p[2] for p in self._pieces}
                        | {p[3] for p in self._pieces})
        jumps = [(p[2], p[4]) for p in self._pieces if p[2] == p[3]]
        deg = self._max_degree + len(self.a) + 1
        intervals = []
        for lo, hi in zip(breaks, breaks[1:]):
            nodes = [lo + (hi - lo) * Q(2 * j + 1, 2 * (deg + 1))
                     for j in range(deg + 1)]
            vals = [self(x) for x in nodes]
            intervals.append(_newton_coeffs(nodes, vals))
        return breaks, intervals, jumps

    def dense_values(self, ts: Sequence[float]) -> np.ndarray:
        breaks, intervals, jumps = self.interpolate()
        fb = [float(b) for b in breaks]
        out = np.empty(len(ts))
        for i, t in enumerate(ts):
            if t <= fb[0]:
                out[i] = 0.0 if t < fb[0] else float(self(breaks[0]))
                continue
            if t >= fb[-1]:
                out[i] = float(self(breaks[-1])) if t == fb[-1] else \
                    float(sum(self._full_mass(p) for p in self._pieces))
                continue
            k = max(0, min(len(intervals) - 1,
                           int(np.searchsorted(fb, t, side="right")) - 1))
            nodes, coeffs = intervals[k]
            acc = float(coeffs[-1])
            for c, x in zip(reversed(coeffs[:-1]), reversed(nodes[:-1])):
                acc = acc * (t - float(x)) + float(c)
            out[i] = acc
        return out


def _total_degree(poly) -> int:
    return max((sum(mono) for mono in poly.terms), default=0)


def _newton_coeffs(nodes: List[Q], vals: List[Q]):
    """Newton divided-difference coefficients (exact)."""
    coeffs = list(vals)
    n = len(nodes)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coeffs[i] = (coeffs[i] - coeffs[i - 1]) / (nodes[i] - nodes[i - j])
    return nodes, coeffs


def linear_statistic_cdf(measure: PiecewiseMeasure, a: Sequence[Q], t) -> Q:
    """Exact mass of the halfspace {a . x <= t} under the measure."""
    return ExactCDF(measure, a)(t)


def ks_distance(batch: SampleBatch, exact: PiecewiseMeasure, stat,
                grid_points: int = 513) -> float:
    """Kolmogorov-Smirnov statistic between the empirical law of a scalar
    statistic and its exact CDF, evaluated on a fixed fine grid spanning the
    support; the exact CDF is computed symbolically and rounded only at the
    comparison."""
    values = np.sort(statistic_values(batch, stat))
    n = len(values)
    a = _statistic_covector(exact, batch.problem, stat)
    cdf = ExactCDF(exact, a)
    lo, hi = float(cdf.lo), float(cdf.hi)
    ts = [lo + (hi - lo) * i / (grid_points - 1) for i in range(grid_points)]
    F = cdf.dense_values(ts)
    Fn = np.searchsorted(values, ts, side="right") / n
    return float(np.max(np.abs(Fn - F)))


def mean_and_stderr(batch: SampleBatch, stat) -> Tuple[float, float]:
    vals = statistic_values(batch, stat)
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(len(vals)))


# ---------------------------------------------------------------------------
# artifact output
# ---------------------------------------------------------------------------


def batch_to_csv(batch: SampleBatch, fileobj) -> None:
    """One row per sample: the concatenated subsystem spectra."""
    w = csv.writer(fileobj)
    dims = batch.problem.rep.symmetry_group.factors
    header: List[str] = []
    for j, d in enumerate(dims[:len(batch.samples[0]) if batch.samples else 0]):
        header.extend(f"s{j}_{i}" for i in range(len(batch.samples[0][j])))
    w.writerow(header)
    for s in batch.samples:
        w.writerow([f"{x:.12g}" for spec in s for x in spec])


def histogram_json(values: Sequence[float], bins: int = 64) -> dict:
    counts, edges = np.histogram(np.asarray(values), bins=bins)
    return {"schema": "histogram/1",
            "edges": [float(e) for e in edges],
            "counts": [int(c) for c in counts]}


def benchmark_eigensolver(count: int = 20000, d: int = 4, seed: int = 0) -> dict:
    """Wall-clock comparison of the compiled and pure-numpy Jacobi paths on
    identical random Hermitian batches; also checks they agree to 1e-10."""
    import time
    rng = _rng(seed)
    z = (rng.standard_normal((count, d, d))
         + 1j * rng.standard_normal((count, d, d)))
    mats = z + np.conj(np.swapaxes(z, 1, 2))
    out = {}
    if _use_numba():
        eigenvalues_batch(mats[:2].copy())  # compile outside the timing
        t0 = time.perf_counter()
        e_nb = _NUMBA_KERNEL(mats.astype(np.complex128, copy=True))
        out["numba_seconds"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    e_np = _jacobi_batch_numpy(mats)
    out["numpy_seconds"] = time.perf_counter() - t0
    if "numba_seconds" in out:
        out["max_abs_difference"] = float(np.max(np.abs(e_nb - e_np)))
    out["count"], out["dim"] = count, d
    return out
