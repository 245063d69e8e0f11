"""Composite finite-sum problems with incremental-oracle accounting.

A problem bundles a smooth finite sum f = (1/n) sum_i f_i with a prox-friendly
nonsmooth term h.  Every gradient/value evaluation of a component f_i goes
through the public methods below and ticks the IFO counter by one per
component touched; every prox evaluation through the problem ticks the PO
counter.  Diagnostics that must not be charged to the algorithm run inside
``problem.counters.paused()``.
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize_scalar

from .core import Array, RngStream, SparseVector, as_dense
from .prox import BallNonnegProx, L1Prox, ProxOperator


@dataclass
class OracleCounters:
    """Monotone tallies of incremental first-order and proximal oracle calls."""

    ifo: int = 0
    po: int = 0

    def __post_init__(self):
        self._pause_depth = 0

    def add_ifo(self, k: int) -> None:
        if self._pause_depth == 0:
            self.ifo += int(k)

    def add_po(self, k: int = 1) -> None:
        if self._pause_depth == 0:
            self.po += int(k)

    @contextmanager
    def paused(self):
        """Measurement mode: suspend counting for diagnostics."""
        self._pause_depth += 1
        try:
            yield self
        finally:
            self._pause_depth -= 1

    def snapshot(self) -> tuple[int, int]:
        return (self.ifo, self.po)


class CompositeProblem:
    """f(x) + h(x) with f = (1/n) sum f_i, each f_i L-smooth.

    Subclasses implement the raw (uncounted) hooks ``_batch_values``,
    ``_batch_grads`` and ``_batch_mean_grad``; the public methods add the
    oracle accounting on top.
    """

    def __init__(self, n: int, d: int, L: float, h: ProxOperator):
        if n < 1 or d < 1:
            raise ValueError(f"need n, d >= 1, got n={n}, d={d}")
        if not (L > 0) or not math.isfinite(L):
            raise ValueError(f"smoothness constant must be positive, got {L}")
        self.n = int(n)
        self.d = int(d)
        self.L = float(L)
        self.h = h
        self.counters = OracleCounters()

    # ---- raw hooks (no counting) -------------------------------------
    def _batch_values(self, idx: Array, x: Array) -> Array:
        raise NotImplementedError

    def _batch_grads(self, idx: Array, x: Array) -> Array:
        raise NotImplementedError

    def _batch_mean_grad(self, idx: Array, x: Array) -> Array:
        return self._batch_grads(idx, x).mean(axis=0)

    # ---- counted oracle surface --------------------------------------
    def ifo(self, i: int, x) -> tuple[float, Array]:
        """Incremental first-order oracle: (f_i(x), grad f_i(x)), one IFO call."""
        if not 0 <= i < self.n:
            raise ValueError(f"component index {i} out of range [0, {self.n})")
        x = as_dense(x, self.d)
        self.counters.add_ifo(1)
        idx = np.array([i])
        return float(self._batch_values(idx, x)[0]), self._batch_grads(idx, x)[0]

    def grad_batch(self, idx, x) -> Array:
        """Component gradients for each index in ``idx`` (len(idx) IFO calls)."""
        idx = np.asarray(idx, dtype=np.int64)
        x = as_dense(x, self.d)
        self.counters.add_ifo(len(idx))
        return self._batch_grads(idx, x)

    def mean_grad_batch(self, idx, x) -> Array:
        """(1/|idx|) sum of component gradients (len(idx) IFO calls)."""
        idx = np.asarray(idx, dtype=np.int64)
        x = as_dense(x, self.d)
        self.counters.add_ifo(len(idx))
        return self._batch_mean_grad(idx, x)

    def full_gradient(self, x) -> Array:
        """grad f(x) = (1/n) sum_i grad f_i(x); costs n IFO calls."""
        return self.mean_grad_batch(np.arange(self.n), x)

    def f_value(self, x) -> float:
        """f(x); costs n IFO calls."""
        x = as_dense(x, self.d)
        self.counters.add_ifo(self.n)
        return float(self._batch_values(np.arange(self.n), x).mean())

    def F_value(self, x) -> float:
        """F(x) = f(x) + h(x); +inf off dom(h)."""
        hx = self.h.value(x)
        if math.isinf(hx):
            return math.inf
        return self.f_value(x) + hx

    def h_value(self, x) -> float:
        return self.h.value(x)

    def prox(self, x, eta: float) -> Array:
        """Proximal oracle for h; one PO call."""
        self.counters.add_po(1)
        return self.h.prox(x, eta)

    def replicate(self) -> "CompositeProblem":
        """Same data, fresh counters; one instance per independent run."""
        raise NotImplementedError


def _row_matrix(rows: Sequence[SparseVector], d: int):
    """Stack sparse rows; dense array when small, CSR otherwise."""
    n = len(rows)
    nnz = sum(r.nnz for r in rows)
    if n * d <= 262144 or nnz > 0.25 * n * d:
        Z = np.zeros((n, d))
        for i, r in enumerate(rows):
            Z[i, r.indices] = r.values
        return Z
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices = np.concatenate([r.indices for r in rows]) if nnz else np.empty(0, dtype=np.int64)
    data = np.concatenate([r.values for r in rows]) if nnz else np.empty(0)
    indptr[1:] = np.cumsum([r.nnz for r in rows])
    return sp.csr_array((data, indices, indptr), shape=(n, d))


def _rows_from_matrix(Z: Array) -> list[SparseVector]:
    rows = []
    for i in range(Z.shape[0]):
        nz = np.nonzero(Z[i])[0]
        rows.append(SparseVector(nz, Z[i, nz], Z.shape[1]))
    return rows


class NnPcaProblem(CompositeProblem):
    """Sample-covariance direction finding on the nonnegative unit ball.

    f_i(x) = -(z_i' x)^2 with data rows z_i, h the indicator of
    {||x|| <= 1, x >= 0}.  Each f_i is 2||z_i||^2-smooth, so the uniform
    smoothness constant is L = 2 max_i ||z_i||^2 (L = 2 for normalized data).
    """

    def __init__(self, rows: Sequence[SparseVector], h: ProxOperator | None = None):
        if not rows:
            raise ValueError("need at least one data row")
        d = rows[0].dim
        if any(r.dim != d for r in rows):
            raise ValueError("all rows must share the same dimension")
        self.rows = list(rows)
        self._Z = _row_matrix(self.rows, d)
        max_sq = max(r.values @ r.values for r in self.rows)
        if max_sq <= 0:
            raise ValueError("data must contain a nonzero row")
        L = 2.0 * float(max_sq)
        super().__init__(len(rows), d, L, h if h is not None else BallNonnegProx(1.0))

    def _scores(self, idx, x):
        return self._Z[idx] @ x

    def _batch_values(self, idx, x):
        s = self._scores(idx, x)
        return -(s * s)

    def _batch_grads(self, idx, x):
        s = self._scores(idx, x)
        Zb = self._Z[idx]
        if sp.issparse(Zb):
            return sp.diags_array(-2.0 * s) @ Zb.toarray() if Zb.shape[0] else np.zeros((0, self.d))
        return (-2.0 * s)[:, None] * Zb

    def _batch_mean_grad(self, idx, x):
        s = self._scores(idx, x)
        return (self._Z[idx].T @ (-2.0 * s)) / len(idx)

    def dense_matrix(self) -> Array:
        return self._Z.toarray() if sp.issparse(self._Z) else np.asarray(self._Z)

    def replicate(self) -> "NnPcaProblem":
        other = object.__new__(NnPcaProblem)
        CompositeProblem.__init__(other, self.n, self.d, self.L, self.h)
        other.rows = self.rows
        other._Z = self._Z
        return other


class PlQuadraticProblem(CompositeProblem):
    """l1-regularized least squares with a positive-definite design.

    f_i(x) = (a_i' x - b_i)^2 / 2 and h = lam * ||.||_1.  With full-rank
    rows the smooth part is mu-strongly convex for
    mu = lambda_min((1/n) sum a_i a_i'), which puts F in the proximal-PL
    class with that same mu.
    """

    def __init__(self, design: Array, targets: Array, l1_weight: float,
                 h: ProxOperator | None = None):
        A = np.asarray(design, dtype=np.float64)
        b = np.asarray(targets, dtype=np.float64)
        if A.ndim != 2 or b.shape != (A.shape[0],):
            raise ValueError("design must be (n, d) with matching targets")
        self.A = A
        self.b = b
        self.l1_weight = float(l1_weight)
        L = float(np.max(np.einsum("ij,ij->i", A, A)))
        self.mu = float(np.linalg.eigvalsh(A.T @ A)[0] / A.shape[0])
        if self.mu <= 0:
            raise ValueError("design rows are rank deficient (mu <= 0)")
        super().__init__(A.shape[0], A.shape[1], L,
                         h if h is not None else L1Prox(self.l1_weight))

    def _residuals(self, idx, x):
        return self.A[idx] @ x - self.b[idx]

    def _batch_values(self, idx, x):
        r = self._residuals(idx, x)
        return 0.5 * r * r

    def _batch_grads(self, idx, x):
        r = self._residuals(idx, x)
        return r[:, None] * self.A[idx]

    def _batch_mean_grad(self, idx, x):
        r = self._residuals(idx, x)
        return (self.A[idx].T @ r) / len(idx)

    def replicate(self) -> "PlQuadraticProblem":
        other = object.__new__(PlQuadraticProblem)
        CompositeProblem.__init__(other, self.n, self.d, self.L, self.h)
        other.A = self.A
        other.b = self.b
        other.l1_weight = self.l1_weight
        other.mu = self.mu
        return other


def make_synthetic_nnpca(rng: RngStream, n: int, d: int,
                         normalize: bool = True) -> NnPcaProblem:
    """Random dense rows around a nonnegative mean direction.

    Rows are m + 0.5 * g with m drawn once uniformly from [0, 1]^d and g
    standard Gaussian, then scaled to unit norm when ``normalize`` is set.
    """
    if n < 1 or d < 1:
        raise ValueError(f"need n, d >= 1, got n={n}, d={d}")
    mean = rng.uniform(0.0, 1.0, size=d)
    Z = mean[None, :] + 0.5 * rng.normal(size=(n, d))
    if normalize:
        norms = np.linalg.norm(Z, axis=1)
        if np.any(norms == 0.0):
            raise ValueError("degenerate zero row drawn; retry with another seed")
        Z /= norms[:, None]
    return NnPcaProblem(_rows_from_matrix(Z))


def make_pl_quadratic(rng: RngStream, n: int, d: int, l1_weight: float,
                      noise: float = 0.1) -> PlQuadraticProblem:
    """Random full-rank least-squares instance with an l1 term."""
    if n < d:
        raise ValueError("need n >= d for a full-rank design")
    A = rng.normal(size=(n, d))
    x_star = rng.normal(size=d) / math.sqrt(d)
    b = A @ x_star + noise * rng.normal(size=n)
    return PlQuadraticProblem(A, b, l1_weight)


def grid_optimum_2d(p: NnPcaProblem, n_angles: int = 20001,
                    n_interior: int = 101) -> tuple[Array, float]:
    """Global optimum of a d=2 instance by quarter-circle sweep plus refinement.

    The smooth part is homogeneous of degree two and nonpositive, so the
    minimum lies on the unit arc; an interior grid is still swept as a
    guard.  The best arc angle is polished by bounded scalar minimization,
    giving F* accurate to well below 1e-8.
    """
    if p.d != 2:
        raise ValueError(f"only d=2 instances are supported, got d={p.d}")
    radius = p.h.radius if isinstance(p.h, BallNonnegProx) else 1.0
    Z = p.dense_matrix()

    def f_of_points(P):
        S = Z @ P
        return -(S * S).mean(axis=0)

    def f_of_angle(theta):
        u = np.array([math.cos(theta), math.sin(theta)]) * radius
        s = Z @ u
        return float(-(s * s).mean())

    angles = np.linspace(0.0, math.pi / 2.0, n_angles)
    arc = radius * np.vstack([np.cos(angles), np.sin(angles)])
    arc_vals = f_of_points(arc)
    k = int(np.argmin(arc_vals))

    rs = np.linspace(0.0, radius, n_interior)
    thetas = np.linspace(0.0, math.pi / 2.0, n_interior)
    grid = np.vstack([
        np.outer(rs, np.cos(thetas)).ravel(),
        np.outer(rs, np.sin(thetas)).ravel(),
    ])
    interior_vals = f_of_points(grid)
    j = int(np.argmin(interior_vals))

    halfwidth = angles[1] - angles[0]
    lo = max(0.0, angles[k] - halfwidth)
    hi = min(math.pi / 2.0, angles[k] + halfwidth)
    res = minimize_scalar(f_of_angle, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    best_theta = float(res.x)
    best_val = f_of_angle(best_theta)

    candidates = [
        (radius * np.array([math.cos(best_theta), math.sin(best_theta)]), best_val),
        (arc[:, k].copy(), float(arc_vals[k])),
        (grid[:, j].copy(), float(interior_vals[j])),
    ]
    x_star, f_star = min(candidates, key=lambda c: c[1])
    return x_star, f_star
