"""Closed-form proximal operators for the nonsmooth part of the objective.

Each operator evaluates both ``prox(x, eta) = argmin_y h(y) + ||y-x||^2/(2 eta)``
and ``value(x) = h(x)``, where indicator functions return ``math.inf`` off
their constraint set.  Outputs of ``prox`` are constructed exactly feasible;
``value`` tolerates constraint residuals up to ``INDICATOR_TOL``.
"""
from __future__ import annotations

import math

import numpy as np

from .core import Array, as_dense, norm2_sq

# Feasibility tolerance used only when *evaluating* indicator functions.
INDICATOR_TOL = 1e-9


class ProxOperator:
    """Base class: a convex nonsmooth term with a closed-form prox."""

    def prox(self, x, eta: float) -> Array:
        x = as_dense(x)
        if not (eta > 0.0) or not math.isfinite(eta):
            raise ValueError(f"prox step must be a positive finite real, got {eta}")
        return self._prox(x, eta)

    def value(self, x) -> float:
        return self._value(as_dense(x))

    def _prox(self, x: Array, eta: float) -> Array:
        raise NotImplementedError

    def _value(self, x: Array) -> float:
        raise NotImplementedError


class ZeroProx(ProxOperator):
    """h = 0: the prox is the identity."""

    def _prox(self, x, eta):
        return x.copy()

    def _value(self, x):
        return 0.0

    def __repr__(self):
        return "ZeroProx()"


class L1Prox(ProxOperator):
    """h(x) = lam * ||x||_1, prox = soft thresholding at lam*eta."""

    def __init__(self, lam: float):
        if lam < 0:
            raise ValueError(f"l1 weight must be nonnegative, got {lam}")
        self.lam = float(lam)

    def _prox(self, x, eta):
        t = self.lam * eta
        return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)

    def _value(self, x):
        return self.lam * float(np.abs(x).sum())

    def __repr__(self):
        return f"L1Prox(lam={self.lam})"


class BoxProx(ProxOperator):
    """Indicator of the box [lo, hi] (per coordinate); prox = clipping."""

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=np.float64)
        self.hi = np.asarray(hi, dtype=np.float64)
        if np.any(self.lo > self.hi):
            raise ValueError("box lower bound exceeds upper bound")

    def _prox(self, x, eta):
        return np.clip(x, self.lo, self.hi)

    def _value(self, x):
        lo = np.broadcast_to(self.lo, x.shape)
        hi = np.broadcast_to(self.hi, x.shape)
        if np.all(x >= lo - INDICATOR_TOL) and np.all(x <= hi + INDICATOR_TOL):
            return 0.0
        return math.inf

    def __repr__(self):
        return f"BoxProx(lo={self.lo}, hi={self.hi})"


class SimplexProx(ProxOperator):
    """Indicator of the unit simplex {y >= 0, sum(y) = 1}.

    Projection uses the sort-and-threshold scheme: sort descending,
    find the largest support whose shifted entries stay positive, clip.
    """

    def _prox(self, x, eta):
        u = np.sort(x)[::-1]
        css = np.cumsum(u) - 1.0
        k = np.arange(1, len(x) + 1)
        rho = np.nonzero(u - css / k > 0)[0][-1]
        theta = css[rho] / (rho + 1.0)
        return np.maximum(x - theta, 0.0)

    def _value(self, x):
        if np.all(x >= -INDICATOR_TOL) and abs(float(x.sum()) - 1.0) <= INDICATOR_TOL:
            return 0.0
        return math.inf

    def __repr__(self):
        return "SimplexProx()"


class BallNonnegProx(ProxOperator):
    """Indicator of {x : ||x|| <= radius, x >= 0}.

    Projection clips negatives to zero first, then rescales onto the ball
    if the clipped point lies outside; optimality of this order is covered
    by the brute-force and KKT oracle tests.
    """

    def __init__(self, radius: float = 1.0):
        if not radius > 0:
            raise ValueError(f"radius must be positive, got {radius}")
        self.radius = float(radius)

    def _prox(self, x, eta):
        y = np.maximum(x, 0.0)
        nrm = float(np.linalg.norm(y))
        if nrm > self.radius:
            y *= self.radius / nrm
        return y

    def _value(self, x):
        if np.all(x >= -INDICATOR_TOL) and float(np.linalg.norm(x)) <= self.radius + INDICATOR_TOL:
            return 0.0
        return math.inf

    def __repr__(self):
        return f"BallNonnegProx(radius={self.radius})"


def three_point_check(op: ProxOperator, x, z, eta: float, tol: float = 1e-9) -> bool:
    """Check the prox three-point inequality for y = prox(x, eta) against z.

    With y the prox output, verifies
        h(y) + ||y-x||^2/(2 eta) <= h(z) + ||z-x||^2/(2 eta) - ||y-z||^2/(2 eta) + tol
    for a feasible comparison point z.
    """
    x = as_dense(x)
    z = as_dense(z)
    y = op.prox(x, eta)
    hz = op.value(z)
    if math.isinf(hz):
        raise ValueError("comparison point z must be feasible for h")
    lhs = op.value(y) + norm2_sq(y - x) / (2.0 * eta)
    rhs = hz + norm2_sq(z - x) / (2.0 * eta) - norm2_sq(y - z) / (2.0 * eta)
    return lhs <= rhs + tol
