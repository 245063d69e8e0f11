"""Stationarity and convergence certificates, plus per-run trace recording.

The stationarity residual for a composite objective is the gradient mapping

    G_eta(x) = (x - prox_{eta h}(x - eta grad f(x))) / eta,

which reduces to grad f(x) when h = 0.  A random solver output is called
eps-accurate when the mean of ||G_eta||^2 over its randomness is at most eps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Array, as_dense, norm2_sq
from .problems import CompositeProblem


def gradient_mapping(p: CompositeProblem, x, eta: float, count: bool = True) -> Array:
    """G_eta(x); costs n IFO + 1 PO unless ``count=False`` (measurement mode)."""
    x = as_dense(x, p.d)
    if not (eta > 0.0):
        raise ValueError(f"eta must be positive, got {eta}")
    if count:
        g = p.full_gradient(x)
        y = p.prox(x - eta * g, eta)
    else:
        with p.counters.paused():
            g = p.full_gradient(x)
            y = p.prox(x - eta * g, eta)
    return (x - y) / eta


def gradient_mapping_sq(p: CompositeProblem, x, eta: float, count: bool = False) -> float:
    """||G_eta(x)||^2, uncounted by default (a reporting diagnostic)."""
    return norm2_sq(gradient_mapping(p, x, eta, count=count))


def is_eps_accurate(gmap_sq_estimate: float, eps: float) -> bool:
    """Accept an averaged ||G_eta||^2 estimate against the target eps."""
    if not (eps > 0.0):
        raise ValueError(f"eps must be positive, got {eps}")
    return gmap_sq_estimate <= eps


def pl_surplus(p: CompositeProblem, x, mu: float, count: bool = True) -> float:
    """The composite-PL quantity D_h(x, mu) = -2 mu min_y [<grad f(x), y-x> +
    (mu/2)||y-x||^2 + h(y) - h(x)].

    The inner minimizer is y* = prox_{h/mu}(x - grad f(x)/mu).  The true
    minimum is <= 0 (take y = x), so the result is clamped at zero against
    roundoff.  F is mu-PL when mu (F(x) - F*) <= D_h(x, mu)/2 everywhere.
    """
    x = as_dense(x, p.d)
    if not (mu > 0.0):
        raise ValueError(f"mu must be positive, got {mu}")
    hx = p.h_value(x)
    if math.isinf(hx):
        raise ValueError("x lies outside dom(h)")

    def inner():
        g = p.full_gradient(x)
        y = p.prox(x - g / mu, 1.0 / mu)
        val = float(g @ (y - x)) + 0.5 * mu * norm2_sq(y - x) + p.h_value(y) - hx
        return val

    if count:
        val = inner()
    else:
        with p.counters.paused():
            val = inner()
    return max(-2.0 * mu * val, 0.0)


@dataclass
class Checkpoint:
    passes: float
    ifo: int
    po: int
    F: float
    subopt: float | None
    gmap_sq: float


@dataclass
class RunTrace:
    """Per-checkpoint progress records for one solver run."""

    metadata: dict = field(default_factory=dict)
    records: list[Checkpoint] = field(default_factory=list)

    def record(self, passes: float, ifo: int, po: int, F: float,
               subopt: float | None, gmap_sq: float) -> None:
        for v in (passes, F, gmap_sq):
            if not math.isfinite(v):
                raise ValueError(f"non-finite checkpoint field: {v}")
        if gmap_sq < 0:
            raise ValueError("gmap_sq must be nonnegative")
        if self.records and passes < self.records[-1].passes:
            raise RuntimeError(
                f"effective passes regressed: {self.records[-1].passes} -> {passes}"
            )
        self.records.append(Checkpoint(passes, int(ifo), int(po), F, subopt, gmap_sq))

    @property
    def passes(self) -> np.ndarray:
        return np.array([r.passes for r in self.records])

    def final(self) -> Checkpoint:
        if not self.records:
            raise RuntimeError("trace has no records")
        return self.records[-1]
