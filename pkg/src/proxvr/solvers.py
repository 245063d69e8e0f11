"""Proximal solvers for composite finite sums.

Five methods share one contract: they consume a problem (which owns the
oracle counters), a starting point, and a deterministic random stream, and
they return a :class:`SolverOutput` holding the designated random output
``x_a``, the final iterate, and the recorded trace.

* ``prox_gd``      full-gradient proximal descent
* ``prox_sgd``     minibatch proximal stochastic gradient, t-inverse steps
* ``prox_svrg``    epoch-based variance reduction around a snapshot point
* ``prox_saga``    table-based variance reduction with a stored gradient row
                   per component
* ``pl_svrg`` / ``pl_saga``  restart wrappers that chain stage outputs for
                   objectives satisfying the composite PL inequality

The stochastic solvers draw minibatches uniformly *with replacement*; a
``sampler`` hook exists so tests can force deterministic batches.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import Array, RngStream, as_dense, norm2_sq, sample_with_replacement
from .metrics import RunTrace
from .plans import StepPlan
from .problems import CompositeProblem

# reservoir stream tag, kept fixed so runs are reproducible byte-for-byte
_PICK_TAG = 0x5EED

# abort threshold for the stochastic-gradient divergence guard
DIVERGENCE_LIMIT = 1e6

Sampler = Callable[[RngStream, int, int], Array]


class DivergenceError(RuntimeError):
    """Objective exceeded its start value by more than DIVERGENCE_LIMIT."""


@dataclass
class SolverOutput:
    x_a: Array
    x_last: Array
    trace: RunTrace
    counters: tuple[int, int]
    extras: dict = field(default_factory=dict)


def _as_stream(rng) -> RngStream:
    return rng if isinstance(rng, RngStream) else RngStream(int(rng))


class _Reservoir:
    """Uniform pick over a stream of candidates, O(d) memory."""

    def __init__(self, rng: RngStream):
        self.rng = rng
        self.count = 0
        self.pick: Array | None = None

    def offer(self, x: Array) -> None:
        self.count += 1
        if int(self.rng.integers(0, self.count)) == 0:
            self.pick = x.copy()


class TraceRecorder:
    """Checkpoints a run every ``stride`` effective passes.

    Checkpoint evaluations (F, suboptimality, squared gradient-mapping norm)
    run in measurement mode so they never touch the oracle counters.  When a
    ``guard`` is set, a checkpoint whose F exceeds the starting value by more
    than the guard aborts the run with :class:`DivergenceError`.
    """

    def __init__(self, problem: CompositeProblem, metadata: dict | None = None,
                 stride: float | None = None, baseline: float | None = None,
                 gmap_eta: float | None = None, guard: float | None = None):
        if stride is not None and not stride > 0:
            raise ValueError(f"stride must be positive, got {stride}")
        self.problem = problem
        self.trace = RunTrace(metadata=dict(metadata or {}))
        self.stride = stride
        self.baseline = baseline
        self.gmap_eta = gmap_eta
        self.guard = guard
        self._ifo0, self._po0 = problem.counters.snapshot()
        self._F_start: float | None = None
        self._next_mark = stride if stride is not None else math.inf

    def passes(self) -> float:
        return (self.problem.counters.ifo - self._ifo0) / self.problem.n

    def _measure(self, x: Array, eta: float | None) -> tuple[float, float | None, float]:
        p = self.problem
        with p.counters.paused():
            F = p.F_value(x)
            eta_eff = eta if eta is not None else self.gmap_eta
            if eta_eff is not None:
                g = p.full_gradient(x)
                y = p.prox(x - eta_eff * g, eta_eff)
                gmap_sq = norm2_sq((x - y) / eta_eff)
            else:
                gmap_sq = 0.0
        subopt = None if self.baseline is None else F - self.baseline
        return F, subopt, gmap_sq

    def _checkpoint(self, x: Array, eta: float | None) -> None:
        F, subopt, gmap_sq = self._measure(x, eta)
        ifo, po = self.problem.counters.snapshot()
        self.trace.record(self.passes(), ifo - self._ifo0, po - self._po0,
                          F, subopt, gmap_sq)
        if self._F_start is None:
            self._F_start = F
        elif self.guard is not None and F > self._F_start + self.guard:
            raise DivergenceError(
                f"objective diverged: F={F:.6g} exceeds start {self._F_start:.6g} "
                f"by more than {self.guard:g} at {self.passes():.3g} passes"
            )

    def start(self, x: Array, eta: float | None = None) -> None:
        self._checkpoint(x, eta)

    def step(self, x: Array, eta: float | None = None) -> None:
        if self.stride is None:
            return
        p = self.passes()
        if p >= self._next_mark - 1e-12:
            self._checkpoint(x, eta)
            self._next_mark = (math.floor(p / self.stride + 1e-12) + 1.0) * self.stride

    def finish(self, x: Array, eta: float | None = None) -> None:
        if self.trace.records and self.trace.records[-1].passes >= self.passes() - 1e-12:
            return
        self._checkpoint(x, eta)


def _base_metadata(solver: str, p: CompositeProblem, rng: RngStream | None,
                   **extra) -> dict:
    md = {"solver": solver, "n": p.n, "d": p.d, "L": p.L}
    if rng is not None:
        md["seed"] = rng.seed
    md.update(extra)
    return md


def _check_plan(plan: StepPlan, p: CompositeProblem, need_m: bool) -> None:
    if plan.b < 1 or plan.b > p.n:
        raise ValueError(f"plan batch size {plan.b} invalid for n={p.n}")
    if not plan.eta > 0:
        raise ValueError(f"plan step size must be positive, got {plan.eta}")
    if need_m and (plan.m is None or plan.m < 1):
        raise ValueError(f"plan needs a positive epoch length m, got {plan.m}")


def prox_gd(p: CompositeProblem, x0, eta: float, T: int, *,
            recorder: TraceRecorder | None = None, stride: float | None = None,
            baseline: float | None = None,
            on_iterate: Callable[[Array], None] | None = None) -> SolverOutput:
    """Batch proximal gradient descent: x <- prox_{eta h}(x - eta grad f(x)).

    Deterministic, so the designated output equals the final iterate.
    Costs (n, 1) oracle calls per iteration.
    """
    x = as_dense(x0, p.d).copy()
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    if T < 0:
        raise ValueError(f"iteration count must be nonnegative, got {T}")
    own = recorder is None
    rec = recorder or TraceRecorder(p, _base_metadata("proxgd", p, None, eta=eta, T=T),
                                    stride=stride, baseline=baseline, gmap_eta=eta)
    if own:
        rec.start(x)
    for _ in range(T):
        if on_iterate is not None:
            on_iterate(x)
        g = p.full_gradient(x)
        x = p.prox(x - eta * g, eta)
        rec.step(x)
    if own:
        rec.finish(x)
    return SolverOutput(x.copy(), x, rec.trace, p.counters.snapshot())


def prox_sgd(p: CompositeProblem, x0, eta0: float, b: int, T: int, *,
             eta_prime: float = 0.0, rng=0, sampler: Sampler | None = None,
             recorder: TraceRecorder | None = None, stride: float | None = None,
             baseline: float | None = None, guard: float | None = DIVERGENCE_LIMIT,
             on_iterate: Callable[[Array], None] | None = None) -> SolverOutput:
    """Minibatch proximal stochastic gradient with t-inverse step sizes.

    At step t the step size is eta0 / (1 + eta_prime * floor(t / n)); with
    eta_prime = 0 this is a fixed step size.  Each step samples b component
    indices with replacement and costs (b, 1) oracle calls.  Because plain
    stochastic steps can diverge on nonconvex composites, checkpoints abort
    once F exceeds its start value by ``guard``.
    """
    x = as_dense(x0, p.d).copy()
    if not eta0 > 0 or eta_prime < 0:
        raise ValueError(f"need eta0 > 0 and eta_prime >= 0, got {eta0}, {eta_prime}")
    if b < 1 or T < 0:
        raise ValueError(f"need b >= 1 and T >= 0, got b={b}, T={T}")
    rng = _as_stream(rng)
    draw = sampler or sample_with_replacement
    pick = _Reservoir(rng.derive(_PICK_TAG))
    own = recorder is None
    rec = recorder or TraceRecorder(
        p, _base_metadata("proxsgd", p, rng, eta0=eta0, eta_prime=eta_prime, b=b, T=T),
        stride=stride, baseline=baseline, gmap_eta=eta0, guard=guard)
    eta_t = eta0
    if own:
        rec.start(x, eta_t)
    for t in range(T):
        pick.offer(x)
        if on_iterate is not None:
            on_iterate(x)
        eta_t = eta0 / (1.0 + eta_prime * (t // p.n))
        idx = draw(rng, p.n, b)
        gbar = p.mean_grad_batch(idx, x)
        x = p.prox(x - eta_t * gbar, eta_t)
        rec.step(x, eta_t)
    if own:
        rec.finish(x, eta_t)
    x_a = pick.pick if pick.pick is not None else x.copy()
    return SolverOutput(x_a, x, rec.trace, p.counters.snapshot())


def prox_svrg(p: CompositeProblem, x0, plan: StepPlan, epochs: int, *,
              rng=0, sampler: Sampler | None = None,
              recorder: TraceRecorder | None = None, stride: float | None = None,
              baseline: float | None = None,
              on_iterate: Callable[[Array], None] | None = None) -> SolverOutput:
    """Epoch-based variance-reduced proximal solver.

    Each of the ``epochs`` rounds snapshots the current point, computes the
    full gradient there (n IFO calls), then runs ``plan.m`` inner steps.  An
    inner step draws a batch I of ``plan.b`` indices with replacement and
    moves through

        v = (1/b) sum_{i in I} [grad f_i(x) - grad f_i(snapshot)] + g
        x <- prox_{eta h}(x - eta v),

    so each inner step costs 2b IFO calls (both evaluation points) plus one
    PO call; a full run costs exactly (epochs*(n + 2*m*b), epochs*m).
    ``x_a`` is reservoir-sampled uniformly over all inner iterates, taken
    before each update.
    """
    x = as_dense(x0, p.d).copy()
    _check_plan(plan, p, need_m=True)
    if epochs < 0:
        raise ValueError(f"epoch count must be nonnegative, got {epochs}")
    rng = _as_stream(rng)
    draw = sampler or sample_with_replacement
    pick = _Reservoir(rng.derive(_PICK_TAG))
    eta = plan.eta
    own = recorder is None
    rec = recorder or TraceRecorder(
        p, _base_metadata("proxsvrg", p, rng, eta=eta, b=plan.b, m=plan.m,
                          epochs=epochs, plan=plan.kind),
        stride=stride, baseline=baseline, gmap_eta=eta)
    if own:
        rec.start(x)
    for _ in range(epochs):
        snapshot = x.copy()
        g = p.full_gradient(snapshot)
        for _ in range(plan.m):
            pick.offer(x)
            if on_iterate is not None:
                on_iterate(x)
            idx = draw(rng, p.n, plan.b)
            v = p.mean_grad_batch(idx, x) - p.mean_grad_batch(idx, snapshot) + g
            x = p.prox(x - eta * v, eta)
            rec.step(x)
    if own:
        rec.finish(x)
    x_a = pick.pick if pick.pick is not None else x.copy()
    return SolverOutput(x_a, x, rec.trace, p.counters.snapshot())


def prox_saga(p: CompositeProblem, x0, plan: StepPlan, T: int, *,
              rng=0, sampler: Sampler | None = None,
              init_table: Array | None = None, debug_check_mean: bool = False,
              recorder: TraceRecorder | None = None, stride: float | None = None,
              baseline: float | None = None,
              on_iterate: Callable[[Array], None] | None = None) -> SolverOutput:
    """Table-based variance-reduced proximal solver.

    Keeps one stored gradient row per component (O(n d) memory) and their
    running mean g.  A step draws two independent batches I, J of size
    ``plan.b`` with replacement and computes

        v = (1/b) sum_{i in I} [grad f_i(x) - table_i] + g,
        x <- prox_{eta h}(x - eta v),

    then refreshes table rows for J with gradients at the pre-update point
    (duplicates in J collapse to one assignment) and updates g incrementally.
    Building the table costs n IFO calls and each step 2b, so a run costs
    exactly (n + 2*b*T, T) unless ``init_table`` supplies pre-paid gradients.
    Every n steps g is recomputed from the table to stop floating-point
    drift; ``debug_check_mean`` asserts the drift stayed below 1e-10.
    ``x_a`` is reservoir-sampled uniformly over the pre-update iterates.
    """
    x = as_dense(x0, p.d).copy()
    _check_plan(plan, p, need_m=False)
    if T < 0:
        raise ValueError(f"iteration count must be nonnegative, got {T}")
    rng = _as_stream(rng)
    draw = sampler or sample_with_replacement
    pick = _Reservoir(rng.derive(_PICK_TAG))
    eta = plan.eta
    own = recorder is None
    rec = recorder or TraceRecorder(
        p, _base_metadata("proxsaga", p, rng, eta=eta, b=plan.b, T=T, plan=plan.kind),
        stride=stride, baseline=baseline, gmap_eta=eta)

    if init_table is None:
        table = p.grad_batch(np.arange(p.n), x)
    else:
        table = np.array(init_table, dtype=np.float64)
        if table.shape != (p.n, p.d):
            raise ValueError(f"init_table must have shape ({p.n}, {p.d})")
    g = table.mean(axis=0)

    if own:
        rec.start(x)
    for t in range(T):
        pick.offer(x)
        if on_iterate is not None:
            on_iterate(x)
        idx_i = draw(rng, p.n, plan.b)
        idx_j = draw(rng, p.n, plan.b)
        v = (p.grad_batch(idx_i, x) - table[idx_i]).mean(axis=0) + g
        x_next = p.prox(x - eta * v, eta)
        fresh = p.grad_batch(idx_j, x)
        uniq, first = np.unique(idx_j, return_index=True)
        rows = fresh[first]
        g = g + (rows - table[uniq]).sum(axis=0) / p.n
        table[uniq] = rows
        x = x_next
        if (t + 1) % p.n == 0:
            rescan = table.mean(axis=0)
            if debug_check_mean:
                drift = math.sqrt(norm2_sq(g - rescan))
                assert drift <= 1e-10 * (1.0 + math.sqrt(norm2_sq(rescan))), drift
            g = rescan
        rec.step(x)
    if own:
        rec.finish(x)
    x_a = pick.pick if pick.pick is not None else x.copy()
    return SolverOutput(x_a, x, rec.trace, p.counters.snapshot(),
                        extras={"gradient_table": table, "mean_gradient": g})


def _pl_run(inner: str, p: CompositeProblem, x0, plan: StepPlan, stages: int, *,
            rng, sampler, recorder, stride, baseline, on_iterate) -> SolverOutput:
    if plan.T is None:
        raise ValueError("PL restart plans must fix T (see plan_pl)")
    if stages < 0:
        raise ValueError(f"stage count must be nonnegative, got {stages}")
    rng = _as_stream(rng)
    own = recorder is None
    rec = recorder or TraceRecorder(
        p, _base_metadata(f"pl-{inner}", p, rng, eta=plan.eta, b=plan.b,
                          T=plan.T, stages=stages),
        stride=stride, baseline=baseline, gmap_eta=plan.eta)
    x = as_dense(x0, p.d).copy()
    if own:
        rec.start(x)
    for k in range(stages):
        stage_rng = rng.derive(k + 1)
        if inner == "svrg":
            epochs = math.ceil(plan.T / plan.m)
            out = prox_svrg(p, x, plan, epochs, rng=stage_rng, sampler=sampler,
                            recorder=rec, on_iterate=on_iterate)
        else:
            out = prox_saga(p, x, plan, plan.T, rng=stage_rng, sampler=sampler,
                            recorder=rec, on_iterate=on_iterate)
        x = out.x_a
    if own:
        rec.finish(x)
    return SolverOutput(x.copy(), x.copy(), rec.trace, p.counters.snapshot())


def pl_svrg(p: CompositeProblem, x0, plan: StepPlan, stages: int, *,
            rng=0, sampler: Sampler | None = None,
            recorder: TraceRecorder | None = None, stride: float | None = None,
            baseline: float | None = None,
            on_iterate: Callable[[Array], None] | None = None) -> SolverOutput:
    """Restart wrapper for mu-PL objectives around the epoch-based solver.

    Runs ``stages`` rounds, each a fresh inner run of ``plan.T`` iterations
    (rounded up to whole epochs) started from the previous round's designated
    output; each round halves the expected optimality gap under the plan from
    :func:`proxvr.plans.plan_pl`.
    """
    if plan.m is None:
        raise ValueError("pl_svrg needs an epoch length m in the plan")
    return _pl_run("svrg", p, x0, plan, stages, rng=rng, sampler=sampler,
                   recorder=recorder, stride=stride, baseline=baseline,
                   on_iterate=on_iterate)


def pl_saga(p: CompositeProblem, x0, plan: StepPlan, stages: int, *,
            rng=0, sampler: Sampler | None = None,
            recorder: TraceRecorder | None = None, stride: float | None = None,
            baseline: float | None = None,
            on_iterate: Callable[[Array], None] | None = None) -> SolverOutput:
    """Restart wrapper for mu-PL objectives around the table-based solver."""
    return _pl_run("saga", p, x0, plan, stages, rng=rng, sampler=sampler,
                   recorder=recorder, stride=stride, baseline=baseline,
                   on_iterate=on_iterate)
