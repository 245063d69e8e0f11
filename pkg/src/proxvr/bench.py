"""Experiment harness: configure a problem and solvers, run seeds, emit
CSV traces and an SVG comparison plot of median suboptimality curves.

Suboptimality is measured against a cached baseline objective value,
computed once per problem: the exact sweep optimum for 2-D instances of the
covariance problem, otherwise the best of several long proximal-gradient
runs from random starts.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace

import numpy as np

from .core import RngStream, as_dense, sample_with_replacement
from .libsvm import normalize_rows, parse_libsvm
from .metrics import Checkpoint, RunTrace
from .plans import StepPlan, manual_plan, plan_pl, plan_saga, plan_svrg
from .problems import (CompositeProblem, NnPcaProblem, PlQuadraticProblem,
                       grid_optimum_2d, make_pl_quadratic, make_synthetic_nnpca)
from .solvers import (DIVERGENCE_LIMIT, DivergenceError, TraceRecorder,
                      pl_saga, pl_svrg, prox_gd, prox_saga, prox_sgd, prox_svrg)

OUT_DIR_ENV = "PROXVR_OUT_DIR"

SOLVER_IDS = ("proxgd", "proxsgd", "proxsvrg", "proxsaga", "pl-svrg", "pl-saga")

CSV_HEADER = "solver,seed,passes,ifo,po,F,subopt,gmap_sq"

_SVG_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


class ConfigError(Exception):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    solvers: list[str] = field(default_factory=lambda: ["proxsvrg"])
    data_path: str | None = None
    synthetic: dict | None = None
    pl_testbed: dict | None = None
    plan_mode: str = "auto"
    eta: float | None = None
    batch: int | None = None
    epoch_len: int | None = None
    eta0: float = 0.1
    eta_prime: float = 0.0
    seeds: list[int] = field(default_factory=lambda: [1])
    passes: float = 20.0
    stride: float = 1.0
    warm_start: bool = False
    stages: int | None = None
    data_seed: int = 0
    baseline_iters: int = 10_000
    trace_path: str | None = None
    svg_path: str | None = None
    out_dir: str | None = None

    def resolved_out_dir(self) -> str:
        return self.out_dir or os.environ.get(OUT_DIR_ENV, ".")

    def validate(self) -> None:
        if not self.solvers:
            raise ConfigError("no solver selected")
        for s in self.solvers:
            if s not in SOLVER_IDS:
                raise ConfigError(f"unknown solver {s!r}; choose from {SOLVER_IDS}")
        sources = [x is not None for x in (self.data_path, self.synthetic, self.pl_testbed)]
        if sum(sources) != 1:
            raise ConfigError("exactly one of --data, --synthetic, --pl-testbed is required")
        if not self.passes > 0:
            raise ConfigError(f"passes budget must be positive, got {self.passes}")
        if not self.seeds:
            raise ConfigError("need at least one seed")
        if not self.stride > 0:
            raise ConfigError(f"checkpoint stride must be positive, got {self.stride}")
        if self.plan_mode not in ("auto", "thm1", "thm2", "thm3", "thm4", "general", "manual"):
            raise ConfigError(f"unknown plan mode {self.plan_mode!r}")
        for s in self.solvers:
            if self.plan_mode in ("thm1", "thm2") and s not in ("proxsvrg",):
                raise ConfigError(f"plan mode {self.plan_mode} applies to proxsvrg, not {s}")
            if self.plan_mode in ("thm3", "thm4") and s not in ("proxsaga",):
                raise ConfigError(f"plan mode {self.plan_mode} applies to proxsaga, not {s}")
            if self.epoch_len is not None and s in ("proxsaga", "proxgd", "proxsgd"):
                raise ConfigError(f"--epoch-len is an svrg parameter, invalid for {s}")
            if s in ("pl-svrg", "pl-saga") and self.pl_testbed is None:
                raise ConfigError(f"{s} needs the PL testbed problem (known mu)")
        if self.plan_mode == "general" and self.batch is None:
            raise ConfigError("general plan mode needs --batch")
        if self.plan_mode == "manual":
            if self.eta is None or self.batch is None:
                raise ConfigError("manual plan mode needs --eta and --batch")
            if "proxsvrg" in self.solvers and self.epoch_len is None:
                raise ConfigError("manual svrg plan needs --epoch-len")


def parse_seed_spec(spec: str) -> list[int]:
    """Parse '1..10', '3,5,9' or '7' into a seed list."""
    spec = spec.strip()
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        seeds = list(range(int(lo), int(hi) + 1))
    elif "," in spec:
        seeds = [int(tok) for tok in spec.split(",") if tok.strip()]
    else:
        seeds = [int(spec)]
    if not seeds:
        raise ConfigError(f"empty seed spec {spec!r}")
    return seeds


def parse_kv_pairs(spec: str) -> dict:
    """Parse 'n=512,d=20,normalize=true' into typed values."""
    out: dict = {}
    for item in spec.split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise ConfigError(f"expected key=value, got {item!r}")
        key, val = item.split("=", 1)
        key = key.strip()
        val = val.strip()
        if val.lower() in ("true", "false"):
            out[key] = val.lower() == "true"
        else:
            try:
                out[key] = int(val)
            except ValueError:
                try:
                    out[key] = float(val)
                except ValueError:
                    out[key] = val
    return out


def load_config(path: str) -> dict:
    """Read a flat key=value config file; '#' starts a comment."""
    values: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, val = line.split("=", 1)
            values[key.strip()] = val.strip()
    return values


# ---------------------------------------------------------------------------
# problem construction and baselines
# ---------------------------------------------------------------------------

def build_problem(cfg: ExperimentConfig) -> CompositeProblem:
    if cfg.data_path is not None:
        ds = normalize_rows(parse_libsvm(cfg.data_path))
        return NnPcaProblem(ds.rows)
    if cfg.synthetic is not None:
        params = dict(cfg.synthetic)
        rng = RngStream(cfg.data_seed).derive(7)
        return make_synthetic_nnpca(rng, int(params["n"]), int(params["d"]),
                                    normalize=bool(params.get("normalize", True)))
    params = dict(cfg.pl_testbed)
    rng = RngStream(cfg.data_seed).derive(8)
    return make_pl_quadratic(rng, int(params["n"]), int(params["d"]),
                             l1_weight=float(params.get("lam", 0.01)),
                             noise=float(params.get("noise", 0.1)))


def default_x0(p: CompositeProblem, rng: RngStream) -> np.ndarray:
    """Feasible starting point: a random nonnegative unit direction for the
    ball-constrained problem, a standard Gaussian point otherwise."""
    if isinstance(p, NnPcaProblem):
        u = np.abs(rng.normal(size=p.d))
        nrm = float(np.linalg.norm(u))
        return u / nrm if nrm > 0 else np.full(p.d, 1.0 / math.sqrt(p.d))
    return rng.normal(size=p.d)


def problem_fingerprint(p: CompositeProblem) -> str:
    h = hashlib.sha256()
    h.update(type(p).__name__.encode())
    h.update(repr(p.h).encode())
    h.update(np.float64(p.L).tobytes())
    if isinstance(p, NnPcaProblem):
        h.update(p.dense_matrix().tobytes())
    elif isinstance(p, PlQuadraticProblem):
        h.update(p.A.tobytes())
        h.update(p.b.tobytes())
    return h.hexdigest()


def compute_baseline(p: CompositeProblem, cache_dir: str | None = None,
                     iters: int = 10_000, starts: int = 5) -> float:
    """Best-known objective value used as the suboptimality reference.

    2-D covariance instances use the exact boundary sweep; everything else
    takes the minimum over ``starts`` proximal-gradient runs of ``iters``
    iterations with eta = 1/(2L) from seeded random starts.
    """
    key = f"{problem_fingerprint(p)}-{iters}-{starts}"
    cache_file = None
    if cache_dir is not None:
        cache_file = os.path.join(cache_dir, "baseline_cache.json")
        if os.path.exists(cache_file):
            with open(cache_file, "r", encoding="utf-8") as fh:
                cache = json.load(fh)
            if key in cache:
                return float(cache[key])

    if isinstance(p, NnPcaProblem) and p.d == 2:
        _, best = grid_optimum_2d(p)
    else:
        best = math.inf
        eta = 1.0 / (2.0 * p.L)
        for k in range(starts):
            q = p.replicate()
            x0 = default_x0(q, RngStream(1000 + k))
            out = prox_gd(q, x0, eta, iters)
            with q.counters.paused():
                best = min(best, q.F_value(out.x_last))

    if cache_file is not None:
        cache = {}
        if os.path.exists(cache_file):
            with open(cache_file, "r", encoding="utf-8") as fh:
                cache = json.load(fh)
        cache[key] = best
        os.makedirs(cache_dir, exist_ok=True)
        with open(cache_file, "w", encoding="utf-8") as fh:
            json.dump(cache, fh, indent=1, sort_keys=True)
    return best


# ---------------------------------------------------------------------------
# warm start
# ---------------------------------------------------------------------------

def run_warm_start(p: CompositeProblem, x0, rng: RngStream, eta0: float
                   ) -> tuple[np.ndarray, dict[int, np.ndarray]]:
    """n single-sample stochastic steps from x0.

    Returns the warmed point and, per component index touched, the gradient
    from its last evaluation (at the iterate current at that time); these
    seed the table-based solver's gradient memory.
    """
    x = as_dense(x0, p.d).copy()
    last_grad: dict[int, np.ndarray] = {}
    for _ in range(p.n):
        i = int(sample_with_replacement(rng, p.n, 1)[0])
        _, gi = p.ifo(i, x)
        last_grad[i] = gi
        x = p.prox(x - eta0 * gi, eta0)
    return x, last_grad


def saga_table_from_warm(p: CompositeProblem, x_warm: np.ndarray,
                         last_grad: dict[int, np.ndarray]) -> np.ndarray:
    """Gradient table seeded from warm-up evaluations; components never
    touched during warm-up are evaluated at the warmed point (counted)."""
    table = np.empty((p.n, p.d))
    unseen = [i for i in range(p.n) if i not in last_grad]
    for i, gi in last_grad.items():
        table[i] = gi
    if unseen:
        table[np.asarray(unseen)] = p.grad_batch(np.asarray(unseen), x_warm)
    return table


# ---------------------------------------------------------------------------
# running experiments
# ---------------------------------------------------------------------------

def _solver_plan(cfg: ExperimentConfig, solver: str, p: CompositeProblem):
    """Resolve (plan, eta) for one solver; warns on invalid manual plans."""
    n, L = p.n, p.L
    mode = cfg.plan_mode
    if solver == "proxgd":
        return None, (cfg.eta if cfg.eta is not None else 1.0 / (2.0 * L))
    if solver == "proxsgd":
        return None, cfg.eta0
    if solver == "proxsvrg":
        if mode == "manual":
            plan = manual_plan(n, L, cfg.eta, cfg.batch, m=cfg.epoch_len)
            if plan.svrg_residual() > 0:
                import warnings
                warnings.warn(f"manual svrg plan violates its validity condition "
                              f"(residual {plan.svrg_residual():.3g})")
        elif mode == "general":
            plan = plan_svrg(n, L, "general", b=cfg.batch)
        elif mode in ("thm1", "thm2"):
            plan = plan_svrg(n, L, mode)
        else:
            plan = plan_svrg(n, L, "thm2")
        return plan, plan.eta
    if solver == "proxsaga":
        if mode == "manual":
            plan = manual_plan(n, L, cfg.eta, cfg.batch)
            if plan.saga_residual() > 0:
                import warnings
                warnings.warn(f"manual saga plan violates its validity condition "
                              f"(residual {plan.saga_residual():.3g})")
        elif mode == "general":
            plan = plan_saga(n, L, "general", b=cfg.batch)
        elif mode in ("thm3", "thm4"):
            plan = plan_saga(n, L, mode)
        else:
            plan = plan_saga(n, L, "thm4")
        return plan, plan.eta
    # pl-svrg / pl-saga
    mu = getattr(p, "mu", None)
    if mu is None:
        raise ConfigError(f"{solver} needs a problem with known mu")
    plan = plan_pl(n, L, mu, flavor="svrg" if solver == "pl-svrg" else "saga")
    return plan, plan.eta


def _budget(solver: str, plan: StepPlan | None, passes: float, n: int,
            b: int, stages: int | None) -> int:
    """Iteration/epoch/stage count so the run spends about ``passes`` passes."""
    if solver == "proxgd":
        return max(1, math.ceil(passes))
    if solver == "proxsgd":
        return max(1, math.ceil(passes * n / b))
    if solver == "proxsvrg":
        per_epoch = n + 2 * plan.m * plan.b
        return max(1, math.ceil(passes * n / per_epoch))
    if solver == "proxsaga":
        return max(1, math.ceil((passes * n - n) / (2 * plan.b)))
    # pl wrappers: whole stages
    if stages is not None:
        return stages
    if solver == "pl-svrg":
        stage_cost = math.ceil(plan.T / plan.m) * (n + 2 * plan.m * plan.b)
    else:
        stage_cost = n + 2 * plan.b * plan.T
    return max(1, math.ceil(passes * n / stage_cost))


def run_single(cfg: ExperimentConfig, problem: CompositeProblem, solver: str,
               seed: int, baseline: float | None) -> RunTrace:
    """One (solver, seed) run on a fresh problem replica."""
    p = problem.replicate()
    rng = RngStream(seed)
    x0 = default_x0(p, rng.derive(999))
    plan, eta = _solver_plan(cfg, solver, p)
    b = cfg.batch if cfg.batch is not None else (plan.b if plan is not None else 1)
    metadata = {"solver": solver, "seed": seed, "eta": eta,
                "warm_start": cfg.warm_start}
    if solver == "proxsgd":
        metadata.update(eta0=cfg.eta0, eta_prime=cfg.eta_prime, b=b)
    elif plan is not None:
        metadata.update(plan=plan.kind, b=plan.b, m=plan.m)
    rec = TraceRecorder(p, metadata, stride=cfg.stride, baseline=baseline,
                        gmap_eta=eta,
                        guard=DIVERGENCE_LIMIT if solver == "proxsgd" else None)
    rec.start(x0)

    init_table = None
    if cfg.warm_start:
        x0, last_grad = run_warm_start(p, x0, rng.derive(555), cfg.eta0)
        if solver == "proxsaga":
            init_table = saga_table_from_warm(p, x0, last_grad)
        rec.step(x0)

    budget = _budget(solver, plan, cfg.passes, p.n, b, cfg.stages)
    if solver == "proxgd":
        out = prox_gd(p, x0, eta, budget, recorder=rec)
    elif solver == "proxsgd":
        out = prox_sgd(p, x0, cfg.eta0, b, budget, eta_prime=cfg.eta_prime,
                       rng=rng, recorder=rec)
    elif solver == "proxsvrg":
        out = prox_svrg(p, x0, plan, budget, rng=rng, recorder=rec)
    elif solver == "proxsaga":
        out = prox_saga(p, x0, plan, budget, rng=rng, recorder=rec,
                        init_table=init_table)
    elif solver == "pl-svrg":
        out = pl_svrg(p, x0, plan, budget, rng=rng, recorder=rec)
    else:
        out = pl_saga(p, x0, plan, budget, rng=rng, recorder=rec)
    rec.finish(out.x_last)
    return rec.trace


def run_experiment(cfg: ExperimentConfig):
    """Run every configured (solver, seed) pair; returns (traces, summary)."""
    cfg.validate()
    problem = build_problem(cfg)
    baseline = compute_baseline(problem, cache_dir=cfg.resolved_out_dir(),
                                iters=cfg.baseline_iters)
    traces = []
    for solver in cfg.solvers:
        for seed in cfg.seeds:
            traces.append(run_single(cfg, problem, solver, seed, baseline))
    summary = summarize(traces)
    if cfg.trace_path is not None:
        emit_csv(traces, _resolve_path(cfg.trace_path, cfg.resolved_out_dir()))
    if cfg.svg_path is not None:
        emit_svg(summary, _resolve_path(cfg.svg_path, cfg.resolved_out_dir()))
    return traces, summary


def _resolve_path(path: str, out_dir: str) -> str:
    if os.path.isabs(path):
        return path
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, path)


def tune_sgd(cfg: ExperimentConfig, eta0_grid=None, eta_prime_grid=None,
             tune_passes: float = 5.0, tune_seeds=None):
    """Grid-search the stochastic-gradient step-size schedule.

    Scores each (eta0, eta_prime) pair by the median final suboptimality
    over short runs; divergent runs score +inf.  Returns
    ((best_eta0, best_eta_prime), results) with one (eta0, eta_prime, score)
    row per combination.
    """
    eta0_grid = list(eta0_grid or (0.5, 0.2, 0.1, 0.05, 0.02, 0.01))
    eta_prime_grid = list(eta_prime_grid or (0.0, 1.0, 10.0))
    tune_seeds = list(tune_seeds or cfg.seeds[:3])
    problem = build_problem(cfg)
    baseline = compute_baseline(problem, cache_dir=cfg.resolved_out_dir(),
                                iters=cfg.baseline_iters)
    results = []
    for eta0 in eta0_grid:
        for eta_prime in eta_prime_grid:
            trial = replace(cfg, solvers=["proxsgd"], eta0=eta0,
                            eta_prime=eta_prime, passes=tune_passes,
                            seeds=tune_seeds, trace_path=None, svg_path=None)
            finals = []
            try:
                for seed in tune_seeds:
                    trace = run_single(trial, problem, "proxsgd", seed, baseline)
                    finals.append(trace.final().subopt)
                score = float(np.median(finals))
            except DivergenceError:
                score = math.inf
            results.append((eta0, eta_prime, score))
    best = min(results, key=lambda r: (r[2], r[0]))
    return (best[0], best[1]), results


# ---------------------------------------------------------------------------
# CSV and SVG emission
# ---------------------------------------------------------------------------

def _fmt(v: float) -> str:
    return f"{v:.17g}"


def emit_csv(traces: list[RunTrace], path: str) -> None:
    """Write one row per checkpoint, 17 significant digits, LF endings."""
    if not traces:
        raise ValueError("no traces to write")
    lines = [CSV_HEADER]
    for trace in traces:
        solver = trace.metadata.get("solver", "unknown")
        seed = trace.metadata.get("seed", 0)
        for r in trace.records:
            subopt = "" if r.subopt is None else _fmt(r.subopt)
            lines.append(f"{solver},{seed},{_fmt(r.passes)},{r.ifo},{r.po},"
                         f"{_fmt(r.F)},{subopt},{_fmt(r.gmap_sq)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path: str) -> list[RunTrace]:
    """Reparse a trace CSV into one RunTrace per (solver, seed) group."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"unrecognized CSV header in {path}")
    groups: dict[tuple[str, int], RunTrace] = {}
    for ln in lines[1:]:
        if not ln:
            continue
        solver, seed, passes, ifo, po, F, subopt, gmap_sq = ln.split(",")
        key = (solver, int(seed))
        if key not in groups:
            groups[key] = RunTrace(metadata={"solver": solver, "seed": int(seed)})
        groups[key].records.append(Checkpoint(
            float(passes), int(ifo), int(po), float(F),
            None if subopt == "" else float(subopt), float(gmap_sq)))
    return list(groups.values())


def summarize(traces: list[RunTrace]) -> list[tuple[str, np.ndarray, np.ndarray]]:
    """Per-solver median suboptimality curve over seeds.

    Falls back to raw objective values when no baseline was configured.
    Returns [(solver, passes, median_values)] in first-seen solver order.
    """
    by_solver: dict[str, list[RunTrace]] = {}
    for t in traces:
        by_solver.setdefault(t.metadata.get("solver", "unknown"), []).append(t)
    curves = []
    for solver, group in by_solver.items():
        n_rec = min(len(t.records) for t in group)
        passes = np.array([r.passes for r in group[0].records[:n_rec]])
        vals = np.array([
            [r.subopt if r.subopt is not None else r.F for r in t.records[:n_rec]]
            for t in group
        ])
        curves.append((solver, passes, np.median(vals, axis=0)))
    return curves


# Floor for the log axis; suboptimality can hit zero (or dip below a noisy
# baseline) and log10 must stay finite.
_LOG_FLOOR = 1e-16

SVG_WIDTH, SVG_HEIGHT = 640, 440
_MARGIN = {"left": 70, "right": 150, "top": 20, "bottom": 50}


def svg_transform(passes_range, log_range):
    """Data -> screen mapping; larger values map to smaller y (screen up)."""
    x_lo, x_hi = passes_range
    y_lo, y_hi = log_range
    plot_w = SVG_WIDTH - _MARGIN["left"] - _MARGIN["right"]
    plot_h = SVG_HEIGHT - _MARGIN["top"] - _MARGIN["bottom"]
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0

    def to_screen(passes, logval):
        sx = _MARGIN["left"] + (passes - x_lo) / x_span * plot_w
        sy = _MARGIN["top"] + (y_hi - logval) / y_span * plot_h
        return sx, sy

    return to_screen


def emit_svg(summary, path: str) -> None:
    """Static comparison chart: x = effective passes, y = log10 suboptimality."""
    if not summary:
        raise ValueError("no curves to plot")
    logs = [np.log10(np.maximum(vals, _LOG_FLOOR)) for _, _, vals in summary]
    x_lo = min(float(p.min()) for _, p, _ in summary)
    x_hi = max(float(p.max()) for _, p, _ in summary)
    y_lo = min(float(lg.min()) for lg in logs)
    y_hi = max(float(lg.max()) for lg in logs)
    to_screen = svg_transform((x_lo, x_hi), (y_lo, y_hi))

    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg",
                     width=str(SVG_WIDTH), height=str(SVG_HEIGHT),
                     viewBox=f"0 0 {SVG_WIDTH} {SVG_HEIGHT}")
    ET.SubElement(svg, "rect", x="0", y="0", width=str(SVG_WIDTH),
                  height=str(SVG_HEIGHT), fill="white")
    x0, y0 = to_screen(x_lo, y_lo)
    x1, y1 = to_screen(x_hi, y_hi)
    axes = ET.SubElement(svg, "g", stroke="black", fill="none")
    ET.SubElement(axes, "line", x1=f"{x0:.2f}", y1=f"{y0:.2f}",
                  x2=f"{x1:.2f}", y2=f"{y0:.2f}")
    ET.SubElement(axes, "line", x1=f"{x0:.2f}", y1=f"{y0:.2f}",
                  x2=f"{x0:.2f}", y2=f"{y1:.2f}")
    labels = ET.SubElement(svg, "g", attrib={"font-size": "12",
                                             "font-family": "sans-serif"})
    ET.SubElement(labels, "text", x=f"{(x0 + x1) / 2:.2f}",
                  y=f"{SVG_HEIGHT - 12}").text = "effective passes"
    ylab = ET.SubElement(labels, "text", x="16", y=f"{(y0 + y1) / 2:.2f}",
                         transform=f"rotate(-90 16 {(y0 + y1) / 2:.2f})")
    ylab.text = "log10 suboptimality"
    for val, sx in ((x_lo, x0), (x_hi, x1)):
        ET.SubElement(labels, "text", x=f"{sx:.2f}", y=f"{y0 + 16:.2f}").text = f"{val:g}"
    for val, sy in ((y_lo, y0), (y_hi, y1)):
        ET.SubElement(labels, "text", x="8", y=f"{sy:.2f}").text = f"{val:.2f}"

    for k, ((solver, passes, vals), lg) in enumerate(zip(summary, logs)):
        color = _SVG_COLORS[k % len(_SVG_COLORS)]
        pts = " ".join(f"{sx:.2f},{sy:.2f}"
                       for sx, sy in (to_screen(p, v) for p, v in zip(passes, lg)))
        ET.SubElement(svg, "polyline", points=pts, fill="none",
                      stroke=color, attrib={"stroke-width": "1.5",
                                            "data-solver": solver})
        ly = _MARGIN["top"] + 16 * (k + 1)
        lx = SVG_WIDTH - _MARGIN["right"] + 10
        ET.SubElement(svg, "line", x1=f"{lx}", y1=f"{ly - 4}", x2=f"{lx + 18}",
                      y2=f"{ly - 4}", stroke=color,
                      attrib={"stroke-width": "1.5"})
        txt = ET.SubElement(svg, "text", x=f"{lx + 24}", y=f"{ly}",
                            attrib={"font-size": "12",
                                    "font-family": "sans-serif"})
        txt.text = solver

    ET.indent(svg)
    ET.ElementTree(svg).write(path, encoding="unicode", xml_declaration=True)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write("\n")
