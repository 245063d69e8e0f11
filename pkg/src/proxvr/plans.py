"""Step-size and schedule planning for the variance-reduced solvers.

Every plan fixes eta = rho / L together with the minibatch size b (and, for
the epoch-based solver, the epoch length m).  Validity of a plan rests on
one scalar condition:

    epoch-based (svrg):   4 rho^2 m^2 / b + rho <= 1,   rho < 1/2
    table-based (saga):   16 n^2 rho^2 / b^3 + rho <= 1, rho < 1/2

Under these conditions a run of T inner iterations returns a uniformly
chosen iterate x_a with

    E ||G_eta(x_a)||^2 <= 2 L (F(x0) - F*) / (rho (1 - 2 rho) T),

and the named modes below instantiate the classical parameter choices whose
specialized constants are exposed by :meth:`StepPlan.gmap_bound`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

# rho must stay strictly below 1/2; this cap is used when the validity
# condition alone would allow rho = 1/2.
_RHO_CAP = 0.5 * (1.0 - 1e-9)

SVRG_MODES = ("thm1", "thm2", "general", "manual")
SAGA_MODES = ("thm3", "thm4", "general", "manual")


def ceil_pow(n: int, num: int, den: int) -> int:
    """ceil(n**(num/den)) in exact integer arithmetic."""
    target = n**num
    k = max(1, int(round(target ** (1.0 / den))))
    while k**den < target:
        k += 1
    while k > 1 and (k - 1) ** den >= target:
        k -= 1
    return k


def floor_root(n: int, den: int) -> int:
    """floor(n**(1/den)) in exact integer arithmetic."""
    k = max(1, int(round(n ** (1.0 / den))))
    while k**den > n:
        k -= 1
    while (k + 1) ** den <= n:
        k += 1
    return k


@dataclass(frozen=True)
class StepPlan:
    """A solver schedule: eta = rho/L, minibatch b, epoch length m (svrg only).

    ``T`` is the planned total of inner iterations when the planner fixes it
    (the PL restart plans); budget-driven runs leave it None.
    """

    kind: str
    n: int
    L: float
    b: int
    rho: float
    m: int | None = None
    T: int | None = None

    @property
    def eta(self) -> float:
        return self.rho / self.L

    def svrg_residual(self) -> float:
        """4 rho^2 m^2 / b + rho - 1; valid plans are <= 0."""
        if self.m is None:
            raise ValueError("plan has no epoch length m")
        return 4.0 * self.rho**2 * self.m**2 / self.b + self.rho - 1.0

    def saga_residual(self) -> float:
        """16 n^2 rho^2 / b^3 + rho - 1; valid plans are <= 0."""
        return 16.0 * self.n**2 * self.rho**2 / self.b**3 + self.rho - 1.0

    def gmap_bound(self, delta: float, T: int) -> float:
        """Upper bound on E ||G_eta(x_a)||^2 after T inner iterations.

        ``delta`` is the initial optimality gap F(x0) - F*.  Named modes use
        their specialized constants; general/manual plans use the generic
        2 L delta / (rho (1 - 2 rho) T) form.
        """
        if T < 1:
            raise ValueError("T must be >= 1")
        n, L = self.n, self.L
        if self.kind == "thm1":
            return 18.0 * L * n**2 / (3.0 * n - 2.0) * delta / T
        if self.kind == "thm2":
            return 18.0 * L * delta / T
        if self.kind == "thm3":
            return 50.0 * L * n**2 / (5.0 * n - 2.0) * delta / T
        if self.kind == "thm4":
            return 50.0 * L * delta / (3.0 * T)
        return 2.0 * L * delta / (self.rho * (1.0 - 2.0 * self.rho) * T)


def _shrink_to_valid(plan: StepPlan, residual) -> StepPlan:
    """Shrink rho until the validity condition holds (quadratic in rho, so
    the largest feasible rho below the current one is the positive root)."""
    if residual(plan) <= 0.0:
        return plan
    # residual(rho) = a rho^2 + rho - 1 with a > 0
    a = (residual(plan) + 1.0 - plan.rho) / plan.rho**2
    root = (-1.0 + math.sqrt(1.0 + 4.0 * a)) / (2.0 * a)
    return replace(plan, rho=min(plan.rho, root, _RHO_CAP))


def plan_svrg(n: int, L: float, mode: str = "thm2", b: int | None = None) -> StepPlan:
    """Plan for the epoch-based solver.

    thm1:    b = 1,  m = n,              eta = 1/(3 L n)
    thm2:    b = ceil(n^(2/3)), m = floor(n^(1/3)), eta = 1/(3 L)
    general: caller-chosen b, m = floor(sqrt(b)), rho = largest feasible
    """
    if n < 1 or not L > 0:
        raise ValueError(f"need n >= 1 and L > 0, got n={n}, L={L}")
    if mode not in ("thm1", "thm2", "general"):
        raise ValueError(f"unknown svrg plan mode {mode!r}")
    if mode == "thm1":
        plan = StepPlan("thm1", n, L, b=1, rho=1.0 / (3.0 * n), m=n)
    elif mode == "thm2":
        plan = StepPlan("thm2", n, L, b=ceil_pow(n, 2, 3), rho=1.0 / 3.0,
                        m=floor_root(n, 3))
    else:
        if b is None:
            raise ValueError("general mode needs an explicit batch size b")
        if not 1 <= b <= n:
            raise ValueError(f"batch size must satisfy 1 <= b <= n, got b={b}")
        m = floor_root(b, 2)
        a = 4.0 * m**2 / b
        root = (-1.0 + math.sqrt(1.0 + 4.0 * a)) / (2.0 * a)
        plan = StepPlan("general", n, L, b=b, rho=min(root, _RHO_CAP), m=m)
    if plan.b > n:
        raise ValueError(f"planned batch {plan.b} exceeds n={n}")
    plan = _shrink_to_valid(plan, StepPlan.svrg_residual)
    assert plan.svrg_residual() <= 1e-12 and plan.rho < 0.5
    return plan


def plan_saga(n: int, L: float, mode: str = "thm4", b: int | None = None) -> StepPlan:
    """Plan for the table-based solver.

    thm3:    b = 1,              eta = 1/(5 L n)
    thm4:    b = ceil(n^(2/3)),  eta = 1/(5 L)
    general: caller-chosen b, rho = min(1/5, b^(3/2) / (5 n))
    """
    if n < 1 or not L > 0:
        raise ValueError(f"need n >= 1 and L > 0, got n={n}, L={L}")
    if mode not in ("thm3", "thm4", "general"):
        raise ValueError(f"unknown saga plan mode {mode!r}")
    if mode == "thm3":
        plan = StepPlan("thm3", n, L, b=1, rho=1.0 / (5.0 * n))
    elif mode == "thm4":
        plan = StepPlan("thm4", n, L, b=ceil_pow(n, 2, 3), rho=1.0 / 5.0)
    else:
        if b is None:
            raise ValueError("general mode needs an explicit batch size b")
        if not 1 <= b <= n:
            raise ValueError(f"batch size must satisfy 1 <= b <= n, got b={b}")
        plan = StepPlan("general", n, L, b=b,
                        rho=min(0.2, b**1.5 / (5.0 * n)))
    if plan.b > n:
        raise ValueError(f"planned batch {plan.b} exceeds n={n}")
    plan = _shrink_to_valid(plan, StepPlan.saga_residual)
    assert plan.saga_residual() <= 1e-12 and plan.rho < 0.5
    return plan


def plan_pl(n: int, L: float, mu: float, flavor: str = "svrg",
            rho: float = 0.2) -> StepPlan:
    """Restart-stage plan for mu-PL objectives.

    Uses b = ceil(n^(2/3)), eta = rho/L with rho <= 1/5 (default exactly
    1/5, giving T = ceil(30 L/mu)), and T = ceil(6 L / (rho mu)) inner
    iterations per stage, which halves the expected optimality gap.
    """
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    if not 0 < rho <= 0.2:
        raise ValueError(f"stage rho must lie in (0, 1/5], got {rho}")
    if flavor not in ("svrg", "saga"):
        raise ValueError(f"unknown flavor {flavor!r}")
    b = ceil_pow(n, 2, 3)
    T = math.ceil(6.0 * L / (rho * mu))
    if flavor == "svrg":
        plan = StepPlan("pl_svrg", n, L, b=b, rho=rho, m=floor_root(n, 3), T=T)
        plan = _shrink_to_valid(plan, StepPlan.svrg_residual)
        assert plan.svrg_residual() <= 1e-12
    else:
        plan = StepPlan("pl_saga", n, L, b=b, rho=rho, T=T)
        plan = _shrink_to_valid(plan, StepPlan.saga_residual)
        assert plan.saga_residual() <= 1e-12
    return plan


def manual_plan(n: int, L: float, eta: float, b: int, m: int | None = None,
                T: int | None = None) -> StepPlan:
    """Wrap user-supplied parameters; validity is the caller's concern."""
    if not eta > 0 or not 1 <= b:
        raise ValueError(f"need eta > 0 and b >= 1, got eta={eta}, b={b}")
    return StepPlan("manual", n, L, b=b, rho=eta * L, m=m, T=T)
