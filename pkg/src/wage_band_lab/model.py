"""Model primitives for the wage-band signaling market.

Workers of ability z choose an observable education level s, firms of
productivity x post wages conditional on education, and the market
matches them assortatively. The parametric family is

    h(t)      = (t**(1 - rho) - 1) / (1 - rho)        (ln t at rho = 1)
    c(s, z)   = beta * s**b / z                       for s > 0
    v(x, s, z) = A * (s**a + 1) * x * z + 1
    n(z)      = k * z**q

with worker utility u = h(t) - c(s, z) and firm profit g = v - t.
Abilities are uniform on [z_min, z_max]. A quasilinear variant with
homogeneous firms (u = t - 1 - s**2 / (2 z), v = 2 z + 1, z uniform on
[0, 3]) is kept alongside because it has closed forms for everything
and anchors the test suite.

Most callables accept numpy arrays elementwise; scalar inputs give
scalar outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DomainError, NoSolutionError, SingularBoundaryError

# Treating rho as exactly 1 within this tolerance avoids catastrophic
# cancellation in the power branch of h.
_RHO_LOG_TOL = 1e-9


def _maybe_scalar(x, *inputs):
    """Return a python float when every input was scalar."""
    if all(np.ndim(v) == 0 for v in inputs):
        return float(x)
    return x


def wage_utility(t, rho: float):
    """Consumption utility h(t) of a wage t.

    h(t) = (t**(1-rho) - 1) / (1 - rho), continuously extended to
    ln(t) at rho = 1. Normalized so h(1) = 0 for every rho.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0):
        raise DomainError("wage_utility: wage must be nonnegative")
    with np.errstate(divide="ignore"):
        if abs(rho - 1.0) < _RHO_LOG_TOL:
            out = np.log(t_arr)
        else:
            out = (t_arr ** (1.0 - rho) - 1.0) / (1.0 - rho)
    return _maybe_scalar(out, t)


def marginal_wage_utility(t, rho: float):
    """h'(t) = t**(-rho)."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0.0):
        raise DomainError("marginal_wage_utility: wage must be positive")
    return _maybe_scalar(t_arr ** (-rho), t)


def education_cost(s, z, beta: float, b: float):
    """Signaling cost c(s, z) = beta * s**b / z.

    The zero-education level is free for everyone, including z = 0;
    any positive education is infeasible at z = 0, encoded as +inf.
    """
    s_arr = np.asarray(s, dtype=float)
    z_arr = np.asarray(z, dtype=float)
    if np.any(s_arr < 0.0):
        raise DomainError("education_cost: education must be nonnegative")
    if np.any(z_arr < 0.0):
        raise DomainError("education_cost: ability must be nonnegative")
    with np.errstate(divide="ignore", invalid="ignore"):
        cost = beta * s_arr**b / z_arr
    cost = np.where(s_arr == 0.0, 0.0, cost)
    return _maybe_scalar(cost, s, z)


class Partials(NamedTuple):
    """First derivatives of u and g at a point (t, x, s, z)."""

    u_t: object
    u_s: object
    g_t: object
    g_s: object
    g_z: object


@dataclass(frozen=True)
class ModelParams:
    """Parameter set for the parametric variant.

    Defaults are the baseline calibration used throughout: returns to
    education a = 0.5, cost curvature b = 2, matching elasticity q = 1,
    linear consumption utility rho = 0, and unit scales elsewhere.
    """

    a: float = 0.5
    b: float = 2.0
    q: float = 1.0
    rho: float = 0.0
    beta: float = 0.5
    A: float = 1.0
    k: float = 1.0
    t_floor: float = 1.0
    z_min: float = 0.0
    z_max: float = 3.0
    ability_law: str = "uniform"

    def __post_init__(self):
        checks = [
            (0.0 <= self.a <= 1.0, "a must satisfy 0 <= a <= 1"),
            (self.b >= 1.0, "b must satisfy b >= 1"),
            (self.q >= 0.0, "q must satisfy q >= 0"),
            (self.rho >= 0.0, "rho must satisfy rho >= 0"),
            (self.beta > 0.0, "beta must be positive"),
            (self.A > 0.0, "A must be positive"),
            (self.k > 0.0, "k must be positive"),
            (self.t_floor >= 0.0, "t_floor must be nonnegative"),
            (self.z_min >= 0.0, "z_min must be nonnegative"),
            (self.z_min < self.z_max, "z_min must be below z_max"),
        ]
        for ok, msg in checks:
            if not ok:
                raise DomainError(f"ModelParams: {msg}")
        if self.ability_law != "uniform":
            raise DomainError(
                f"ModelParams: unsupported ability_law {self.ability_law!r}"
                " (only 'uniform' is implemented)"
            )


class _UniformAbilityMixin:
    """Shared uniform-ability machinery; subclasses set z_min/z_max."""

    z_min: float
    z_max: float

    def ability_pdf(self, z):
        z_arr = np.asarray(z, dtype=float)
        dens = 1.0 / (self.z_max - self.z_min)
        out = np.where((z_arr >= self.z_min) & (z_arr <= self.z_max), dens, 0.0)
        return _maybe_scalar(out, z)

    def ability_cdf(self, z):
        z_arr = np.asarray(z, dtype=float)
        span = self.z_max - self.z_min
        out = np.clip((z_arr - self.z_min) / span, 0.0, 1.0)
        return _maybe_scalar(out, z)

    def conditional_mean_ability(self, z_cut):
        """E[z | z >= z_cut] for the uniform law: (z_cut + z_max) / 2."""
        z_arr = np.asarray(z_cut, dtype=float)
        tol = 1e-9 * (self.z_max - self.z_min)
        if np.any(z_arr < self.z_min - tol) or np.any(z_arr > self.z_max + tol):
            raise DomainError("conditional_mean_ability: cutoff outside ability support")
        z_arr = np.clip(z_arr, self.z_min, self.z_max)
        return _maybe_scalar(0.5 * (z_arr + self.z_max), z_cut)

    def expected_profit_above(self, t, x, s, z_cut):
        """E[g(t, x, s, z') | z' >= z_cut].

        Profit is linear in ability in both variants, so the
        expectation equals profit at the conditional mean ability.
        """
        return self.profit(t, x, s, self.conditional_mean_ability(z_cut))

    @property
    def effective_floor(self) -> float:
        # Wages below the h-zero (t = 1 in both variants) attract no
        # workers, so the participation-relevant floor is max(t_floor, 1).
        return max(self.t_floor, 1.0)


class ParametricModel(_UniformAbilityMixin):
    """The parametric market defined in the module docstring."""

    kind = "parametric"

    def __init__(self, params: ModelParams | None = None):
        self.params = params if params is not None else ModelParams()

    @property
    def z_min(self) -> float:
        return self.params.z_min

    @property
    def z_max(self) -> float:
        return self.params.z_max

    @property
    def t_floor(self) -> float:
        return self.params.t_floor

    def utility(self, t, s, z):
        p = self.params
        return _maybe_scalar(
            np.asarray(wage_utility(t, p.rho)) - np.asarray(education_cost(s, z, p.beta, p.b)),
            t, s, z,
        )

    def production(self, x, s, z):
        p = self.params
        s_arr = np.asarray(s, dtype=float)
        return _maybe_scalar(p.A * (s_arr**p.a + 1.0) * np.asarray(x) * np.asarray(z) + 1.0, x, s, z)

    def profit(self, t, x, s, z):
        return _maybe_scalar(np.asarray(self.production(x, s, z)) - np.asarray(t), t, x, s, z)

    def match_fn(self, z):
        p = self.params
        z_arr = np.asarray(z, dtype=float)
        if np.any(z_arr < 0.0):
            raise DomainError("match_fn: ability must be nonnegative")
        with np.errstate(divide="ignore"):
            out = p.k * z_arr**p.q
        return _maybe_scalar(out, z)

    def kappa_indiff(self, t, z, u_target=0.0):
        """Education making a worker of ability z reach utility u_target at wage t.

        Solves h(t) - c(s, z) = u_target for s >= 0. At z = 0 only
        s = 0 is feasible, the continuous limit of the closed form.
        """
        p = self.params
        gap = np.asarray(wage_utility(t, p.rho), dtype=float) - np.asarray(u_target, dtype=float)
        if np.any(gap < -1e-12):
            raise NoSolutionError("kappa: wage too low to reach the target utility")
        gap = np.maximum(gap, 0.0)
        out = (np.asarray(z, dtype=float) * gap / p.beta) ** (1.0 / p.b)
        return _maybe_scalar(out, t, z, u_target)

    def kappa(self, t, z):
        """Indifference education: u(t, kappa(t, z), z) = 0."""
        return self.kappa_indiff(t, z, 0.0)

    def partials(self, t, x, s, z) -> Partials:
        """(u_t, u_s, g_t, g_s, g_z) at an interior point.

        Raises SingularBoundaryError at z <= 0 (cost derivative blows
        up) and at s = 0 when 0 < a < 1 with an active match (g_s ->
        +inf there); those corners are handled by dedicated boundary
        logic in the threshold solvers.
        """
        p = self.params
        t_arr = np.asarray(t, dtype=float)
        s_arr = np.asarray(s, dtype=float)
        z_arr = np.asarray(z, dtype=float)
        x_arr = np.asarray(x, dtype=float)
        if np.any(z_arr <= 0.0):
            raise SingularBoundaryError("partials: cost derivative undefined at z <= 0")
        if 0.0 < p.a < 1.0 and np.any((s_arr == 0.0) & (x_arr * z_arr > 0.0)):
            raise SingularBoundaryError("partials: g_s diverges as s -> 0 for 0 < a < 1")
        u_t = t_arr ** (-p.rho)
        u_s = -p.beta * p.b * s_arr ** (p.b - 1.0) / z_arr
        g_t = np.broadcast_to(-1.0, np.broadcast_shapes(t_arr.shape, s_arr.shape, z_arr.shape, x_arr.shape)).copy()
        if p.a == 0.0:
            g_s = np.zeros_like(g_t)
        else:
            g_s = p.a * p.A * s_arr ** (p.a - 1.0) * x_arr * z_arr
        g_z = p.A * (s_arr**p.a + 1.0) * x_arr
        if all(np.ndim(v) == 0 for v in (t, x, s, z)):
            return Partials(float(u_t), float(u_s), float(g_t), float(g_s), float(g_z))
        return Partials(u_t, u_s, g_t + np.zeros_like(u_s), g_s, g_z)

    def _phi(self, s, tau, mu):
        """Closed-form separating-path slopes (tau', mu').

        tau' = beta b s**(b-1) tau**rho / mu and mu' = (tau' - g_s)/g_z
        with the firm derivatives evaluated at x = n(mu), z = mu. Kept
        in plain arithmetic because it sits inside the ODE hot loop;
        pinned against the generic ode_rhs in the tests.
        """
        p = self.params
        slope = p.beta * p.b * s ** (p.b - 1.0) * tau**p.rho / mu
        x = p.k * mu**p.q
        if p.a == 0.0:
            g_s = 0.0 * slope
        else:
            g_s = p.a * p.A * s ** (p.a - 1.0) * x * mu
        g_z = p.A * (s**p.a + 1.0) * x
        return slope, (slope - g_s) / g_z


class ExampleModel(_UniformAbilityMixin):
    """Quasilinear variant with homogeneous firms and closed forms.

    u = t - 1 - s**2 / (2 z), v = 2 z + 1 (x and s do not enter
    production), n(z) = 1, abilities uniform on [0, 3], wage floor 1.
    """

    kind = "example"

    def __init__(self, z_min: float = 0.0, z_max: float = 3.0, t_floor: float = 1.0):
        if not z_min < z_max:
            raise DomainError("ExampleModel: z_min must be below z_max")
        self.z_min = float(z_min)
        self.z_max = float(z_max)
        self.t_floor = float(t_floor)

    def utility(self, t, s, z):
        # Same cost sentinel as the parametric family: s > 0 at z = 0
        # is infinitely costly, s = 0 is free.
        cost = education_cost(s, z, 0.5, 2.0)
        return _maybe_scalar(np.asarray(t, dtype=float) - 1.0 - np.asarray(cost), t, s, z)

    def production(self, x, s, z):
        # x and s do not enter production in this variant; broadcast so
        # array callers still get the shape they expect.
        shape = np.broadcast_shapes(np.shape(x), np.shape(s), np.shape(z))
        out = np.broadcast_to(2.0 * np.asarray(z, dtype=float) + 1.0, shape) + np.zeros(shape)
        return _maybe_scalar(out, x, s, z)

    def profit(self, t, x, s, z):
        return _maybe_scalar(np.asarray(self.production(x, s, z)) - np.asarray(t), t, x, s, z)

    def match_fn(self, z):
        out = np.ones_like(np.asarray(z, dtype=float))
        return _maybe_scalar(out, z)

    def kappa_indiff(self, t, z, u_target=0.0):
        gap = np.asarray(t, dtype=float) - 1.0 - np.asarray(u_target, dtype=float)
        if np.any(gap < -1e-12):
            raise NoSolutionError("kappa: wage too low to reach the target utility")
        gap = np.maximum(gap, 0.0)
        out = np.sqrt(2.0 * np.asarray(z, dtype=float) * gap)
        return _maybe_scalar(out, t, z, u_target)

    def kappa(self, t, z):
        return self.kappa_indiff(t, z, 0.0)

    def partials(self, t, x, s, z) -> Partials:
        t_arr = np.asarray(t, dtype=float)
        s_arr = np.asarray(s, dtype=float)
        z_arr = np.asarray(z, dtype=float)
        x_arr = np.asarray(x, dtype=float)
        if np.any(z_arr <= 0.0):
            raise SingularBoundaryError("partials: cost derivative undefined at z <= 0")
        shape = np.broadcast_shapes(t_arr.shape, s_arr.shape, z_arr.shape, x_arr.shape)
        ones = np.ones(shape)
        u_s = -s_arr / z_arr
        if all(np.ndim(v) == 0 for v in (t, x, s, z)):
            return Partials(1.0, float(u_s), -1.0, 0.0, 2.0)
        return Partials(ones, u_s + np.zeros(shape), -ones, np.zeros(shape), 2.0 * ones)

    def _phi(self, s, tau, mu):
        """Path slopes for the quasilinear variant: (s/mu, s/(2 mu))."""
        slope = s / mu
        return slope, 0.5 * slope + 0.0 * tau


@dataclass
class AssumptionCheck:
    name: str
    passed: bool
    worst_violation: float
    detail: str


@dataclass
class AssumptionReport:
    """Spot-check results for the maintained assumptions A-F."""

    checks: list[AssumptionCheck] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "checks": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "worst_violation": c.worst_violation,
                    "detail": c.detail,
                }
                for c in self.checks
            ],
        }


def _fd(fun, x, h):
    return (fun(x + h) - fun(x - h)) / (2.0 * h)


def validate_assumptions(model, grid: int = 20) -> AssumptionReport:
    """Spot-check the maintained assumptions on a grid; never raises.

    Violations are reported with their worst magnitude so that
    deliberately stressed parameter sets (a = 0, a = 1, b = 1,
    t_floor != 1) show up as findings rather than crashes.
    """
    report = AssumptionReport()
    eps = 1e-6
    floor = model.effective_floor
    t_grid = np.linspace(floor + 1e-4, floor + 10.0, grid)
    s_grid = np.linspace(1e-3, 5.0, grid)
    z_lo = model.z_min + max(1e-4, 1e-4 * (model.z_max - model.z_min))
    z_grid = np.linspace(z_lo, model.z_max, grid)
    tt, ss, zz = np.meshgrid(t_grid, s_grid, z_grid, indexing="ij")
    xx = model.match_fn(zz)

    def add(name, worst, tol, detail):
        worst = float(worst)
        report.checks.append(AssumptionCheck(name, worst <= tol, worst, detail))

    pts = model.partials(tt, xx, ss, zz)

    # A: utility monotone and concave in the wage, cost convex in s and
    # decreasing in z.
    u_tt = _fd(lambda h_: np.asarray(model.partials(tt + h_, xx, ss, zz).u_t), 0.0, eps)
    c_z = _fd(lambda h_: -np.asarray(model.utility(tt, ss, zz + h_)), 0.0, eps * zz)
    u_ss = _fd(lambda h_: np.asarray(model.partials(tt, xx, ss + h_, zz).u_s), 0.0, eps)
    worst_a = max(
        np.max(-pts.u_t),           # need u_t > 0
        np.max(u_tt) - 1e-6,        # need u_tt <= 0
        np.max(c_z) - 1e-6,         # need cost decreasing in z
        np.max(u_ss) - 1e-6,        # need u_ss <= 0 (cost convex in s)
    )
    add("A_worker_preferences", worst_a, 0.0, "u_t>0, u_tt<=0, c_z<=0, c_ss>=0 on grid")

    # B: production gains from firm productivity and ability, profit
    # strictly decreasing in the wage.
    v_x = _fd(lambda h_: np.asarray(model.production(xx + h_, ss, zz)), 0.0, eps)
    worst_b = max(np.max(-v_x) - 1e-9, np.max(-pts.g_z), np.max(pts.g_t))
    add("B_firm_payoffs", worst_b, 0.0, "v_x>=0, g_z>0, g_t<0 on grid")

    # C: signaling limits and single crossing. The marginal-cost limit
    # checks fail by design at b = 1 (u_s does not vanish) and at
    # a in {0, 1} (g_s does not diverge).
    z_mid = 0.5 * (z_grid[0] + z_grid[-1])
    try:
        lim = model.partials(floor + 1.0, model.match_fn(z_mid), 1e-8, z_mid)
        us0 = abs(float(lim.u_s))
        gs0 = float(lim.g_s)
    except SingularBoundaryError:
        # diverging g_s is exactly what assumption C wants
        us0, gs0 = 0.0, np.inf
    steep = -np.asarray(pts.u_s) / np.asarray(pts.u_t)
    dz = z_grid[1] - z_grid[0]
    single_cross = np.max(np.diff(steep, axis=2)) / dz
    worst_c = max(us0 - 1e-4, (0.0 if gs0 > 1e3 else 1.0), single_cross - 1e-9)
    add("C_signaling", worst_c, 0.0, "u_s->0 and g_s->inf as s->0; -u_s/u_t decreasing in z")

    # D: matching function monotone and nonnegative.
    n_vals = np.asarray(model.match_fn(z_grid))
    worst_d = max(np.max(-n_vals), np.max(-np.diff(n_vals)) - 1e-12)
    add("D_matching", worst_d, 0.0, "n(z)>=0 and weakly increasing")

    # E: participation normalization at the bottom of the market.
    worst_e = abs(model.utility(model.t_floor, 0.0, model.z_min)) if model.t_floor > 0 else 1.0
    add("E_normalization", worst_e, 1e-12, "u(t_floor, 0, z_min) = 0")

    # F: gains from trade at the floor and losses at high wages, so a
    # bilateral upper wage exists.
    f_vals = []
    for z in z_grid:
        x = model.match_fn(z)
        f_vals.append(model.profit(floor, x, model.kappa(floor, z), z))
    worst_floor = -min(f_vals)
    t_big = floor + 1.0
    sign_change = False
    for _ in range(60):
        t_big *= 2.0
        if model.profit(t_big, model.match_fn(model.z_max), model.kappa(t_big, model.z_max), model.z_max) < 0.0:
            sign_change = True
            break
    worst_f = max(worst_floor, 0.0 if sign_change else np.inf)
    add("F_gains_from_trade", worst_f, 1e-9, "f(t_floor, z) >= 0 and f < 0 for large t")

    return report
