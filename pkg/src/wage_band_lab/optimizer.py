"""Policy search: optimal wage bands, the welfare frontier, sweeps.

The planner picks a band to maximize W = omega * R + (1 - omega) * S
under one of three constraint sets: Full (floor and cap), MinWageOnly
(floor, no cap), NoIntervention (statutory floor only). Searching in
ability space keeps every candidate feasible; the winning band is
re-solved and reported in wage terms.

The search shares work aggressively: one separating path per floor
serves every cap above it through prefix integrals, so a grid pass
costs one path solve per floor plus a scalar root per cell. Winners
are polished by a derivative-free local step and then re-solved at
full tolerance, and the candidate sets are nested so the reported
optima always satisfy W_full >= W_minonly >= W_none.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.optimize import minimize

from .equilibrium import (
    ABILITY_TOL,
    AbilityBand,
    WageBand,
    solve_from_band,
    solve_from_thresholds,
)
from .errors import (
    ConfigError,
    DomainError,
    InfeasiblePolicyError,
    SolverError,
    WageBandError,
)
from .model import ModelParams, ParametricModel
from .separating import integrate_path
from .thresholds import (
    anchor_boundary,
    bottom_from_ability,
    pooling_wage,
    top_from_ability,
)
from .welfare import WelfareReport, pool_quadrature, welfare_report

FULL = "Full"
MIN_WAGE_ONLY = "MinWageOnly"
NO_INTERVENTION = "NoIntervention"
CONSTRAINTS = (FULL, MIN_WAGE_ONLY, NO_INTERVENTION)

SWEEPABLE = ("a", "q", "rho", "b")


@dataclass(frozen=True)
class SearchSettings:
    """Knobs for the policy search; defaults favor accuracy."""

    grid_points: int = 60
    polish_evals: int = 200
    pool_nodes: int = 129
    tie_tol: float = 1e-9


@dataclass(frozen=True)
class OptimalPolicy:
    constraint: str
    omega: float
    ability_band: AbilityBand
    wage_band: WageBand
    kind: str
    report: WelfareReport

    @property
    def z_lo(self) -> float:
        return self.ability_band.z_lo

    @property
    def z_hi(self) -> float:
        return self.ability_band.z_hi

    @property
    def t_lo(self) -> float:
        return self.wage_band.t_lo

    @property
    def t_hi(self) -> float:
        return self.wage_band.t_hi

    @property
    def welfare(self) -> float:
        return self.report.welfare


@dataclass(frozen=True)
class SweepRow:
    param: str
    value: float
    z_lo: float
    z_hi: float
    t_lo: float
    t_hi: float
    W_full: float
    W_minonly: float
    W_none: float
    gain_full_pct: float
    gain_minonly_pct: float


@dataclass(frozen=True)
class GainRow:
    """Welfare gains of the two policies over no intervention, in percent."""

    param: str
    value: float
    gain_full_pct: float
    gain_minonly_pct: float


@dataclass(frozen=True)
class FrontierPoint:
    z_lo: float
    z_hi: float
    worker_surplus: float
    firm_surplus: float


@dataclass(frozen=True)
class FrontierResult:
    """The achievable (S, R) cloud and its Pareto frontier.

    `points` holds every solved band and `pareto` indexes the
    undominated ones in increasing firm surplus. The reported frontier
    is the concave upper envelope fitted through the Pareto cloud
    (grid points generally sit a little inside the true boundary, the
    envelope is the consistent estimate of it). A convexity violation
    is an envelope point that fails to clear the chord of its
    neighbors by more than 1e-6, the signature of a flat or dented
    stretch of the frontier.
    """

    points: tuple[FrontierPoint, ...]
    pareto: tuple[int, ...]
    frontier: tuple[int, ...]
    convexity_violations: int
    no_intervention: FrontierPoint
    no_intervention_dominated: bool

    @property
    def pareto_points(self) -> tuple[FrontierPoint, ...]:
        return tuple(self.points[i] for i in self.pareto)

    @property
    def frontier_points(self) -> tuple[FrontierPoint, ...]:
        return tuple(self.points[i] for i in self.frontier)


class _PathTable:
    """One floor's worth of search machinery.

    Holds the separating path from z_lo to the top of the support and
    prefix integrals of the surplus densities along it, so any cap
    above this floor is priced with interpolation plus one scalar
    root for the pooled block.
    """

    def __init__(self, model, z_lo: float, *, pool_nodes: int):
        self.model = model
        self.pool_nodes = pool_nodes
        self.z_lo = float(z_lo)
        self.bottom = bottom_from_ability(self.z_lo, model)
        self._diag: tuple[float, float] | None = None
        span = model.z_max - self.z_lo
        if span <= ABILITY_TOL:
            self.path = None
            return
        eps = min(1e-4, 0.25 * span)
        anchor = anchor_boundary(self.bottom, model, eps=eps)
        self.path = integrate_path(anchor, model.z_max, model)
        mu, s, tau = self.path.mu, self.path.s, self.path.tau
        weight = model.ability_pdf(mu)
        u = model.utility(tau, s, mu)
        g = model.profit(tau, model.match_fn(mu), s, mu)
        self._s_prefix = cumulative_simpson(u * weight, x=mu, initial=0.0)
        self._r_prefix = cumulative_simpson(g * weight, x=mu, initial=0.0)

    def evaluate(self, z_hi: float) -> tuple[float, float]:
        """(S, R) for the band (z_lo, z_hi)."""
        model = self.model
        z_hi = min(max(z_hi, self.z_lo), model.z_max)
        floor = self.z_lo + ABILITY_TOL
        if self.path is not None:
            floor = max(floor, float(self.path.mu[0]) + 1e-12)
        if self.path is None or z_hi <= floor:
            return self._diagonal_pool()
        if z_hi >= model.z_max - ABILITY_TOL:
            return float(self._s_prefix[-1]), float(self._r_prefix[-1])
        s_sep = float(np.interp(z_hi, self.path.mu, self._s_prefix))
        r_sep = float(np.interp(z_hi, self.path.mu, self._r_prefix))
        block = top_from_ability(self.path, z_hi, model)
        s_pool, r_pool = pool_quadrature(
            model, block.t_hi, block.s_hi, block.z_hi, self.pool_nodes)
        return s_sep + s_pool, r_sep + r_pool

    def _diagonal_pool(self) -> tuple[float, float]:
        """(S, R) when the whole policy collapses to one wage.

        A single-wage band produces the free-entry pool: the wage that
        makes this floor the entry cut. That is also the limit of the
        banded equilibria as the cap tightens, so the search objective
        stays continuous at the diagonal.
        """
        if self._diag is None:
            t_p = pooling_wage(self.z_lo, self.model)
            s_p = self.model.kappa(t_p, self.z_lo)
            self._diag = pool_quadrature(
                self.model, t_p, s_p, self.z_lo, self.pool_nodes)
        return self._diag


@dataclass
class _Candidate:
    welfare: float
    z_lo: float
    z_hi: float

    @property
    def width(self) -> float:
        return self.z_hi - self.z_lo


def _better(cand: _Candidate, incumbent: _Candidate | None, tie_tol: float) -> bool:
    """Strictly better welfare wins; near-ties go to the wider band,
    then to the lower floor, so degenerate caps resolve to the least
    restrictive policy deterministically."""
    if incumbent is None:
        return True
    scale = max(1.0, abs(incumbent.welfare))
    gap = cand.welfare - incumbent.welfare
    if gap > tie_tol * scale:
        return True
    if gap < -tie_tol * scale:
        return False
    if cand.width > incumbent.width + 1e-12:
        return True
    if cand.width < incumbent.width - 1e-12:
        return False
    return cand.z_lo < incumbent.z_lo - 1e-12


def _weighted(s_val: float, r_val: float, omega: float) -> float:
    return omega * r_val + (1.0 - omega) * s_val


def _golden_section(fn, lo: float, hi: float, evals: int) -> float:
    """Golden-section minimizer on [lo, hi] with a fixed evaluation budget."""
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c = b - inv * (b - a)
    d = a + inv * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max(evals - 2, 0)):
        if b - a < 1e-10:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = fn(d)
    return c if fc <= fd else d


def optimize_all(model, omega: float, *,
                 search: SearchSettings = SearchSettings()) -> dict[str, OptimalPolicy]:
    """Best policy under each constraint set, from one shared pass."""
    if not 0.0 <= omega <= 1.0:
        raise DomainError("optimize_all: omega must lie in [0, 1]")

    z_min, z_max = model.z_min, model.z_max
    n = max(search.grid_points, 4)
    z_grid = np.linspace(z_min, z_max, n)
    step = (z_max - z_min) / (n - 1)

    tables: dict[float, _PathTable] = {}

    def table_for(z_lo: float) -> _PathTable:
        key = round(float(z_lo), 9)
        if key not in tables:
            tables[key] = _PathTable(model, key, pool_nodes=search.pool_nodes)
        return tables[key]

    best: dict[str, _Candidate | None] = {FULL: None, MIN_WAGE_ONLY: None}
    for z_lo in z_grid:
        try:
            table = table_for(z_lo)
        except SolverError:
            continue
        for delta in np.linspace(0.0, z_max - z_lo, n):
            z_hi = min(z_lo + delta, z_max)
            try:
                s_val, r_val = table.evaluate(z_hi)
            except SolverError:
                continue
            cand = _Candidate(_weighted(s_val, r_val, omega), z_lo, z_hi)
            if _better(cand, best[FULL], search.tie_tol):
                best[FULL] = cand
            if z_hi >= z_max - ABILITY_TOL and _better(
                    cand, best[MIN_WAGE_ONLY], search.tie_tol):
                best[MIN_WAGE_ONLY] = cand
    if best[FULL] is None:
        raise InfeasiblePolicyError(
            "optimize_all: no band on the search grid produced a solvable "
            "equilibrium")

    def polished_full(seed: _Candidate) -> tuple[float, float]:
        def objective(x) -> float:
            z_lo = min(max(x[0], z_min), z_max)
            delta = min(max(x[1], 0.0), z_max - z_lo)
            try:
                s_val, r_val = table_for(z_lo).evaluate(z_lo + delta)
            except SolverError:
                return 1e30
            return -_weighted(s_val, r_val, omega)

        x0 = np.array([seed.z_lo, seed.z_hi - seed.z_lo])
        simplex = np.array([x0, x0 + [0.5 * step, 0.0], x0 + [0.0, 0.5 * step]])
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"maxfev": search.polish_evals, "xatol": 1e-6,
                                "fatol": 1e-11, "initial_simplex": simplex})
        z_lo = min(max(float(res.x[0]), z_min), z_max)
        delta = min(max(float(res.x[1]), 0.0), z_max - z_lo)
        return z_lo, z_lo + delta

    def polished_floor(seed: _Candidate) -> float:
        def objective(z_lo: float) -> float:
            try:
                s_val, r_val = table_for(z_lo).evaluate(z_max)
            except SolverError:
                return 1e30
            return -_weighted(s_val, r_val, omega)

        lo = max(z_min, seed.z_lo - step)
        hi = min(z_max, seed.z_lo + step)
        best_z = _golden_section(objective, lo, hi,
                                 max(search.polish_evals // 2, 20))
        return min(max(best_z, z_min), z_max)

    def canonical(constraint: str, bands) -> OptimalPolicy:
        chosen = None
        chosen_parts = None
        for z_lo, z_hi in bands:
            try:
                if z_hi - z_lo <= ABILITY_TOL:
                    # one-wage policies are implemented as the
                    # free-entry pool cutting entry at this floor
                    t_p = pooling_wage(z_lo, model)
                    eq = solve_from_band((t_p, t_p), model)
                else:
                    eq = solve_from_thresholds((z_lo, z_hi), model)
                rep = welfare_report(eq, model, omega)
            except SolverError:
                continue
            cand = _Candidate(rep.welfare, eq.z_lo, eq.z_hi)
            if _better(cand, chosen, search.tie_tol):
                chosen = cand
                chosen_parts = (eq, rep)
        if chosen_parts is None:
            raise SolverError(f"optimize_all: no feasible candidate for {constraint}")
        eq, rep = chosen_parts
        return OptimalPolicy(constraint, float(omega), eq.ability_band,
                             eq.band, eq.kind, rep)

    none_band = (z_min, z_max)
    policies = {NO_INTERVENTION: canonical(NO_INTERVENTION, [none_band])}

    floor_bands = [none_band]
    if best[MIN_WAGE_ONLY] is not None:
        seed = best[MIN_WAGE_ONLY]
        floor_bands.append((seed.z_lo, z_max))
        if search.polish_evals > 0:
            floor_bands.append((polished_floor(seed), z_max))
    policies[MIN_WAGE_ONLY] = canonical(MIN_WAGE_ONLY, floor_bands)

    full_bands = list(floor_bands)
    full_bands.append((policies[MIN_WAGE_ONLY].z_lo, z_max))
    if best[FULL] is not None:
        seed = best[FULL]
        full_bands.append((seed.z_lo, seed.z_hi))
        if search.polish_evals > 0:
            full_bands.append(polished_full(seed))
    policies[FULL] = canonical(FULL, full_bands)
    return policies


def optimize(model, omega: float, constraint: str = FULL, *,
             search: SearchSettings = SearchSettings()) -> OptimalPolicy:
    """Best policy under one constraint set."""
    if constraint not in CONSTRAINTS:
        raise ConfigError(
            f"optimize: constraint must be one of {', '.join(CONSTRAINTS)};"
            f" got {constraint!r}")
    if constraint == NO_INTERVENTION:
        if not 0.0 <= omega <= 1.0:
            raise DomainError("optimize: omega must lie in [0, 1]")
        eq = solve_from_thresholds((model.z_min, model.z_max), model)
        rep = welfare_report(eq, model, omega)
        return OptimalPolicy(constraint, float(omega), eq.ability_band,
                             eq.band, eq.kind, rep)
    return optimize_all(model, omega, search=search)[constraint]


def _gain_pct(w_policy: float, w_base: float) -> float:
    """Welfare gain over a reference level, in percent of its size."""
    if abs(w_base) < 1e-15:
        raise DomainError("gain: reference welfare is zero")
    return 100.0 * (w_policy - w_base) / abs(w_base)


def _sweep_row(base: ModelParams, parameter: str, value: float, omega: float,
               search: SearchSettings) -> SweepRow:
    nan = float("nan")
    try:
        params = replace(base, **{parameter: float(value)})
        model = ParametricModel(params)
        policies = optimize_all(model, omega, search=search)
        full = policies[FULL]
        w_none = policies[NO_INTERVENTION].welfare
        return SweepRow(
            param=parameter,
            value=float(value),
            z_lo=full.z_lo,
            z_hi=full.z_hi,
            t_lo=full.t_lo,
            t_hi=full.t_hi,
            W_full=full.welfare,
            W_minonly=policies[MIN_WAGE_ONLY].welfare,
            W_none=w_none,
            gain_full_pct=_gain_pct(full.welfare, w_none),
            gain_minonly_pct=_gain_pct(policies[MIN_WAGE_ONLY].welfare, w_none),
        )
    except WageBandError:
        # a value the solver cannot handle yields a blank row rather
        # than sinking the rest of the sweep
        return SweepRow(parameter, float(value), nan, nan, nan, nan,
                        nan, nan, nan, nan, nan)


def sweep(parameter: str, values, omega: float, *,
          base: ModelParams | None = None,
          search: SearchSettings = SearchSettings(),
          threads: int = 1) -> list[SweepRow]:
    """Optimal policies as one primitive varies, other things equal.

    Rows come back in the order of `values` regardless of the thread
    count; each row is an independent full optimization.
    """
    if parameter not in SWEEPABLE:
        raise ConfigError(
            f"sweep: parameter must be one of {', '.join(SWEEPABLE)};"
            f" got {parameter!r}")
    base = base if base is not None else ModelParams()
    values = [float(v) for v in values]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(
                lambda v: _sweep_row(base, parameter, v, omega, search), values))
    return [_sweep_row(base, parameter, v, omega, search) for v in values]


def welfare_improvement(parameter: str, values, omega: float, *,
                        base: ModelParams | None = None,
                        search: SearchSettings = SearchSettings(),
                        threads: int = 1) -> list[GainRow]:
    """Percentage welfare gains of both policies over no intervention.

    One row per parameter value; the heavy lifting is the same as
    `sweep`, this just projects out the gain columns.
    """
    rows = sweep(parameter, values, omega, base=base, search=search,
                 threads=threads)
    return [GainRow(r.param, r.value, r.gain_full_pct, r.gain_minonly_pct)
            for r in rows]


def _pareto_indices(points: list[FrontierPoint]) -> list[int]:
    """Indices of points undominated in (firm surplus, worker surplus),
    returned in increasing firm surplus."""
    order = sorted(range(len(points)),
                   key=lambda i: (-points[i].firm_surplus,
                                  -points[i].worker_surplus))
    kept: list[int] = []
    best_s = -math.inf
    for i in order:
        if points[i].worker_surplus > best_s + 1e-12:
            kept.append(i)
            best_s = points[i].worker_surplus
    kept.reverse()
    return kept


def _upper_envelope(front: list[FrontierPoint]) -> list[int]:
    """Concave upper chain through points sorted by firm surplus."""
    chain: list[int] = []
    for i, p in enumerate(front):
        while len(chain) >= 2:
            o = front[chain[-2]]
            a = front[chain[-1]]
            cross = ((a.firm_surplus - o.firm_surplus)
                     * (p.worker_surplus - o.worker_surplus)
                     - (a.worker_surplus - o.worker_surplus)
                     * (p.firm_surplus - o.firm_surplus))
            if cross >= -1e-15:
                chain.pop()
            else:
                break
        chain.append(i)
    return chain


def _chord_violations(front: list[FrontierPoint], tol: float = 1e-6) -> int:
    """Frontier points that fail to rise above the chord of their
    neighbors.

    A strictly convex possibility set keeps every interior frontier
    point strictly above that chord; points sitting on or below it
    (within tol) flag a flat or concave stretch.
    """
    count = 0
    for j in range(1, len(front) - 1):
        left, mid, right = front[j - 1], front[j], front[j + 1]
        run = right.firm_surplus - left.firm_surplus
        if run <= 1e-15:
            continue
        frac = (mid.firm_surplus - left.firm_surplus) / run
        chord = left.worker_surplus + frac * (right.worker_surplus
                                              - left.worker_surplus)
        if mid.worker_surplus - chord <= tol:
            count += 1
    return count


def frontier(model, *, resolution: int = 40,
             search: SearchSettings = SearchSettings()) -> FrontierResult:
    """Trace the achievable (S, R) set over all bands.

    Evaluates every band on a triangular ability grid, marks the
    Pareto-undominated points as the frontier, counts chord
    (convexity) violations along it, and locates the no-intervention
    outcome inside the cloud.
    """
    res = max(int(resolution), 4)
    z_min, z_max = model.z_min, model.z_max
    raw: list[FrontierPoint] = []
    for z_lo in np.linspace(z_min, z_max, res):
        try:
            table = _PathTable(model, float(z_lo), pool_nodes=search.pool_nodes)
        except SolverError:
            continue
        for delta in np.linspace(0.0, z_max - z_lo, res):
            z_hi = min(z_lo + delta, z_max)
            try:
                s_val, r_val = table.evaluate(z_hi)
            except SolverError:
                continue
            raw.append(FrontierPoint(float(z_lo), float(z_hi), s_val, r_val))
    if not raw:
        raise InfeasiblePolicyError(
            "frontier: no band on the grid produced a solvable equilibrium")

    pareto = _pareto_indices(raw)
    pareto_pts = [raw[i] for i in pareto]
    chain = _upper_envelope(pareto_pts)
    envelope = [pareto[i] for i in chain]
    violations = _chord_violations([raw[i] for i in envelope])

    eq0 = solve_from_thresholds((z_min, z_max), model)
    rep0 = welfare_report(eq0, model, 0.5)
    base_point = FrontierPoint(z_min, z_max, rep0.worker_surplus,
                               rep0.firm_surplus)
    dominated = any(
        p.firm_surplus > base_point.firm_surplus + 1e-9
        and p.worker_surplus > base_point.worker_surplus + 1e-9
        for p in raw)
    return FrontierResult(tuple(raw), tuple(pareto), tuple(envelope),
                          violations, base_point, dominated)
