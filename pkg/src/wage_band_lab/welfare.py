"""Surplus accounting, by-ability profiles, and outcome distributions.

Worker surplus S integrates equilibrium utility against the ability
law; firm surplus R does the same with match profit. In the pooled
block workers are matched at random, so the firm indexed by ability z
keeps its own match quality n(z) but draws its worker from the pooled
segment: its expected profit is E[g(t_hi, n(z), s_hi, z') | z' >= z_hi],
and R integrates that expectation over z. Unmatched abilities
contribute zero to both. The policy objective is the weighted sum
W = omega * R + (1 - omega) * S.

Firms hold scarce match quality, so they collect sorting rents
whenever match quality varies with ability: R > 0 even without
intervention. With a flat match technology wage competition hands
the entire surplus to workers, R vanishes on the path and in any
firm-indifferent pool, and only a binding cap (a corner pool that
stops wage competition) pushes R above zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from .equilibrium import POOLING, Equilibrium, solve_from_thresholds
from .errors import DomainError

_POOL_NODES = 513
_PROFILE_GRID = 600


@dataclass(frozen=True)
class WelfareReport:
    omega: float
    worker_surplus: float
    firm_surplus: float
    welfare: float


@dataclass(frozen=True)
class Profile:
    """A quantity by ability under a policy and under a reference."""

    grid: np.ndarray
    policy_values: np.ndarray
    reference_values: np.ndarray
    crossings: tuple[float, ...]


@dataclass(frozen=True)
class OutcomeDistributions:
    """Education and wage CDFs as (point, cdf) rows.

    Point 0 collects workers without a match, so both distributions
    start with an atom of size G(z_lo) at 0.
    """

    education: np.ndarray
    wages: np.ndarray


def _path_bounds(eq: Equilibrium) -> tuple[float, float]:
    return float(eq.path.mu[0]), float(eq.path.mu[-1])


def _pool_contract(eq: Equilibrium):
    block = eq.pooling
    return block.t_hi, block.s_hi, block.z_hi


def _separating_integrals(eq: Equilibrium, model) -> tuple[float, float]:
    """(S, R) over the separating region, integrated on the path nodes."""
    path = eq.path
    if path is None or path.mu[-1] - path.mu[0] < 1e-12:
        return 0.0, 0.0
    mu, s, tau = path.mu, path.s, path.tau
    weight = model.ability_pdf(mu)
    u = model.utility(tau, s, mu)
    g = model.profit(tau, model.match_fn(mu), s, mu)
    return float(simpson(u * weight, x=mu)), float(simpson(g * weight, x=mu))


def pool_quadrature(model, t_hi: float, s_hi: float, z_hi: float,
                    nodes: int = _POOL_NODES) -> tuple[float, float]:
    """(S, R) contributed by a pool at contract (t_hi, s_hi) above z_hi.

    Matching inside the pool is random: the firm at index z keeps its
    match quality n(z) and earns the conditional expectation of profit
    over pooled workers, so the firm term is a double integral that
    collapses to profit at the conditional mean ability (profit is
    linear in the worker's ability).
    """
    if model.z_max - z_hi < 1e-14:
        return 0.0, 0.0
    z = np.linspace(z_hi, model.z_max, nodes)
    weight = model.ability_pdf(z)
    u = model.utility(t_hi, s_hi, z)
    g = model.expected_profit_above(t_hi, model.match_fn(z), s_hi, z_hi)
    return float(simpson(u * weight, x=z)), float(simpson(g * weight, x=z))


def _pooled_integrals(eq: Equilibrium, model, nodes: int) -> tuple[float, float]:
    """(S, R) over the pooled block [z_hi, z_max]."""
    if eq.pooling is None:
        return 0.0, 0.0
    t_hi, s_hi, z_hi = _pool_contract(eq)
    return pool_quadrature(model, t_hi, s_hi, z_hi, nodes)


def surpluses(eq: Equilibrium, model, *, pool_nodes: int = _POOL_NODES) -> tuple[float, float]:
    """Worker and firm surplus (S, R) for an equilibrium."""
    s_sep, r_sep = _separating_integrals(eq, model)
    s_pool, r_pool = _pooled_integrals(eq, model, pool_nodes)
    return s_sep + s_pool, r_sep + r_pool


def worker_surplus(eq: Equilibrium, model) -> float:
    return surpluses(eq, model)[0]


def firm_surplus(eq: Equilibrium, model) -> float:
    return surpluses(eq, model)[1]


def welfare_report(eq: Equilibrium, model, omega: float,
                   *, pool_nodes: int = _POOL_NODES) -> WelfareReport:
    if not 0.0 <= omega <= 1.0:
        raise DomainError("welfare_report: omega must lie in [0, 1]")
    s_val, r_val = surpluses(eq, model, pool_nodes=pool_nodes)
    w = omega * r_val + (1.0 - omega) * s_val
    return WelfareReport(float(omega), s_val, r_val, w)


def _utility_by_ability(eq: Equilibrium, model, z: np.ndarray) -> np.ndarray:
    """Equilibrium utility at each ability; zero for the unmatched."""
    z = np.asarray(z, dtype=float)
    out = np.zeros(z.shape)
    if eq.path is not None:
        lo, hi = _path_bounds(eq)
        lo_true = eq.ability_band.z_lo
        on = (z >= lo_true - 1e-12) & (z <= hi + 1e-12)
        if np.any(on):
            # clip into the computed range: an offset entry boundary
            # is read as its own bottom, not extrapolated
            zq = np.clip(z[on], lo, hi)
            tau = np.array([eq.path.query("wage_of_z", v) for v in zq])
            sig = np.array([eq.path.query("sigma_of_z", v) for v in zq])
            out[on] = model.utility(tau, sig, zq)
    if eq.pooling is not None:
        t_hi, s_hi, z_hi = _pool_contract(eq)
        if eq.kind == POOLING:
            pooled = z >= z_hi - 1e-12
        else:
            pooled = z > z_hi + 1e-12
        out[pooled] = model.utility(t_hi, s_hi, z[pooled])
    return out


def _profit_by_ability(eq: Equilibrium, model, z: np.ndarray) -> np.ndarray:
    """Match profit at each ability; zero for the unmatched."""
    z = np.asarray(z, dtype=float)
    out = np.zeros(z.shape)
    if eq.path is not None:
        lo, hi = _path_bounds(eq)
        lo_true = eq.ability_band.z_lo
        on = (z >= lo_true - 1e-12) & (z <= hi + 1e-12)
        if np.any(on):
            zq = np.clip(z[on], lo, hi)
            tau = np.array([eq.path.query("wage_of_z", v) for v in zq])
            sig = np.array([eq.path.query("sigma_of_z", v) for v in zq])
            out[on] = model.profit(tau, model.match_fn(zq), sig, zq)
    if eq.pooling is not None:
        t_hi, s_hi, z_hi = _pool_contract(eq)
        if eq.kind == POOLING:
            pooled = z >= z_hi - 1e-12
        else:
            pooled = z > z_hi + 1e-12
        out[pooled] = model.expected_profit_above(
            t_hi, model.match_fn(z[pooled]), s_hi, z_hi)
    return out


def _crossings(policy_fn, reference_fn, grid: np.ndarray) -> tuple[float, ...]:
    """Abilities where the policy-reference difference changes sign."""
    diff = policy_fn(grid) - reference_fn(grid)
    sign = np.sign(np.where(np.abs(diff) < 1e-13, 0.0, diff))

    def gap(v: float) -> float:
        point = np.array([v])
        return float(policy_fn(point)[0] - reference_fn(point)[0])

    found = []
    nonzero = np.nonzero(sign)[0]
    for a, b in zip(nonzero[:-1], nonzero[1:]):
        if sign[a] != sign[b]:
            found.append(float(brentq(gap, grid[a], grid[b], xtol=1e-10)))
    return tuple(found)


def _reference_equilibrium(model, reference):
    if reference is not None:
        return reference
    return solve_from_thresholds((model.z_min, model.z_max), model)


def worker_utility_profile(eq: Equilibrium, model, *, reference=None,
                           grid: int = _PROFILE_GRID) -> Profile:
    """Utility by ability under the policy and under a reference.

    The default reference is the no-intervention equilibrium. Sign
    changes of the difference are refined by bisection; the utility
    profile is continuous (marginal types are indifferent at both
    thresholds), so the refined points are genuine crossings.
    """
    ref = _reference_equilibrium(model, reference)
    z = np.linspace(model.z_min, model.z_max, grid)
    pol = lambda v: _utility_by_ability(eq, model, v)
    refv = lambda v: _utility_by_ability(ref, model, v)
    return Profile(z, pol(z), refv(z), _crossings(pol, refv, z))


def firm_profit_profile(eq: Equilibrium, model, *, reference=None,
                        grid: int = _PROFILE_GRID) -> Profile:
    """Profit by firm under the policy and under a reference.

    Firms are indexed by their match quality x = n(z), so the profile
    abscissa is x and the values are the profits of the firm holding
    that quality (expected profit when its segment pools). Requires a
    strictly increasing match technology; a flat n admits no firm
    index.
    """
    ref = _reference_equilibrium(model, reference)
    z = np.linspace(model.z_min, model.z_max, grid)
    x = model.match_fn(z)
    if not np.all(np.diff(x) > 0.0):
        raise DomainError(
            "firm_profit_profile: match quality must be strictly "
            "increasing in ability to index firms")
    pol = lambda v: _profit_by_ability(eq, model, v)
    refv = lambda v: _profit_by_ability(ref, model, v)
    cross_z = _crossings(pol, refv, z)
    cross_x = tuple(float(model.match_fn(c)) for c in cross_z)
    return Profile(x, pol(z), refv(z), cross_x)


def outcome_distributions(eq: Equilibrium, model, *,
                          points: int = 257) -> OutcomeDistributions:
    """Education and wage CDFs implied by an equilibrium.

    Both are right-continuous step data: rows (x, P(value <= x)).
    Unmatched workers sit at point 0; the pooled block is an atom at
    its contract.
    """
    z_lo = eq.ability_band.z_lo
    base = float(model.ability_cdf(z_lo))
    edu_rows = [(0.0, base)]
    wage_rows = [(0.0, base)]
    if eq.path is not None and eq.path.mu[-1] - eq.path.mu[0] > 1e-12:
        lo, hi = _path_bounds(eq)
        zgrid = np.linspace(lo, hi, points)
        cdf = model.ability_cdf(zgrid)
        for v, c in zip(zgrid, cdf):
            edu_rows.append((float(eq.path.query("sigma_of_z", float(v))), float(c)))
            wage_rows.append((float(eq.path.query("wage_of_z", float(v))), float(c)))
    if eq.pooling is not None:
        t_hi, s_hi, _ = _pool_contract(eq)
        edu_rows.append((s_hi, 1.0))
        wage_rows.append((t_hi, 1.0))
    else:
        edu_rows[-1] = (edu_rows[-1][0], 1.0)
        wage_rows[-1] = (wage_rows[-1][0], 1.0)
    return OutcomeDistributions(np.array(edu_rows), np.array(wage_rows))
