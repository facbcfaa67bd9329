"""Equilibrium assembly: thresholds <-> wage bands, regimes, beliefs.

A policy is a wage band [t_lo, t_hi]. Equivalently an ability band
[z_lo, z_hi]: the floor excludes abilities below z_lo, the cap pools
abilities above z_hi. Three regimes arise:

  Separating   the cap never binds (z_hi = z_max),
  WellBehaved  separating on [z_lo, z_hi], pooled block above,
  Pooling      no separating region at all (z_hi = z_lo).

Regime boundaries are classified with an ability tolerance of 1e-6
and solved by the threshold systems in `thresholds`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ClassificationError, DomainError, NoSolutionError
from .separating import BottomBoundary, SeparatingPath, integrate_path
from .thresholds import (
    PoolingBlock,
    anchor_boundary,
    bottom_from_ability,
    bottom_from_wage,
    pooling_only,
    top_from_ability,
    top_from_wage,
)

SEPARATING = "Separating"
WELL_BEHAVED = "WellBehaved"
POOLING = "Pooling"

# abilities closer than this are the same threshold
ABILITY_TOL = 1e-6


@dataclass(frozen=True)
class AbilityBand:
    z_lo: float
    z_hi: float


@dataclass(frozen=True)
class WageBand:
    """Policy band; t_hi = math.inf encodes an absent cap."""

    t_lo: float
    t_hi: float


@dataclass(frozen=True)
class TruncatedAbility:
    """Belief supported on [z_lo, z_hi] with the prior's shape."""

    z_lo: float
    z_hi: float


@dataclass
class Equilibrium:
    kind: str
    boundary: BottomBoundary
    path: SeparatingPath | None
    pooling: PoolingBlock | None
    band: WageBand
    ability_band: AbilityBand

    @property
    def z_lo(self) -> float:
        return self.ability_band.z_lo

    @property
    def z_hi(self) -> float:
        return self.ability_band.z_hi


def _as_ability_band(band) -> AbilityBand:
    if isinstance(band, AbilityBand):
        return band
    z_lo, z_hi = band
    return AbilityBand(float(z_lo), float(z_hi))


def _as_wage_band(band) -> WageBand:
    if isinstance(band, WageBand):
        return band
    t_lo, t_hi = band
    return WageBand(float(t_lo), float(t_hi))


def _truncate_path(path: SeparatingPath, z_hi: float, model) -> SeparatingPath:
    """Restrict a path to beliefs <= z_hi, with an exact terminal node."""
    if z_hi >= float(path.mu[-1]) - 1e-12:
        return path
    s_end = path.query("sigma_of_z", z_hi)
    tau_end = path.query("wage_of_z", z_hi)
    keep = path.mu < z_hi - 1e-12
    s = np.append(path.s[keep], s_end)
    tau = np.append(path.tau[keep], tau_end)
    mu = np.append(path.mu[keep], z_hi)
    dtau, dmu = model._phi(s, tau, mu)
    return SeparatingPath(path.boundary, s, tau, mu,
                          np.asarray(dtau, dtype=float), np.asarray(dmu, dtype=float))


def solve_from_thresholds(
    ability_band,
    model,
    *,
    boundary_eps: float = 1e-4,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> Equilibrium:
    """Equilibrium for a given ability band (z_lo, z_hi).

    The diagonal z_hi = z_lo is the pooling convention: the whole
    employed population pools at the bottom boundary's contract.
    """
    band = _as_ability_band(ability_band)
    z_lo, z_hi = band.z_lo, band.z_hi
    span_tol = ABILITY_TOL
    if z_lo < model.z_min - 1e-9 or z_hi > model.z_max + 1e-9:
        raise DomainError("solve_from_thresholds: band outside the ability support")
    if z_hi < z_lo - 1e-9:
        raise DomainError("solve_from_thresholds: z_hi below z_lo")
    z_lo = min(max(z_lo, model.z_min), model.z_max)
    z_hi = min(max(z_hi, z_lo), model.z_max)

    bottom = bottom_from_ability(z_lo, model)

    if z_hi <= z_lo + span_tol:
        block = PoolingBlock(bottom.z_lo, bottom.s_lo, bottom.t_lo)
        return Equilibrium(
            POOLING, bottom, None, block,
            WageBand(bottom.t_lo, bottom.t_lo), AbilityBand(z_lo, z_lo),
        )

    separating = z_hi >= model.z_max - span_tol
    z_top = model.z_max if separating else z_hi
    eps = min(boundary_eps, 0.25 * (z_top - z_lo))
    anchor = anchor_boundary(bottom, model, eps=eps)
    path = integrate_path(anchor, z_top, model, rtol=rtol, atol=atol)

    if separating:
        return Equilibrium(
            SEPARATING, bottom, path, None,
            WageBand(bottom.t_lo, math.inf), AbilityBand(z_lo, model.z_max),
        )
    block = top_from_ability(path, z_hi, model)
    return Equilibrium(
        WELL_BEHAVED, bottom, path, block,
        WageBand(bottom.t_lo, block.t_hi), AbilityBand(z_lo, z_hi),
    )


def solve_from_band(
    wage_band,
    model,
    *,
    boundary_eps: float = 1e-4,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> Equilibrium:
    """Equilibrium for a policy band [t_lo, t_hi].

    Caps at or above the top separating wage do not bind
    (Separating); caps below the pure-pooling wage of the bottom
    ability leave no separating region (Pooling, solved by
    pooling_only); in between the band is well behaved. A cap below
    the floor is a classification error.
    """
    band = _as_wage_band(wage_band)
    t_lo, t_hi = band.t_lo, band.t_hi
    if t_lo < model.t_floor - 1e-12:
        raise DomainError("solve_from_band: floor below the statutory minimum")
    if not t_hi >= t_lo - 1e-12:
        raise ClassificationError("solve_from_band: cap below the floor")

    bottom = bottom_from_wage(t_lo, model)
    wage_tol = 1e-9 * max(1.0, abs(t_lo))

    if t_hi <= t_lo + wage_tol:
        t_pool = max(t_lo, model.effective_floor)
        z_star, s_star = pooling_only(t_pool, model)
        block = PoolingBlock(z_star, s_star, t_pool)
        return Equilibrium(
            POOLING, BottomBoundary(z_star, s_star, t_pool), None, block,
            band, AbilityBand(z_star, z_star),
        )

    if bottom.z_lo >= model.z_max - ABILITY_TOL:
        # floor at the empty-market edge: nothing but the diagonal left
        block = PoolingBlock(bottom.z_lo, bottom.s_lo, bottom.t_lo)
        return Equilibrium(
            POOLING, bottom, None, block, band,
            AbilityBand(bottom.z_lo, bottom.z_lo),
        )

    eps = min(boundary_eps, 0.25 * (model.z_max - bottom.z_lo))
    anchor = anchor_boundary(bottom, model, eps=eps)
    path = integrate_path(anchor, model.z_max, model, rtol=rtol, atol=atol)
    t_star = float(path.tau[-1])

    if t_hi >= t_star - 1e-9 * max(1.0, t_star):
        # a cap at or above the top separating wage never binds, so it
        # is stored as the absent-cap sentinel
        return Equilibrium(
            SEPARATING, bottom, path, None, WageBand(band.t_lo, math.inf),
            AbilityBand(bottom.z_lo, model.z_max),
        )

    try:
        block = top_from_wage(path, t_hi, model)
    except NoSolutionError:
        # cap below the lowest jump wage: the band forces pooling
        z_star, s_star = pooling_only(t_hi, model)
        block = PoolingBlock(z_star, s_star, t_hi)
        return Equilibrium(
            POOLING, BottomBoundary(z_star, s_star, t_hi), None, block,
            band, AbilityBand(z_star, z_star),
        )
    short = _truncate_path(path, block.z_hi, model)
    return Equilibrium(
        WELL_BEHAVED, bottom, short, block, band,
        AbilityBand(bottom.z_lo, block.z_hi),
    )


def off_path_belief(eq: Equilibrium, s: float, model=None):
    """Market belief after observing education s.

    Beliefs below the bottom signal collapse to z_lo; inside the
    separating range they follow the path inverse; in the gap between
    the top separating signal and the pooled signal they stay at z_hi;
    the pooled signal itself carries the truncated prior; anything
    above is read as the top type.
    """
    band = eq.ability_band
    if eq.kind == POOLING:
        block = eq.pooling
        if s < block.s_hi - 1e-12:
            return band.z_lo
        if s <= block.s_hi + 1e-12:
            hi = model.z_max if model is not None else math.inf
            return TruncatedAbility(block.z_hi, hi)
        return model.z_max if model is not None else math.inf

    s_bottom = float(eq.path.s[0])
    s_top = float(eq.path.s[-1])
    if s < s_bottom:
        return band.z_lo
    if s <= s_top:
        return float(eq.path.query("mu_of_s", s))
    if eq.kind == SEPARATING:
        return band.z_hi
    block = eq.pooling
    if s < block.s_hi - 1e-12:
        return band.z_hi
    if s <= block.s_hi + 1e-12:
        hi = model.z_max if model is not None else math.inf
        return TruncatedAbility(block.z_hi, hi)
    return model.z_max if model is not None else math.inf


def roundtrip_check(eq: Equilibrium, model, *, boundary_eps: float = 1e-4) -> dict:
    """Re-solve an equilibrium from its wage band and report the drift.

    Band-representable equilibria (Separating and WellBehaved) should
    come back within solver tolerance. A diagonal pooling equilibrium
    is not band-representable (its single wage maps to the pure
    pooling cut, a different object), so the drift there is
    informative, not a failure.
    """
    if eq.kind == WELL_BEHAVED:
        probe = WageBand(eq.band.t_lo, eq.pooling.t_hi)
    else:
        probe = WageBand(eq.band.t_lo, math.inf if eq.kind == SEPARATING else eq.band.t_hi)
    back = solve_from_band(probe, model, boundary_eps=boundary_eps)
    deltas = {
        "z_lo": abs(back.z_lo - eq.z_lo),
        "z_hi": abs(back.z_hi - eq.z_hi),
        "t_lo": abs(back.boundary.t_lo - eq.boundary.t_lo),
        "s_lo": abs(back.boundary.s_lo - eq.boundary.s_lo),
    }
    if eq.pooling is not None and back.pooling is not None:
        deltas["s_hi"] = abs(back.pooling.s_hi - eq.pooling.s_hi)
        deltas["t_hi"] = abs(back.pooling.t_hi - eq.pooling.t_hi)
    return {
        "kind_matches": back.kind == eq.kind,
        "max_delta": max(deltas.values()),
        "deltas": deltas,
    }
