"""Boundary systems: bottom entry, top pooling block, pure pooling.

Every monotone equilibrium is pinned down by two ability thresholds.
The bottom one (z_lo, s_lo, t_lo) satisfies worker indifference
u = 0 and firm break-even g = 0; the top one is a pooling block
(z_hi, s_hi, t_hi) where the capped wage t_hi is paid to every type
above z_hi, pinned by indifference of the marginal type with their
separating payoff and by firm indifference between hiring the marginal
separating type and the average pooled type.

All systems reduce to bracketed scalar roots: the bilateral surplus
f(t, z) = g(t, n(z), kappa(t, z), z) is strictly concave in t and
strictly increasing in z, and the jump wage rises with the ability cut.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import (
    ConvergenceError,
    DomainError,
    NoSolutionError,
)
from .separating import BottomBoundary, SeparatingPath

_XTOL = 1e-12
_MAXITER = 200
_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class PoolingBlock:
    """Top pooling region: types in [z_hi, z_max] choose s_hi at wage t_hi."""

    z_hi: float
    s_hi: float
    t_hi: float


def bilateral_value(t: float, z: float, model) -> float:
    """Joint match value f(t, z) = g(t, n(z), kappa(t, z), z).

    The worker participation constraint binds (s = kappa), so f is the
    firm's profit from the cheapest incentive-compatible contract at
    wage t.
    """
    return model.profit(t, model.match_fn(z), model.kappa(t, z), z)


def _bilateral_slope(t: float, z: float, model) -> float:
    # f_t = g_t + g_s * kappa_t with kappa_t = -u_t / u_s along u = 0
    s = model.kappa(t, z)
    p = model.partials(t, model.match_fn(z), s, z)
    return p.g_t + p.g_s * (-p.u_t / p.u_s)


def bilateral_efficient(z: float, model) -> tuple[float, float]:
    """Surplus-maximizing pair (s_star, t_star) for an ability z.

    Maximizes f(t, z) over t >= the effective wage floor. The slope is
    probed just above the floor (offset 1e-9); a nonpositive probe
    means the floor corner is the optimum, which covers z = 0 and the
    quasilinear variant where f falls in t everywhere.
    """
    if z < model.z_min - 1e-12 or z > model.z_max + 1e-12:
        raise DomainError("bilateral_efficient: ability outside support")
    floor = model.effective_floor
    t_probe = floor + 1e-9 * max(1.0, floor)
    corner = False
    if model.match_fn(z) * z <= 0.0:
        corner = True  # no match value margin: f(t, z) = 1 - t
    else:
        try:
            corner = _bilateral_slope(t_probe, z, model) <= 0.0
        except (ZeroDivisionError, FloatingPointError):
            corner = False
    if corner:
        t_star = floor
        return model.kappa(t_star, z), t_star

    width = 1.0
    for _ in range(60):
        if _bilateral_slope(floor + width, z, model) < 0.0:
            break
        width *= 2.0
    else:
        raise ConvergenceError("bilateral_efficient: slope never turns negative")
    t_star = brentq(
        lambda t: _bilateral_slope(t, z, model),
        t_probe, floor + width, xtol=_XTOL, maxiter=_MAXITER,
    )
    return model.kappa(t_star, z), float(t_star)


def t_hat(model) -> float:
    """Upper zero of f(., z_max): the wage beyond which even the best
    match destroys value, so the market empties."""
    _, t_star = bilateral_efficient(model.z_max, model)
    top = bilateral_value(t_star, model.z_max, model)
    if top < -1e-12:
        raise NoSolutionError("t_hat: no profitable match even at the optimum")
    width = max(1.0, t_star)
    for _ in range(60):
        if bilateral_value(t_star + width, model.z_max, model) < 0.0:
            break
        width *= 2.0
    else:
        raise ConvergenceError("t_hat: bilateral value never turns negative")
    root = brentq(
        lambda t: bilateral_value(t, model.z_max, model),
        t_star, t_star + width, xtol=_XTOL, maxiter=_MAXITER,
    )
    return float(root)


def bottom_from_ability(z_lo: float, model) -> BottomBoundary:
    """Bottom boundary for a given lowest participating ability.

    Solves u(t, s, z_lo) = 0, g(t, n(z_lo), s, z_lo) = 0: the wage is
    the upper root of f(., z_lo) above the bilateral optimum (they
    coincide at the z_min normalization corner, where the floor does
    not bind and the bilateral surplus is exactly exhausted).
    """
    if z_lo < model.z_min - 1e-12 or z_lo > model.z_max + 1e-12:
        raise DomainError("bottom_from_ability: ability outside support")
    z_lo = min(max(z_lo, model.z_min), model.z_max)
    _, t_star = bilateral_efficient(z_lo, model)
    f_peak = bilateral_value(t_star, z_lo, model)
    if f_peak < -_RESIDUAL_TOL:
        raise NoSolutionError(
            "bottom_from_ability: no wage lets this ability trade profitably"
        )
    if abs(f_peak) <= 1e-13:
        t_lo = t_star
    else:
        hi = t_hat(model)
        if z_lo >= model.z_max - 1e-15:
            t_lo = hi
        else:
            t_lo = brentq(
                lambda t: bilateral_value(t, z_lo, model),
                t_star, hi, xtol=_XTOL, maxiter=_MAXITER,
            )
    s_lo = model.kappa(t_lo, z_lo)
    _check_bottom_residuals(t_lo, s_lo, z_lo, model)
    return BottomBoundary(float(z_lo), float(s_lo), float(t_lo))


def bottom_from_wage(t_lo: float, model) -> BottomBoundary:
    """Bottom boundary for a given minimum wage.

    Below the laissez-faire bottom wage the floor does not bind and
    the boundary is the z_min normalization corner; above it the entry
    ability solves the break-even condition g = 0 along u = 0, which
    is strictly increasing in ability. Raises NoSolutionError above
    the empty-market wage t_hat.
    """
    if t_lo < model.t_floor - 1e-12:
        raise DomainError("bottom_from_wage: wage below the statutory floor")
    laissez = bottom_from_ability(model.z_min, model)
    if t_lo <= laissez.t_lo + 1e-12:
        return laissez
    hat = t_hat(model)
    if t_lo > hat + 1e-9:
        raise NoSolutionError(
            f"bottom_from_wage: minimum wage {t_lo:.6g} exceeds the "
            f"empty-market level {hat:.6g}"
        )
    t_eff = min(t_lo, hat)

    def entry_gap(z: float) -> float:
        return bilateral_value(t_eff, z, model)

    lo, hi = model.z_min, model.z_max
    if entry_gap(hi) < 0.0:  # only possible through roundoff at t_lo ~ t_hat
        return BottomBoundary(hi, model.kappa(t_eff, hi), float(t_eff))
    z_lo = brentq(entry_gap, lo, hi, xtol=_XTOL, maxiter=_MAXITER)
    s_lo = model.kappa(t_eff, z_lo)
    _check_bottom_residuals(t_eff, s_lo, z_lo, model)
    return BottomBoundary(float(z_lo), float(s_lo), float(t_eff))


def _check_bottom_residuals(t_lo, s_lo, z_lo, model) -> None:
    worker = model.utility(t_lo, s_lo, z_lo)
    firm = model.profit(t_lo, model.match_fn(z_lo), s_lo, z_lo)
    if abs(worker) > _RESIDUAL_TOL or abs(firm) > _RESIDUAL_TOL:
        raise ConvergenceError(
            f"bottom boundary residuals too large (worker {worker:.2e}, "
            f"firm {firm:.2e})"
        )


def _jump_education(t: float, z_hi: float, u_sep: float, model) -> float:
    return model.kappa_indiff(t, z_hi, u_sep)


def top_from_ability(path: SeparatingPath, z_hi: float, model) -> PoolingBlock:
    """Pooling block whose separating region ends at ability z_hi.

    The marginal type z_hi is indifferent between its separating
    contract and the pooled one; firms are indifferent between the
    marginal separating hire and the average pooled hire. Reduces to a
    scalar root in the pooled wage, bracketed between the on-path wage
    at z_hi (where the firm side is weakly positive) and a geometric
    expansion upward.
    """
    z_cov_lo, z_cov_hi = float(path.mu[0]), float(path.mu[-1])
    if z_hi < z_cov_lo - 1e-9 or z_hi > z_cov_hi + 1e-9:
        raise DomainError("top_from_ability: cut outside the path's ability range")
    z_hi = min(max(z_hi, z_cov_lo), z_cov_hi)
    sigma = path.query("sigma_of_z", z_hi)
    wage = path.query("wage_of_z", z_hi)
    u_sep = model.utility(wage, sigma, z_hi)
    pi_sep = model.profit(wage, model.match_fn(z_hi), sigma, z_hi)

    def firm_gap(t: float) -> float:
        s_t = _jump_education(t, z_hi, u_sep, model)
        return model.expected_profit_above(t, model.match_fn(z_hi), s_t, z_hi) - pi_sep

    left = wage
    g_left = firm_gap(left)
    if g_left <= 0.0:
        if g_left < -_RESIDUAL_TOL:
            raise NoSolutionError("top_from_ability: firm gap negative at the on-path wage")
        t_hi = left  # z_hi at the very top of the market: block degenerates
    else:
        width = max(0.5, 0.1 * left)
        for _ in range(60):
            if firm_gap(left + width) < 0.0:
                break
            width *= 2.0
        else:
            raise ConvergenceError("top_from_ability: firm gap never turns negative")
        t_hi = brentq(firm_gap, left, left + width, xtol=_XTOL, maxiter=_MAXITER)
    s_hi = _jump_education(t_hi, z_hi, u_sep, model)
    if abs(model.utility(t_hi, s_hi, z_hi) - u_sep) > _RESIDUAL_TOL or abs(firm_gap(t_hi)) > _RESIDUAL_TOL:
        raise ConvergenceError("top_from_ability: block residuals too large")
    return PoolingBlock(float(z_hi), float(s_hi), float(t_hi))


def t_hi_star(path: SeparatingPath, model) -> float:
    """Cap level above which the ceiling stops binding: the wage of the
    top separating type. The path must reach z_max."""
    if abs(float(path.mu[-1]) - model.z_max) > 1e-6:
        raise DomainError("t_hi_star: path does not reach the top of the market")
    return float(path.tau[-1])


def top_from_wage(path: SeparatingPath, t_hi: float, model) -> PoolingBlock:
    """Pooling block for a given binding wage cap t_hi.

    Inverts top_from_ability in its wage coordinate; the jump wage is
    strictly increasing in the ability cut, from the pure-pooling wage
    at the bottom of the path to the top separating wage. Outside that
    range: NoSolutionError below (the band forces pooling), so callers
    fall back to pooling_only; ClassificationError is left to callers
    above, where the cap does not bind.
    """
    z_lo_cov, z_hi_cov = float(path.mu[0]), float(path.mu[-1])

    def wage_gap(z: float) -> float:
        return top_from_ability(path, z, model).t_hi - t_hi

    gap_lo = wage_gap(z_lo_cov)
    if gap_lo >= 0.0:
        raise NoSolutionError(
            "top_from_wage: cap at or below the pure-pooling wage of the "
            "bottom ability; no interior separating region exists"
        )
    gap_hi = wage_gap(z_hi_cov)
    if gap_hi < 0.0:
        raise DomainError(
            "top_from_wage: cap above the top separating wage; the ceiling "
            "does not bind"
        )
    z_hi = brentq(wage_gap, z_lo_cov, z_hi_cov, xtol=_XTOL, maxiter=_MAXITER)
    block = top_from_ability(path, z_hi, model)
    if abs(block.t_hi - t_hi) > 1e-7 * max(1.0, abs(t_hi)):
        raise ConvergenceError("top_from_wage: wage inversion did not converge")
    return PoolingBlock(block.z_hi, block.s_hi, float(t_hi))


def pooling_only(t_single: float, model) -> tuple[float, float]:
    """Entry cut and pooled signal (z_star, s_star) when one wage pools
    the whole employed population.

    Workers at the cut are indifferent to staying out (s = kappa);
    firms break even on the pool average. The firm-side residual is
    strictly increasing in the cut, so either the whole market pools
    profitably (corner at z_min) or a unique interior cut exists.
    """
    floor = model.effective_floor
    if t_single < model.t_floor - 1e-12:
        raise DomainError("pooling_only: wage below the statutory floor")
    t_eff = max(t_single, floor)

    def pool_gap(z: float) -> float:
        s = model.kappa(t_eff, z)
        return model.expected_profit_above(t_eff, model.match_fn(z), s, z)

    if pool_gap(model.z_min) >= 0.0:
        return model.z_min, model.kappa(t_eff, model.z_min)
    if pool_gap(model.z_max) < 0.0:
        raise NoSolutionError(
            "pooling_only: wage exceeds what even the top match can fund"
        )
    z_star = brentq(pool_gap, model.z_min, model.z_max, xtol=_XTOL, maxiter=_MAXITER)
    return float(z_star), float(model.kappa(t_eff, z_star))


def pooling_wage(z_star: float, model) -> float:
    """The single wage whose pure pool cuts entry exactly at z_star.

    Inverse of pooling_only: the worker at the cut is indifferent to
    staying out (signal kappa) and the marginal firm n(z_star) breaks
    even against the pooled population, which is where free entry
    stops. Degenerate cuts at the top of the support return the
    highest wage any match can fund.
    """
    if z_star < model.z_min - 1e-12 or z_star > model.z_max + 1e-12:
        raise DomainError("pooling_wage: cut outside the ability support")
    z = min(max(float(z_star), model.z_min), model.z_max)
    floor = model.effective_floor

    def gap(t: float) -> float:
        s = model.kappa(t, z)
        return model.expected_profit_above(t, model.match_fn(z), s, z)

    at_floor = gap(floor)
    if at_floor < -1e-12:
        raise NoSolutionError(
            "pooling_wage: the marginal firm cannot break even at any wage")
    if at_floor <= 1e-12:
        return floor
    ceiling = t_hat(model)
    if gap(ceiling) >= 0.0:
        return float(ceiling)
    root = brentq(gap, floor, ceiling, xtol=_XTOL, maxiter=_MAXITER)
    return float(root)


def anchor_boundary(boundary: BottomBoundary, model, eps: float = 1e-4) -> BottomBoundary:
    """Re-anchor a singular bottom boundary a small step into the market.

    The path system degenerates at z_lo = 0 (zero education, zero
    belief); integration then starts from the boundary at z_lo + eps
    on the same separating manifold. Regular boundaries are returned
    unchanged.
    """
    if boundary.z_lo > 0.0 and boundary.s_lo > 0.0:
        return boundary
    z_anchor = max(boundary.z_lo + eps, model.z_min + eps)
    if z_anchor >= model.z_max:
        raise DomainError("anchor_boundary: offset pushes past the top of the market")
    return bottom_from_ability(z_anchor, model)
