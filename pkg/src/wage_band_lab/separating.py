"""Separating region of a monotone signaling equilibrium.

Along the separating path the market wage tau(s) and the belief mu(s)
(the ability inferred from education s, which is also the ability of
the worker actually choosing s) solve the coupled ODE system

    tau'(s) = -u_s / u_t                       (worker optimality)
    mu'(s)  = (g_t u_s - g_s u_t) / (u_t g_z)  (firm optimality)

with u evaluated at (tau(s), s, mu(s)) and g at
(tau(s), n(mu(s)), s, mu(s)). Integration runs upward in s from a
bottom boundary (z_lo, s_lo, t_lo) until the belief reaches a target
ability. Both boundary coordinates must be strictly positive; the
degenerate corner z_lo = 0 is re-anchored a small step into the
interior by the callers that construct equilibria.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline

from .errors import ConvergenceError, DomainError, SingularBoundaryError

_QUERY_KINDS = ("tau_of_s", "mu_of_s", "sigma_of_z", "wage_of_z")


@dataclass(frozen=True)
class BottomBoundary:
    """Bottom of the separating region: the lowest participating type.

    Satisfies worker indifference u(t_lo, s_lo, z_lo) = 0 and firm
    break-even g(t_lo, n(z_lo), s_lo, z_lo) = 0 (the corner z_lo =
    z_min with a non-binding floor reduces to the market normalization).
    """

    z_lo: float
    s_lo: float
    t_lo: float


def ode_rhs(s, tau, mu, model):
    """Right-hand side (tau', mu') of the path system.

    Generic form assembled from the model partials; every variant also
    carries a closed-form `_phi` used inside the integration loop, and
    the two are pinned against each other in the tests.
    """
    x = model.match_fn(mu)
    p = model.partials(tau, x, s, mu)
    dtau = -p.u_s / p.u_t
    dmu = (p.g_t * p.u_s - p.g_s * p.u_t) / (p.u_t * p.g_z)
    return dtau, dmu


@dataclass
class SeparatingPath:
    """Discretized separating path with exact slopes at the nodes."""

    boundary: BottomBoundary
    s: np.ndarray
    tau: np.ndarray
    mu: np.ndarray
    dtau: np.ndarray
    dmu: np.ndarray
    _splines: dict = field(default_factory=dict, repr=False)

    @property
    def top(self) -> tuple[float, float, float]:
        """(s, tau, mu) at the upper end of the path."""
        return float(self.s[-1]), float(self.tau[-1]), float(self.mu[-1])

    @property
    def nodes(self) -> np.ndarray:
        """Path nodes as an (N, 3) array with columns s, tau, mu."""
        return np.column_stack([self.s, self.tau, self.mu])

    def __len__(self) -> int:
        return self.s.size

    def _spline(self, kind: str) -> CubicHermiteSpline:
        if kind not in self._splines:
            if self.s.size < 2:
                raise DomainError("query: path is degenerate (single node)")
            with np.errstate(divide="ignore"):
                builders = {
                    "tau_of_s": (self.s, self.tau, self.dtau),
                    "mu_of_s": (self.s, self.mu, self.dmu),
                    "sigma_of_z": (self.mu, self.s, 1.0 / self.dmu),
                    "wage_of_z": (self.mu, self.tau, self.dtau / self.dmu),
                }
                x, y, dy = builders[kind]
            self._splines[kind] = CubicHermiteSpline(x, y, dy)
        return self._splines[kind]

    def query(self, kind: str, point):
        """Evaluate tau(s), mu(s), sigma(z) or the on-path wage of z.

        Points are clipped into the covered range within a relative
        slack of 1e-9; anything farther outside raises DomainError.
        """
        if kind not in _QUERY_KINDS:
            raise DomainError(f"query: unknown kind {kind!r}")
        spline = self._spline(kind)
        lo, hi = spline.x[0], spline.x[-1]
        slack = 1e-9 * max(hi - lo, 1.0)
        pts = np.asarray(point, dtype=float)
        if np.any(pts < lo - slack) or np.any(pts > hi + slack):
            raise DomainError(
                f"query: point outside path range [{lo:.6g}, {hi:.6g}] for {kind}"
            )
        out = spline(np.clip(pts, lo, hi))
        return float(out) if np.ndim(point) == 0 else out

    def query_derivative(self, kind: str, point):
        """Derivative of a query curve; same clipping rules as query."""
        if kind not in _QUERY_KINDS:
            raise DomainError(f"query: unknown kind {kind!r}")
        spline = self._spline(kind)
        lo, hi = spline.x[0], spline.x[-1]
        pts = np.clip(np.asarray(point, dtype=float), lo, hi)
        out = spline.derivative()(pts)
        return float(out) if np.ndim(point) == 0 else out


def query(path: SeparatingPath, kind: str, point):
    """Functional alias for SeparatingPath.query."""
    return path.query(kind, point)


def integrate_path(
    boundary: BottomBoundary,
    z_target: float,
    model,
    *,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    max_gap: float | None = None,
    foc_tol: float = 2.5e-7,
) -> SeparatingPath:
    """Integrate the separating system from a boundary up to z_target.

    The returned node set is refined so consecutive beliefs differ by
    at most max_gap (default: ability span / 2000) and the fitted
    interpolant satisfies both first-order conditions within foc_tol
    at interval midpoints; the terminal node is placed exactly at the
    event mu = z_target.
    """
    z_lo, s_lo, t_lo = boundary.z_lo, boundary.s_lo, boundary.t_lo
    span = model.z_max - model.z_min
    if max_gap is None:
        max_gap = span / 2000.0
    if z_target < z_lo - 1e-12 or z_target > model.z_max + 1e-9 * span:
        raise DomainError("integrate_path: z_target outside [z_lo, z_max]")
    if abs(z_target - z_lo) <= 1e-12:
        one = lambda v: np.array([v], dtype=float)
        return SeparatingPath(boundary, one(s_lo), one(t_lo), one(z_lo),
                              np.zeros(1), np.zeros(1))
    if z_lo <= 0.0 or s_lo <= 0.0:
        raise SingularBoundaryError(
            "integrate_path: boundary is singular (z_lo and s_lo must be "
            "positive); re-anchor just inside the market first"
        )

    def rhs(s, y):
        tau, mu = float(y[0]), float(y[1])
        if tau <= 0.0 or mu <= 0.0:
            # trial stages can overshoot into non-physical states when
            # the exponents are fractional; NaN slopes make the stepper
            # reject and shrink without numpy warning noise
            return np.nan, np.nan
        return model._phi(s, tau, mu)

    def hit_target(s, y):
        return y[1] - z_target

    hit_target.terminal = True
    hit_target.direction = 1.0

    s_span = max(1.0, s_lo)
    sol = None
    for _ in range(60):
        # DOP853's high-order dense output keeps the fitted path within
        # the FOC tolerance; lower-order dense interpolants leave
        # residuals above 1e-6 near the bottom regardless of node count
        sol = solve_ivp(
            rhs, (s_lo, s_lo + s_span), [t_lo, z_lo],
            method="DOP853", rtol=rtol, atol=atol,
            dense_output=True, events=hit_target,
        )
        if not sol.success:
            raise ConvergenceError(f"integrate_path: integrator failed ({sol.message})")
        if sol.t_events[0].size:
            break
        s_span *= 2.0
    else:
        raise ConvergenceError("integrate_path: belief never reached z_target")
    if not sol.t_events[0].size:
        raise ConvergenceError("integrate_path: belief never reached z_target")

    s_end = float(sol.t_events[0][0])

    def eval_nodes(s_nodes: np.ndarray):
        y = sol.sol(s_nodes)
        tau_n, mu_n = y[0].copy(), y[1].copy()
        # pin the terminal belief exactly; the event locator is already
        # accurate to integrator tolerance
        mu_n[-1] = z_target
        return tau_n, mu_n

    steps = sol.t[(sol.t > s_lo) & (sol.t < s_end)]
    coarse = np.concatenate([[s_lo], steps, [s_end]])
    mu_coarse = sol.sol(coarse)[1]

    # refine every interval whose belief gap exceeds max_gap
    pieces: list[np.ndarray] = []
    for i in range(coarse.size - 1):
        gap = mu_coarse[i + 1] - mu_coarse[i]
        n_sub = max(1, int(np.ceil(gap / max_gap)))
        pieces.append(np.linspace(coarse[i], coarse[i + 1], n_sub + 1)[:-1])
    pieces.append(np.array([s_end]))
    s_nodes = np.concatenate(pieces)
    tau_nodes, mu_nodes = eval_nodes(s_nodes)

    for _ in range(8):
        gaps = np.diff(mu_nodes)
        if np.all(gaps <= max_gap * 1.5):
            break
        extra = []
        for i in np.nonzero(gaps > max_gap * 1.5)[0]:
            n_sub = int(np.ceil(gaps[i] / max_gap))
            extra.append(np.linspace(s_nodes[i], s_nodes[i + 1], n_sub + 1)[1:-1])
        s_nodes = np.sort(np.concatenate([s_nodes] + extra))
        tau_nodes, mu_nodes = eval_nodes(s_nodes)

    # bisect intervals until the Hermite interpolant meets both
    # first-order conditions with margin; curvature concentrates near
    # the bottom of the path, where uniform belief gaps are not enough
    prev_bad = np.inf
    for _ in range(8):
        bad = _foc_violations(model, s_nodes, tau_nodes, mu_nodes, foc_tol)
        n_bad = int(bad.sum())
        if n_bad == 0 or n_bad >= prev_bad:
            # a stall means the residual floor is integration error,
            # which extra nodes cannot fix
            break
        prev_bad = n_bad
        mids = 0.5 * (s_nodes[:-1] + s_nodes[1:])
        s_nodes = np.sort(np.concatenate([s_nodes, mids[bad]]))
        tau_nodes, mu_nodes = eval_nodes(s_nodes)

    if np.any(np.diff(s_nodes) <= 0.0):
        keep = np.concatenate([[True], np.diff(s_nodes) > 1e-15])
        s_nodes, tau_nodes, mu_nodes = s_nodes[keep], tau_nodes[keep], mu_nodes[keep]
    if np.any(np.diff(mu_nodes) <= 0.0) or np.any(np.diff(tau_nodes) <= 0.0):
        raise ConvergenceError("integrate_path: path lost monotonicity")

    dtau, dmu = model._phi(s_nodes, tau_nodes, mu_nodes)
    return SeparatingPath(
        BottomBoundary(z_lo, s_lo, t_lo),
        s_nodes, tau_nodes, mu_nodes,
        np.asarray(dtau, dtype=float), np.asarray(dmu, dtype=float),
    )


def _foc_violations(model, s_nodes, tau_nodes, mu_nodes, tol: float) -> np.ndarray:
    """Midpoint FOC residuals of the Hermite fit; True marks intervals to split."""
    dtau, dmu = model._phi(s_nodes, tau_nodes, mu_nodes)
    mids = 0.5 * (s_nodes[:-1] + s_nodes[1:])
    tau_fit = CubicHermiteSpline(s_nodes, tau_nodes, dtau)
    mu_fit = CubicHermiteSpline(s_nodes, mu_nodes, dmu)
    tau_m, mu_m = tau_fit(mids), mu_fit(mids)
    dtau_m, dmu_m = tau_fit.derivative()(mids), mu_fit.derivative()(mids)
    x_m = model.match_fn(mu_m)
    p = model.partials(tau_m, x_m, mids, mu_m)
    worker = np.abs(p.u_t * dtau_m + p.u_s)
    firm = np.abs(p.g_t * dtau_m + p.g_z * dmu_m + p.g_s)
    return (worker > tol) | (firm > tol)


def foc_residuals(path: SeparatingPath, model, at_s: Iterable[float] | None = None):
    """Worker and firm first-order-condition residuals along the path.

    Derivatives come from the fitted interpolants (not from the ODE
    right-hand side, which would make the identities hold by
    construction), so this measures true path accuracy. Defaults to
    the interval midpoints.
    """
    if at_s is None:
        at_s = 0.5 * (path.s[:-1] + path.s[1:])
    s = np.asarray(at_s, dtype=float)
    tau = path.query("tau_of_s", s)
    mu = path.query("mu_of_s", s)
    dtau = path.query_derivative("tau_of_s", s)
    dmu = path.query_derivative("mu_of_s", s)
    x = model.match_fn(mu)
    p = model.partials(tau, x, s, mu)
    worker = p.u_t * dtau + p.u_s
    firm = p.g_t * dtau + p.g_z * dmu + p.g_s
    return {"worker": np.asarray(worker), "firm": np.asarray(firm)}
