"""Release gate for the solver suite.

Every numbered check below pins a quantity the package must reproduce:
closed-form oracles on the quasilinear example, hand-derived boundary
contracts, the planner's optimum on both models, frontier geometry,
welfare-gain levels across the comparative-statics sweeps, threshold
monotonicity, a model-independent property battery, and the ripple
pattern that redistribution leaves on utility and profit profiles.

Run ``pytest -v tests/test_acceptance.py`` for one pass/fail line per
check; add ``-s`` to also see the measured numbers behind each verdict.
"""

from __future__ import annotations

import time

import numpy as np
import pytest

from wage_band_lab.equilibrium import (
    roundtrip_check,
    solve_from_band,
    solve_from_thresholds,
)
from wage_band_lab.model import ExampleModel, ModelParams, ParametricModel
from wage_band_lab.optimizer import (
    SearchSettings,
    frontier,
    optimize,
    sweep,
)
from wage_band_lab.separating import BottomBoundary, foc_residuals, integrate_path
from wage_band_lab.thresholds import (
    bottom_from_ability,
    pooling_only,
    top_from_ability,
)
from wage_band_lab.welfare import (
    firm_profit_profile,
    surpluses,
    worker_utility_profile,
)


def _report(number: int, detail: str) -> None:
    print(f"[check {number}] {detail}")


@pytest.fixture(scope="module")
def example():
    return ExampleModel()


@pytest.fixture(scope="module")
def baseline():
    return ParametricModel(ModelParams())


@pytest.fixture(scope="module")
def example_path(example):
    return integrate_path(BottomBoundary(0.5, 1.0, 2.0), 3.0, example)


@pytest.fixture(scope="module")
def a_sweep():
    return sweep("a", (0.0, 0.25, 0.5, 0.75, 1.0), 0.3)


@pytest.fixture(scope="module")
def q_sweep():
    return sweep("q", (0.0, 0.5, 1.0, 1.5, 2.0), 0.3)


@pytest.fixture(scope="module")
def rho_sweep():
    return sweep("rho", (0.0, 0.25, 0.5, 0.75, 1.0, 1.25), 0.3)


@pytest.fixture(scope="module")
def b_sweep():
    return sweep("b", (1.25, 1.5, 1.75, 2.0), 0.3)


def test_01_example_beliefs_match_closed_form(example):
    # the integrated posterior must agree with sqrt(s^2/2 - 1/4), the
    # closed-form solution of the example's belief equation anchored at
    # (z, s, t) = (0.5, 1, 2), and the whole computation must be quick
    start = time.perf_counter()
    path = integrate_path(BottomBoundary(0.5, 1.0, 2.0), 3.0, example)
    s = np.linspace(1.0, float(path.s[-1]), 2001)
    mu = path.query("mu_of_s", s)
    elapsed = time.perf_counter() - start
    exact = np.sqrt(s * s / 2.0 - 0.25)
    err = float(np.max(np.abs(mu - exact) / exact))
    _report(1, f"max relative belief error {err:.3e} in {elapsed:.3f} s")
    assert err < 1e-6
    assert elapsed < 1.0


def test_02_example_bottom_contracts_are_pinned(example):
    low = bottom_from_ability(0.5, example)
    mid = bottom_from_ability(1.0, example)
    worst = max(
        abs(low.s_lo - 1.0),
        abs(low.t_lo - 2.0),
        abs(mid.s_lo - 2.0),
        abs(mid.t_lo - 3.0),
    )
    _report(2, f"bottom contracts at z=0.5 and z=1 off by at most {worst:.2e}")
    assert worst < 1e-9


def test_03_example_pooled_block_is_pinned(example, example_path):
    block = top_from_ability(example_path, 1.0, example)
    err_t = abs(block.t_hi - 5.0)
    err_s = abs(block.s_hi - np.sqrt(6.5))
    _report(3, f"pooled contract at cut z=1: wage off {err_t:.2e}, education off {err_s:.2e}")
    assert err_t < 1e-8
    assert err_s < 1e-8


def test_04_example_planner_pools_everyone(example):
    policy = optimize(example, 0.5)
    _report(
        4,
        f"full-policy optimum at ability band ({policy.z_lo:.4f}, {policy.z_hi:.4f}), kind {policy.kind}",
    )
    assert abs(policy.z_lo) <= 0.05
    assert abs(policy.z_hi) <= 0.05


def test_05_baseline_frontier_is_concave_and_dominating(baseline):
    start = time.perf_counter()
    result = frontier(baseline, resolution=40)
    elapsed = time.perf_counter() - start
    _report(
        5,
        f"{len(result.points)} cells, {result.convexity_violations} convexity "
        f"violations, laissez-faire dominated: {result.no_intervention_dominated}, "
        f"{elapsed:.1f} s",
    )
    assert result.convexity_violations == 0
    assert result.no_intervention_dominated
    assert elapsed < 120.0


def test_06_welfare_gain_levels(a_sweep, rho_sweep, b_sweep):
    by_a = {row.value: row for row in a_sweep}
    gain_flat = by_a[0.0].gain_full_pct
    gain_linear = by_a[1.0].gain_full_pct
    floor_gains = [row.gain_minonly_pct for row in a_sweep]
    rho_gains = [row.gain_full_pct for row in rho_sweep]
    b_gains = [row.gain_full_pct for row in b_sweep]
    _report(
        6,
        f"full gains: {gain_flat:.2f}% at a=0, {gain_linear:.2f}% at a=1; "
        f"floor-only gains {min(floor_gains):.2f}..{max(floor_gains):.2f}%; "
        f"rho span {min(rho_gains):.2f}..{max(rho_gains):.2f}%; "
        f"b span {min(b_gains):.2f}..{max(b_gains):.2f}%",
    )
    assert gain_flat == pytest.approx(12.2, abs=0.5)
    assert gain_linear == pytest.approx(1.7, abs=0.5)
    assert min(floor_gains) > 0.2 - 0.3
    assert max(floor_gains) < 0.8 + 0.3
    assert min(rho_gains) == pytest.approx(4.8, abs=0.7)
    assert max(rho_gains) == pytest.approx(13.3, abs=0.7)
    assert min(b_gains) == pytest.approx(2.6, abs=0.5)
    assert max(b_gains) == pytest.approx(4.8, abs=0.5)


def _adjacent_violations(values, direction):
    steps = np.diff(np.asarray(values, dtype=float)) * direction
    return [float(-step) for step in steps if step < -1e-12]


def test_07_threshold_monotonicity(a_sweep, q_sweep, rho_sweep, b_sweep):
    series = {
        "z_lo vs a": ([r.z_lo for r in a_sweep], +1.0),
        "z_hi vs a": ([r.z_hi for r in a_sweep], +1.0),
        "z_lo vs q": ([r.z_lo for r in q_sweep], +1.0),
        "z_hi vs q": ([r.z_hi for r in q_sweep], +1.0),
        "z_lo vs rho": ([r.z_lo for r in rho_sweep], -1.0),
        "z_hi vs rho": ([r.z_hi for r in rho_sweep], -1.0),
        "z_lo vs b": ([r.z_lo for r in b_sweep], -1.0),
        "z_hi vs b": ([r.z_hi for r in b_sweep], -1.0),
    }
    total = 0
    worst = 0.0
    for label, (values, direction) in series.items():
        violations = _adjacent_violations(values, direction)
        assert len(violations) <= 1, f"{label}: {violations}"
        assert all(v < 0.02 for v in violations), f"{label}: {violations}"
        total += len(violations)
        worst = max(worst, max(violations, default=0.0))
    _report(7, f"8 threshold series monotone, {total} tolerated slips (worst {worst:.3g})")


def test_08_property_battery(example, baseline, example_path, a_sweep, q_sweep, rho_sweep, b_sweep):
    # first-order conditions hold along integrated paths on both models
    base_path = integrate_path(bottom_from_ability(0.5, baseline), 3.0, baseline)
    worst_foc = 0.0
    for model, path in ((example, example_path), (baseline, base_path)):
        res = foc_residuals(path, model)
        worst_foc = max(
            worst_foc,
            float(np.max(np.abs(res["worker"]))),
            float(np.max(np.abs(res["firm"]))),
        )
    assert worst_foc < 1e-6

    # boundary systems solve to tight residuals: participation at the
    # bottom, worker and marginal-firm indifference at the top, and the
    # free-entry single-wage reduction
    worst_thr = 0.0
    for model, cuts in ((example, (0.5, 1.0, 2.0)), (baseline, (0.3, 1.0, 2.5))):
        for z in cuts:
            low = bottom_from_ability(z, model)
            worst_thr = max(worst_thr, abs(model.utility(low.t_lo, low.s_lo, z)))
    block = top_from_ability(base_path, 1.5, baseline)
    cut_wage = base_path.query("wage_of_z", 1.5)
    cut_edu = base_path.query("sigma_of_z", 1.5)
    worst_thr = max(
        worst_thr,
        abs(baseline.utility(cut_wage, cut_edu, 1.5) - baseline.utility(block.t_hi, block.s_hi, 1.5)),
    )
    worst_thr = max(
        worst_thr,
        abs(
            baseline.profit(cut_wage, baseline.match_fn(1.5), cut_edu, 1.5)
            - baseline.expected_profit_above(block.t_hi, baseline.match_fn(1.5), block.s_hi, 1.5)
        ),
    )
    z_cut, s_pool = pooling_only(5.2, example)
    worst_thr = max(worst_thr, abs(z_cut - 1.2), abs(s_pool - np.sqrt(2.0 * 1.2 * 4.2)))
    assert worst_thr < 1e-9

    # band and threshold descriptions of the same equilibrium agree
    equilibria = {
        "example well-behaved": solve_from_thresholds((0.5, 1.0), example),
        "example separating": solve_from_thresholds((0.5, 3.0), example),
        "example pooling": solve_from_band((4.5, 4.5), example),
        "baseline well-behaved": solve_from_thresholds((0.5, 2.0), baseline),
        "baseline free entry": solve_from_thresholds((0.0, 3.0), baseline),
    }
    worst_rt = 0.0
    for label, eq in equilibria.items():
        model = example if label.startswith("example") else baseline
        rt = roundtrip_check(eq, model)
        assert rt["kind_matches"], label
        worst_rt = max(worst_rt, rt["max_delta"])
    assert worst_rt < 1e-8

    # each pooled contract jumps strictly above the separating path
    for label in ("example well-behaved", "baseline well-behaved"):
        eq = equilibria[label]
        assert eq.pooling.s_hi > eq.path.query("sigma_of_z", eq.z_hi)
        assert eq.pooling.t_hi > eq.path.query("wage_of_z", eq.z_hi)

    # vanishing bands collapse to the right limits: at the corner the
    # pooled contract meets the bottom contract, and at the market top
    # it meets the end of the separating path
    corner = solve_from_thresholds((0.0, 1e-4), baseline)
    assert abs(corner.pooling.s_hi - corner.boundary.s_lo) < 1e-3
    assert abs(corner.pooling.t_hi - corner.boundary.t_lo) < 1e-3
    top = top_from_ability(example_path, 3.0, example)
    assert abs(top.s_hi - example_path.query("sigma_of_z", 3.0)) < 1e-8
    assert abs(top.t_hi - example_path.query("wage_of_z", 3.0)) < 1e-8

    # closed-form partial derivatives match central differences
    points = ((2.0, 1.0, 0.8, 1.2), (3.5, 0.7, 1.4, 2.3), (1.5, 1.8, 0.5, 0.9))
    step = 1e-5
    worst_fd = 0.0
    for model in (example, baseline):
        for t, x, s, z in points:
            p = model.partials(t, x, s, z)
            fd = {
                "u_t": (model.utility(t + step, s, z) - model.utility(t - step, s, z)),
                "u_s": (model.utility(t, s + step, z) - model.utility(t, s - step, z)),
                "g_t": (model.profit(t + step, x, s, z) - model.profit(t - step, x, s, z)),
                "g_s": (model.profit(t, x, s + step, z) - model.profit(t, x, s - step, z)),
                "g_z": (model.profit(t, x, s, z + step) - model.profit(t, x, s, z - step)),
            }
            for name, delta in fd.items():
                worst_fd = max(worst_fd, abs(getattr(p, name) - delta / (2.0 * step)))
    assert worst_fd < 1e-6

    # doubling the pooled quadrature does not move the surpluses
    eq = solve_from_band((1.42, 10.4), baseline)
    s_coarse, r_coarse = surpluses(eq, baseline, pool_nodes=129)
    s_fine, r_fine = surpluses(eq, baseline, pool_nodes=257)
    worst_quad = max(abs(s_coarse - s_fine), abs(r_coarse - r_fine))
    assert worst_quad < 1e-6

    # tighter instruments can never do better
    for row in (*a_sweep, *q_sweep, *rho_sweep, *b_sweep):
        assert row.W_full >= row.W_minonly - 1e-9
        assert row.W_minonly >= row.W_none - 1e-9

    # results do not depend on the worker pool size
    fast = SearchSettings(grid_points=12, polish_evals=25, pool_nodes=65)
    serial = sweep("a", (0.25, 0.5, 0.75), 0.3, search=fast, threads=1)
    parallel = sweep("a", (0.25, 0.5, 0.75), 0.3, search=fast, threads=4)
    assert serial == parallel

    _report(
        8,
        f"foc {worst_foc:.1e}, thresholds {worst_thr:.1e}, round trips {worst_rt:.1e}, "
        f"partials {worst_fd:.1e}, quadrature {worst_quad:.1e}, ordering and "
        f"thread determinism exact",
    )


def test_09_redistribution_ripples_through_both_sides(baseline, a_sweep):
    # solve the planner's preferred band at omega = 0.3 and compare the
    # resulting profiles against laissez-faire: both sides must lose at
    # the edges and gain in the middle, with the worker sign changes
    # straddling the pooling cut
    row = next(r for r in a_sweep if r.value == 0.5)
    eq = solve_from_band((row.t_lo, row.t_hi), baseline)
    worker = worker_utility_profile(eq, baseline)
    firm = firm_profit_profile(eq, baseline)
    for prof in (worker, firm):
        diff = prof.policy_values - prof.reference_values
        assert len(prof.crossings) == 2
        marks = [float(prof.grid[0]), *prof.crossings, float(prof.grid[-1])]
        signs = [
            float(np.sign(np.interp(0.5 * (a + b), prof.grid, diff)))
            for a, b in zip(marks[:-1], marks[1:])
        ]
        assert signs == [-1.0, 1.0, -1.0]
    z1, z2 = worker.crossings
    assert z1 < eq.z_hi < z2
    _report(
        9,
        f"worker crossings ({z1:.3f}, {z2:.3f}) straddle the cut {eq.z_hi:.3f}; "
        f"firm profile shows the same minus-plus-minus pattern",
    )
