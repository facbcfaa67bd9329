"""Welfare accounting tests against closed-form integrals."""

import math

import numpy as np
import pytest

from wage_band_lab.equilibrium import solve_from_band, solve_from_thresholds
from wage_band_lab.errors import DomainError
from wage_band_lab.model import ExampleModel, ModelParams, ParametricModel
from wage_band_lab.welfare import (
    OutcomeDistributions,
    firm_profit_profile,
    outcome_distributions,
    surpluses,
    welfare_report,
    worker_utility_profile,
)


@pytest.fixture(scope="module")
def example():
    return ExampleModel()


@pytest.fixture(scope="module")
def baseline():
    return ParametricModel(ModelParams())


@pytest.fixture(scope="module")
def example_band(example):
    return solve_from_thresholds((0.5, 1.0), example)


def test_example_band_surpluses_match_closed_form(example, example_band):
    # on the path u(z) = z - 1/(4z); in the pool u(z) = 4 - 13/(4z);
    # the density is 1/3
    s_exact = (8.375 - 0.25 * math.log(2.0) - 3.25 * math.log(3.0)) / 3.0
    s_val, r_val = surpluses(example_band, example)
    assert s_val == pytest.approx(s_exact, abs=1e-8)
    assert abs(r_val) < 1e-7


def test_example_band_welfare_report(example, example_band):
    rep = welfare_report(example_band, example, 0.5)
    s_exact = (8.375 - 0.25 * math.log(2.0) - 3.25 * math.log(3.0)) / 3.0
    assert rep.welfare == pytest.approx(0.5 * s_exact, abs=1e-8)
    assert rep.omega == 0.5
    rep0 = welfare_report(example_band, example, 0.0)
    assert rep0.welfare == pytest.approx(rep0.worker_surplus)


def test_example_no_intervention_surplus(example):
    # laissez-faire: sigma(z) = sqrt(2) z, wage 2z + 1, so u(z) = z;
    # the offset entry boundary costs O(eps^2 log eps) here
    eq = solve_from_thresholds((0.0, 3.0), example)
    s_val, r_val = surpluses(eq, example)
    assert s_val == pytest.approx(1.5, abs=1e-6)
    assert abs(r_val) < 1e-7


def test_example_bottom_pool_surpluses(example):
    # pooling everyone above 1/2 at the bottom contract (s=1, t=2):
    # u = 1 - 1/(2z), g = 2z - 1
    eq = solve_from_thresholds((0.5, 0.5), example)
    s_val, r_val = surpluses(eq, example)
    assert s_val == pytest.approx((2.5 - 0.5 * math.log(6.0)) / 3.0, abs=1e-9)
    assert r_val == pytest.approx(6.25 / 3.0, abs=1e-9)


def test_example_full_pool_at_floor_moves_all_surplus_to_firms(example):
    # a degenerate band at the statutory floor pools everyone at zero
    # education: workers keep nothing, firms keep everything
    eq = solve_from_band((1.0, 1.0), example)
    s_val, r_val = surpluses(eq, example)
    assert abs(s_val) < 1e-12
    assert r_val == pytest.approx(3.0, abs=1e-9)
    assert welfare_report(eq, example, 0.5).welfare == pytest.approx(1.5, abs=1e-9)


def test_transfer_neutrality_at_equal_weights(example):
    # with linear wage utility, wages are transfers: at omega = 1/2
    # welfare is half the total surplus E[v - 1 - c] and any policy
    # that removes signaling waste entirely attains E[2z]/2
    for band in ((1.0, 1.0), (2.0, 2.0)):
        eq = solve_from_band(band, example)
        rep = welfare_report(eq, example, 0.5)
        assert rep.welfare == pytest.approx(1.5, abs=1e-9)


def test_omega_bounds_checked(example, example_band):
    with pytest.raises(DomainError):
        welfare_report(example_band, example, -0.1)
    with pytest.raises(DomainError):
        welfare_report(example_band, example, 1.2)


def test_quadrature_refinement_is_converged(example, baseline):
    for model, band in ((example, (0.5, 1.0)), (baseline, (0.3, 1.5))):
        eq = solve_from_thresholds(band, model)
        coarse = surpluses(eq, model, pool_nodes=257)
        fine = surpluses(eq, model, pool_nodes=513)
        for c, f in zip(coarse, fine):
            assert abs(c - f) <= 1e-6 * max(1.0, abs(f))


def test_boundary_offset_is_converged(baseline):
    # halving the entry-boundary offset should leave welfare unchanged
    # to first order
    rep = {}
    for eps in (1e-4, 5e-5):
        eq = solve_from_thresholds((0.0, 2.0), baseline, boundary_eps=eps)
        rep[eps] = welfare_report(eq, baseline, 0.3).welfare
    assert abs(rep[1e-4] - rep[5e-5]) <= 1e-4 * max(1.0, abs(rep[5e-5]))


def test_worker_profile_signs_and_crossings(example, example_band):
    # against laissez-faire the banded policy hurts the excluded and
    # the strongest, helps the middle: crossings at 2 +/- sqrt(3)/2
    prof = worker_utility_profile(example_band, example)
    assert len(prof.crossings) == 2
    assert prof.crossings[0] == pytest.approx(2.0 - math.sqrt(0.75), abs=1e-6)
    assert prof.crossings[1] == pytest.approx(2.0 + math.sqrt(0.75), abs=1e-6)
    diff = prof.policy_values - prof.reference_values
    assert diff[(prof.grid > 0.1) & (prof.grid < 1.1)].max() < 0
    mid = (prof.grid > 1.2) & (prof.grid < 2.8)
    assert diff[mid].min() > 0
    assert diff[prof.grid > 2.9].max() < 0


def test_worker_profile_is_continuous(example, example_band):
    prof = worker_utility_profile(example_band, example, grid=1201)
    jumps = np.abs(np.diff(prof.policy_values))
    assert jumps.max() < 0.02


def test_profile_excluded_region_is_zero(example, example_band):
    prof = worker_utility_profile(example_band, example)
    below = prof.grid < 0.5 - 1e-9
    assert np.all(prof.policy_values[below] == 0.0)


def test_firm_profile_needs_increasing_match_quality(example, example_band):
    # flat match technology admits no firm index x = n(z)
    with pytest.raises(DomainError):
        firm_profit_profile(example_band, example)


def test_firm_profile_runs_on_match_quality_abscissa(baseline):
    eq = solve_from_thresholds((0.5, 2.0), baseline)
    prof = firm_profit_profile(eq, baseline, grid=801)
    # firms are indexed by x = n(z), here the identity
    assert prof.grid[0] == pytest.approx(0.0)
    assert prof.grid[-1] == pytest.approx(3.0)
    assert np.all(np.diff(prof.grid) > 0)
    below = prof.grid < 0.5 - 1e-9
    assert np.all(prof.policy_values[below] == 0.0)
    # pooled firms keep expected profit over randomly drawn workers,
    # which meets the last separating contract at the top threshold
    above_entry = prof.grid > 1.0
    jumps = np.abs(np.diff(prof.policy_values[above_entry]))
    assert jumps.max() < 0.05


def test_outcome_distribution_shapes(example, example_band):
    dist = outcome_distributions(example_band, example)
    assert isinstance(dist, OutcomeDistributions)
    for rows in (dist.education, dist.wages):
        assert rows[0][0] == 0.0
        assert rows[0][1] == pytest.approx(1.0 / 6.0, abs=1e-9)
        assert rows[-1][1] == pytest.approx(1.0)
        assert np.all(np.diff(rows[:, 0]) > -1e-12)
        assert np.all(np.diff(rows[:, 1]) > -1e-12)
    assert dist.education[-1][0] == pytest.approx(math.sqrt(6.5), abs=1e-8)
    assert dist.wages[-1][0] == pytest.approx(5.0, abs=1e-8)


def test_outcome_distribution_matches_ability_law(example, example_band):
    # P(s <= sigma(z)) = G(z) along the path
    dist = outcome_distributions(example_band, example)
    interior = dist.education[1:-1]
    for s_pt, c in interior[::16]:
        z = math.sqrt(0.5 * s_pt * s_pt - 0.25)
        assert c == pytest.approx(z / 3.0, abs=1e-8)


def test_separating_distribution_has_no_atom_at_top(example):
    eq = solve_from_thresholds((0.5, 3.0), example)
    dist = outcome_distributions(eq, example)
    assert dist.wages[-1][0] == pytest.approx(7.0, rel=1e-8)
    assert dist.wages[-1][1] == pytest.approx(1.0)


def test_baseline_surpluses_are_finite_and_sane(baseline):
    # match quality rises with ability here, so firms keep sorting
    # rents even though workers capture the signaling margin
    eq = solve_from_thresholds((0.5, 2.0), baseline)
    s_val, r_val = surpluses(eq, baseline)
    assert 0.0 < s_val < 10.0
    assert 0.0 < r_val < 10.0
    rep = welfare_report(eq, baseline, 0.3)
    assert rep.welfare == pytest.approx(0.7 * s_val + 0.3 * r_val, abs=1e-12)


def test_baseline_rents_vanish_with_flat_match_quality(baseline):
    # with q = 0 every firm holds the same match quality and entry
    # competition drives profit to zero along the whole path
    flat = ParametricModel(ModelParams(q=0.0))
    eq = solve_from_thresholds((0.5, 3.0), flat)
    _, r_val = surpluses(eq, flat)
    assert abs(r_val) < 1e-7
