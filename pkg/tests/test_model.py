"""Primitives: utilities, costs, payoffs, partial derivatives."""

from __future__ import annotations

import math

import numpy as np
import pytest

from wage_band_lab import (
    DomainError,
    ExampleModel,
    ModelParams,
    NoSolutionError,
    ParametricModel,
    SingularBoundaryError,
    education_cost,
    validate_assumptions,
    wage_utility,
)


def baseline(**overrides) -> ParametricModel:
    return ParametricModel(ModelParams(**overrides))


# ---------------------------------------------------------------- wage utility


def test_wage_utility_pinned_values() -> None:
    assert wage_utility(1.0, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert wage_utility(2.0, 2.0) == pytest.approx(0.5, rel=1e-12)
    assert wage_utility(math.e, 1.0) == pytest.approx(1.0, rel=1e-12)


def test_wage_utility_log_branch_is_continuous() -> None:
    # the power branch approaches the log branch as rho -> 1
    for rho in (1.0 - 1e-7, 1.0 + 1e-7):
        assert wage_utility(2.0, rho) == pytest.approx(math.log(2.0), rel=1e-6)
    # inside the switch tolerance the log branch is used exactly
    assert wage_utility(2.0, 1.0 + 1e-12) == math.log(2.0)


def test_wage_utility_normalized_at_one_for_every_rho() -> None:
    for rho in (0.0, 0.3, 1.0, 1.25, 2.0):
        assert wage_utility(1.0, rho) == pytest.approx(0.0, abs=1e-14)


def test_wage_utility_rejects_negative_wage() -> None:
    with pytest.raises(DomainError):
        wage_utility(-0.1, 0.5)


# ------------------------------------------------------------- education cost


def test_education_cost_pinned_value() -> None:
    assert education_cost(1.0, 2.0, 0.5, 2.0) == pytest.approx(0.25, rel=1e-14)


def test_education_cost_zero_education_is_free() -> None:
    assert education_cost(0.0, 1.0, 0.5, 2.0) == 0.0
    assert education_cost(0.0, 0.0, 0.5, 2.0) == 0.0


def test_education_cost_infeasible_at_zero_ability() -> None:
    assert education_cost(0.5, 0.0, 0.5, 2.0) == math.inf


def test_education_cost_vectorized_branches() -> None:
    s = np.array([0.0, 1.0, 2.0, 0.0])
    z = np.array([0.0, 0.0, 2.0, 3.0])
    out = education_cost(s, z, 0.5, 2.0)
    assert out[0] == 0.0 and out[3] == 0.0
    assert out[1] == math.inf
    assert out[2] == pytest.approx(1.0)


# ------------------------------------------------------------------- payoffs


def test_parametric_payoff_pinned_values() -> None:
    m = baseline()
    assert m.production(1.0, 4.0, 2.0) == pytest.approx(7.0, rel=1e-14)
    assert m.profit(3.0, 1.0, 4.0, 2.0) == pytest.approx(4.0, rel=1e-14)
    assert m.utility(3.0, 1.0, 2.0) == pytest.approx(2.0 - 0.25, rel=1e-14)


def test_example_payoff_pinned_values() -> None:
    m = ExampleModel()
    assert m.production(1.0, 0.0, 1.5) == pytest.approx(4.0, rel=1e-14)
    assert m.profit(2.0, 1.0, 1.0, 0.5) == pytest.approx(0.0, abs=1e-14)
    assert m.utility(2.0, 1.0, 0.5) == pytest.approx(0.0, abs=1e-14)


def test_match_fn() -> None:
    m = baseline()
    assert m.match_fn(2.0) == pytest.approx(2.0)
    assert m.match_fn(0.0) == 0.0
    flat = baseline(q=0.0)
    assert flat.match_fn(0.0) == pytest.approx(1.0)  # k * z**0
    assert ExampleModel().match_fn(2.5) == 1.0


# --------------------------------------------------------------------- kappa


def test_kappa_pinned_values() -> None:
    m = baseline()
    assert m.kappa(3.0, 2.0) == pytest.approx(math.sqrt(8.0), rel=1e-12)
    assert m.kappa(1.0, 2.5) == 0.0
    assert m.kappa(5.0, 0.0) == 0.0  # only s = 0 is feasible at z = 0
    ex = ExampleModel()
    assert ex.kappa(2.0, 0.5) == pytest.approx(1.0, rel=1e-12)


def test_kappa_inverts_utility() -> None:
    m = baseline(rho=0.7, b=1.6, beta=0.8)
    for t, z, u0 in [(2.0, 1.0, 0.0), (3.5, 2.5, 0.3), (1.5, 0.7, 0.1)]:
        s = m.kappa_indiff(t, z, u0)
        assert m.utility(t, s, z) == pytest.approx(u0, abs=1e-12)


def test_kappa_wage_too_low() -> None:
    with pytest.raises(NoSolutionError):
        baseline().kappa(0.5, 1.0)
    with pytest.raises(NoSolutionError):
        ExampleModel().kappa_indiff(2.0, 1.0, 1.5)


# ------------------------------------------------------------------- partials


def test_partials_pinned_baseline_point() -> None:
    p = baseline().partials(1.0, 1.0, 1.0, 1.0)
    assert p.u_t == pytest.approx(1.0)
    assert p.u_s == pytest.approx(-1.0)
    assert p.g_t == pytest.approx(-1.0)
    assert p.g_s == pytest.approx(0.5)
    assert p.g_z == pytest.approx(2.0)


def test_partials_example_closed_forms() -> None:
    p = ExampleModel().partials(3.0, 1.0, 2.0, 1.0)
    assert (p.u_t, p.u_s, p.g_t, p.g_s, p.g_z) == (1.0, -2.0, -1.0, 0.0, 2.0)


def _check_partials_against_fd(model, rng, n=40) -> None:
    for _ in range(n):
        t = float(rng.uniform(1.2, 6.0))
        s = float(rng.uniform(0.3, 4.0))
        z = float(rng.uniform(0.4, 2.8))
        x = float(model.match_fn(z))
        p = model.partials(t, x, s, z)
        h = 1e-6
        fd_u_t = (model.utility(t + h, s, z) - model.utility(t - h, s, z)) / (2 * h)
        fd_u_s = (model.utility(t, s + h, z) - model.utility(t, s - h, z)) / (2 * h)
        fd_g_t = (model.profit(t + h, x, s, z) - model.profit(t - h, x, s, z)) / (2 * h)
        fd_g_s = (model.profit(t, x, s + h, z) - model.profit(t, x, s - h, z)) / (2 * h)
        fd_g_z = (model.profit(t, x, s, z + h) - model.profit(t, x, s, z - h)) / (2 * h)
        for got, want in [(p.u_t, fd_u_t), (p.u_s, fd_u_s), (p.g_t, fd_g_t),
                          (p.g_s, fd_g_s), (p.g_z, fd_g_z)]:
            assert got == pytest.approx(want, abs=1e-6 * (1.0 + abs(got)))


def test_partials_match_finite_differences_parametric() -> None:
    rng = np.random.default_rng(2081)
    _check_partials_against_fd(baseline(), rng)
    _check_partials_against_fd(baseline(a=1.0, b=1.3, rho=1.0, q=0.0, beta=0.9), rng)
    _check_partials_against_fd(baseline(a=0.0, rho=1.25, k=2.0), rng)


def test_partials_match_finite_differences_example() -> None:
    _check_partials_against_fd(ExampleModel(), np.random.default_rng(7))


def test_partials_singular_corners() -> None:
    m = baseline()
    with pytest.raises(SingularBoundaryError):
        m.partials(2.0, 1.0, 1.0, 0.0)
    with pytest.raises(SingularBoundaryError):
        m.partials(2.0, 1.0, 0.0, 1.0)  # g_s -> inf for 0 < a < 1
    # but a = 0 and a = 1 are regular at s = 0
    assert baseline(a=0.0).partials(2.0, 1.0, 0.0, 1.0).g_s == 0.0
    assert baseline(a=1.0).partials(2.0, 1.0, 0.0, 1.0).g_s == pytest.approx(1.0)


# ------------------------------------------------------------- ability law


def test_conditional_mean_ability() -> None:
    m = baseline()
    assert m.conditional_mean_ability(1.0) == pytest.approx(2.0)
    assert m.conditional_mean_ability(0.0) == pytest.approx(1.5)
    assert m.conditional_mean_ability(3.0) == pytest.approx(3.0)
    with pytest.raises(DomainError):
        m.conditional_mean_ability(3.5)


def test_expected_profit_above_matches_quadrature() -> None:
    from scipy.integrate import quad

    m = baseline()
    t, x, s, cut = 2.0, 1.0, 1.0, 1.0
    got = m.expected_profit_above(t, x, s, cut)
    dens = 1.0 / (m.z_max - cut)
    want, _ = quad(lambda z: m.profit(t, x, s, z) * dens, cut, m.z_max)
    assert got == pytest.approx(want, rel=1e-10)
    assert got == pytest.approx(3.0, rel=1e-12)


def test_ability_pdf_cdf() -> None:
    m = ExampleModel()
    assert m.ability_pdf(1.0) == pytest.approx(1.0 / 3.0)
    assert m.ability_pdf(3.5) == 0.0
    assert m.ability_cdf(0.0) == 0.0
    assert m.ability_cdf(1.5) == pytest.approx(0.5)
    assert m.ability_cdf(99.0) == 1.0


# ---------------------------------------------------------------- validation


def test_model_params_validation() -> None:
    with pytest.raises(DomainError):
        ModelParams(a=1.1)
    with pytest.raises(DomainError):
        ModelParams(a=-0.1)
    with pytest.raises(DomainError):
        ModelParams(b=0.5)
    with pytest.raises(DomainError):
        ModelParams(beta=0.0)
    with pytest.raises(DomainError):
        ModelParams(z_min=2.0, z_max=2.0)
    with pytest.raises(DomainError):
        ModelParams(ability_law="normal")
    # boundary exponents are allowed; they matter for the sweeps
    ModelParams(a=0.0)
    ModelParams(a=1.0)
    ModelParams(b=1.0)


def test_validate_assumptions_baseline_passes() -> None:
    report = validate_assumptions(baseline())
    assert report.all_passed, [c for c in report.checks if not c.passed]


def test_validate_assumptions_flags_degenerate_exponents() -> None:
    # a = 1 removes the diverging marginal product of the first unit of
    # education; that is a reported finding, not an exception.
    report = validate_assumptions(baseline(a=1.0))
    by_name = {c.name: c for c in report.checks}
    assert not by_name["C_signaling"].passed
    assert by_name["A_worker_preferences"].passed


def test_validate_assumptions_example_model() -> None:
    report = validate_assumptions(ExampleModel())
    by_name = {c.name: c for c in report.checks}
    # quasilinear variant: no diverging g_s, everything else clean
    assert not by_name["C_signaling"].passed
    for name in ("A_worker_preferences", "B_firm_payoffs", "D_matching",
                 "E_normalization", "F_gains_from_trade"):
        assert by_name[name].passed, name


def test_validate_assumptions_flags_bad_floor() -> None:
    report = validate_assumptions(baseline(t_floor=1.5))
    by_name = {c.name: c for c in report.checks}
    assert not by_name["E_normalization"].passed
