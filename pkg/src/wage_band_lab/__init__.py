"""Numerical toolkit for monotone signaling equilibria under wage bands."""

from .equilibrium import (
    AbilityBand,
    Equilibrium,
    WageBand,
    off_path_belief,
    roundtrip_check,
    solve_from_band,
    solve_from_thresholds,
)
from .errors import (
    ClassificationError,
    ConfigError,
    ConvergenceError,
    DomainError,
    InfeasiblePolicyError,
    NoSolutionError,
    SingularBoundaryError,
    SolverError,
    WageBandError,
)
from .model import (
    ExampleModel,
    ModelParams,
    ParametricModel,
    Partials,
    education_cost,
    validate_assumptions,
    wage_utility,
)
from .optimizer import (
    FrontierResult,
    OptimalPolicy,
    SearchSettings,
    SweepRow,
    frontier,
    optimize,
    optimize_all,
    sweep,
    welfare_improvement,
)
from .separating import SeparatingPath, integrate_path
from .thresholds import (
    bottom_from_ability,
    bottom_from_wage,
    pooling_only,
    pooling_wage,
    t_hat,
    t_hi_star,
    top_from_ability,
    top_from_wage,
)
from .welfare import (
    Profile,
    WelfareReport,
    firm_profit_profile,
    outcome_distributions,
    surpluses,
    welfare_report,
    worker_utility_profile,
)

__all__ = [
    "AbilityBand",
    "ClassificationError",
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "Equilibrium",
    "ExampleModel",
    "FrontierResult",
    "InfeasiblePolicyError",
    "ModelParams",
    "NoSolutionError",
    "OptimalPolicy",
    "ParametricModel",
    "Partials",
    "Profile",
    "SearchSettings",
    "SeparatingPath",
    "SingularBoundaryError",
    "SolverError",
    "SweepRow",
    "WageBand",
    "WageBandError",
    "WelfareReport",
    "bottom_from_ability",
    "bottom_from_wage",
    "education_cost",
    "firm_profit_profile",
    "frontier",
    "integrate_path",
    "off_path_belief",
    "optimize",
    "optimize_all",
    "outcome_distributions",
    "pooling_only",
    "pooling_wage",
    "roundtrip_check",
    "solve_from_band",
    "solve_from_thresholds",
    "surpluses",
    "sweep",
    "t_hat",
    "t_hi_star",
    "top_from_ability",
    "top_from_wage",
    "validate_assumptions",
    "wage_utility",
    "welfare_improvement",
    "welfare_report",
    "worker_utility_profile",
]

__version__ = "0.1.0"
