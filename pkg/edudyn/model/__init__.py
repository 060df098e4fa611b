"""Enrolment maps and their building blocks."""

from .core import (
    DEFAULT_TOLERANCES,
    Demands,
    IndirectUtility,
    ModelParams,
    PopulationMix,
    PreferenceWeights,
    Premium,
    Regime,
    ShareDerivatives,
    Tolerances,
    TypeShares,
    UtilityDerivatives,
    consumption_of,
    finite_difference,
    indirect_utility,
    individual_demands,
    preference_weights,
    premium_regime,
    shares_derivative_E,
    type_shares,
    utility_derivative_E,
    wage_premium,
    weight_derivatives,
)
from .map_1d import (
    AbsorbingInterval,
    FixedPoint1D,
    Stability,
    Trajectory,
    absorbing_interval,
    comparative_statics_kappa,
    critical_points,
    existence_condition,
    fixed_points_1d,
    gamma,
    gamma_iterate,
    gamma_prime,
    iterate_1d,
    log_abs_gamma_kappa,
)
from .map_2d import (
    Bifurcation,
    FixedPoint2D,
    Jacobian2D,
    MuThreshold,
    StabilityReport,
    State2D,
    Trajectory2D,
    enrolment_region,
    fixed_points_2d,
    iterate_2d,
    jacobian_2d,
    jacobian_2d_numeric,
    mu_threshold,
    nearest_bifurcation,
    phi,
    schur_conditions,
    schur_stability,
    spectral_radius,
    switch_share,
)

__all__ = [
    "DEFAULT_TOLERANCES",
    "AbsorbingInterval",
    "Bifurcation",
    "Demands",
    "FixedPoint1D",
    "FixedPoint2D",
    "IndirectUtility",
    "Jacobian2D",
    "ModelParams",
    "MuThreshold",
    "PopulationMix",
    "PreferenceWeights",
    "Premium",
    "Regime",
    "ShareDerivatives",
    "Stability",
    "StabilityReport",
    "State2D",
    "Tolerances",
    "Trajectory",
    "Trajectory2D",
    "TypeShares",
    "UtilityDerivatives",
    "absorbing_interval",
    "comparative_statics_kappa",
    "consumption_of",
    "critical_points",
    "enrolment_region",
    "existence_condition",
    "finite_difference",
    "fixed_points_1d",
    "fixed_points_2d",
    "gamma",
    "gamma_iterate",
    "gamma_prime",
    "indirect_utility",
    "individual_demands",
    "iterate_1d",
    "iterate_2d",
    "jacobian_2d",
    "jacobian_2d_numeric",
    "log_abs_gamma_kappa",
    "mu_threshold",
    "nearest_bifurcation",
    "phi",
    "preference_weights",
    "premium_regime",
    "schur_conditions",
    "schur_stability",
    "shares_derivative_E",
    "spectral_radius",
    "switch_share",
    "type_shares",
    "utility_derivative_E",
    "wage_premium",
    "weight_derivatives",
]
