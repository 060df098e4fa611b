"""Model primitives shared by the enrolment maps.

Holds the structural parameters of the economy and the pipeline that turns an
aggregate enrolment level E into the wage premium, aggregate consumption,
the four endogenous Cobb-Douglas weights, the education shares of both
behavioural types and their indirect utilities. The analytic derivatives of
shares and utilities with respect to E live here too, together with the
central finite-difference oracle used to check them.

Every function is pure. Values are immutable and safe to share between
threads or processes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, fields, replace
from enum import Enum
from typing import TYPE_CHECKING, Final, NamedTuple

from edudyn.exceptions import (
    DegenerateWeights,
    DerivativeMismatch,
    DomainError,
    KinkProximity,
    ParameterError,
    ShareAtBoundary,
)

if TYPE_CHECKING:
    from collections.abc import Callable

logger = logging.getLogger("edudyn")

EPS_DEN: Final = 1e-300
EPS_W: Final = 1e-14
EPS_KINK: Final = 1e-9
FD_REL_STEP: Final = 1e-6
DOMAIN_TOL: Final = 1e-12
FORM_AGREEMENT_TOL: Final = 1e-10


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances threaded through every share and derivative operation.

    Attributes:
        eps_den: Smallest admissible share denominator alpha + beta.
        eps_w: Weights at or below this value contribute nothing to x * log(y) terms,
            and shares within this distance of 0 or 1 are treated as boundary shares.
        eps_kink: Half-width of the band around E = pi_bar / kappa where analytic
            derivatives are refused.
        fd_rel_step: Relative step of central finite differences, h = fd_rel_step * max(1, |x|).
        domain_tol: Admissible excursion outside [0, I / p_e] before a DomainError.
    """

    eps_den: float = EPS_DEN
    eps_w: float = EPS_W
    eps_kink: float = EPS_KINK
    fd_rel_step: float = FD_REL_STEP
    domain_tol: float = DOMAIN_TOL

    def __post_init__(self) -> None:
        """Validate that every tolerance is a finite positive number."""
        for item in fields(self):
            value = float(getattr(self, item.name))
            if not math.isfinite(value) or value <= 0:
                msg = f"Tolerance '{item.name}' must be a finite positive number, got {value!r}"
                raise ParameterError(item.name, msg)
            object.__setattr__(self, item.name, value)


DEFAULT_TOLERANCES: Final = Tolerances()

_STRICTLY_POSITIVE: Final = ("income", "price_education", "price_consumption", "pi_bar")
_NON_NEGATIVE: Final = ("rho", "rho_pi", "sigma", "kappa")


@dataclass(frozen=True)
class ModelParams:
    """Structural constants of the economy.

    Defaults reproduce the reference calibration with income 1, education price 1.2,
    consumption price 0.53, follower reactivity 0.98, premium sensitivity 0.3 and a
    maximum wage premium of 100.

    Attributes:
        income: Per-period income I (> 0).
        price_education: Unit cost of education p_e (> 0).
        price_consumption: Unit cost of the consumption good p_c (> 0).
        rho: Follower imitation reactivity (>= 0).
        rho_pi: Follower reactivity to the wage premium (>= 0).
        sigma: Positional distinction reactivity (>= 0).
        sigma_pi: Positional reactivity to the wage premium (>= 0). ``None`` ties it
            to ``sigma``, and the tie survives ``with_value("sigma", ...)``.
        kappa: Sensitivity of the premium to the supply of educated workers (>= 0).
        pi_bar: Highest possible wage premium (> 0).
    """

    income: float = 1.0
    price_education: float = 1.2
    price_consumption: float = 0.53
    rho: float = 0.98
    rho_pi: float = 0.0
    sigma: float = 16.5
    sigma_pi: float | None = None
    kappa: float = 0.3
    pi_bar: float = 100.0

    def __post_init__(self) -> None:
        """Validate parameter bounds and coerce values to float."""
        for name in _STRICTLY_POSITIVE:
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0:
                msg = f"Parameter '{name}' must be finite and > 0, got {value!r}"
                raise ParameterError(name, msg)
            object.__setattr__(self, name, value)

        for name in (*_NON_NEGATIVE, "sigma_pi"):
            raw = getattr(self, name)
            if raw is None:
                continue
            value = float(raw)
            if not math.isfinite(value) or value < 0:
                msg = f"Parameter '{name}' must be finite and >= 0, got {value!r}"
                raise ParameterError(name, msg)
            object.__setattr__(self, name, value)

    @property
    def e_bar(self) -> float:
        """Upper end of the enrolment domain, I / p_e."""
        return self.income / self.price_education

    @property
    def c_bar(self) -> float:
        """Upper end of the consumption range, I / p_c."""
        return self.income / self.price_consumption

    @property
    def sigma_premium(self) -> float:
        """Effective positional premium reactivity (``sigma`` when ``sigma_pi`` is tied)."""
        return self.sigma if self.sigma_pi is None else self.sigma_pi

    @property
    def kink(self) -> float:
        """Enrolment level where the premium clamp starts binding (inf when kappa = 0)."""
        return self.pi_bar / self.kappa if self.kappa > 0 else math.inf

    def with_value(self, name: str, value: float) -> ModelParams:
        """Return a copy with one parameter replaced.

        Args:
            name: Field name, e.g. ``"sigma"`` or ``"kappa"``.
            value: New value.

        Returns:
            A validated copy of the parameters.

        Raises:
            ParameterError: If ``name`` is not a model parameter or the value is out of bounds.
        """
        if name not in {item.name for item in fields(self)}:
            msg = f"Unknown model parameter '{name}'"
            raise ParameterError(name, msg)
        return replace(self, **{name: value})

    def to_dict(self) -> dict[str, float | None]:
        """Return the parameters as a plain dictionary."""
        return {item.name: getattr(self, item.name) for item in fields(self)}


@dataclass(frozen=True)
class PopulationMix:
    """Population structure.

    Attributes:
        lam: Follower share lambda in [0, 1].
        mu: Willingness to switch (logit intensity, >= 0). Only the two-dimensional map uses it.
    """

    lam: float = 0.5
    mu: float = 0.0

    def __post_init__(self) -> None:
        """Validate the follower share and the switching intensity."""
        lam = float(self.lam)
        if not 0.0 <= lam <= 1.0:
            msg = f"Follower share 'lambda' must lie in [0, 1], got {lam!r}"
            raise ParameterError("lambda", msg)
        mu = float(self.mu)
        if not math.isfinite(mu) or mu < 0:
            msg = f"Switching intensity 'mu' must be finite and >= 0, got {mu!r}"
            raise ParameterError("mu", msg)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)


class Regime(str, Enum):
    """Wage-premium regime at an enrolment level."""

    INTERIOR = "interior"
    SATURATED = "saturated"
    KINK = "kink"


class Premium(NamedTuple):
    """Wage premium and whether the zero clamp binds."""

    value: float
    saturated: bool


class PreferenceWeights(NamedTuple):
    """The four endogenous Cobb-Douglas weights (or their E-derivatives)."""

    alpha_F: float
    beta_F: float
    alpha_P: float
    beta_P: float


class TypeShares(NamedTuple):
    """Education expenditure shares s_i = alpha_i / (alpha_i + beta_i)."""

    s_F: float
    s_P: float


class ShareDerivatives(NamedTuple):
    """Derivatives ds_i / dE."""

    ds_F: float
    ds_P: float


class IndirectUtility(NamedTuple):
    """Type-specific indirect utilities."""

    u_F: float
    u_P: float


class UtilityDerivatives(NamedTuple):
    """Derivatives dU_i / dE."""

    dU_F: float
    dU_P: float


class Demands(NamedTuple):
    """Individual Cobb-Douglas demands of both types."""

    e_F: float
    c_F: float
    e_P: float
    c_P: float


class FiniteDifference(NamedTuple):
    """Central finite-difference estimate with a Richardson error estimate."""

    value: float
    error: float


def check_enrolment(E: float, params: ModelParams, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Validate an enrolment level and clip sub-tolerance excursions into [0, I / p_e].

    Raises:
        DomainError: If E is not finite or lies outside the domain by more than ``tol.domain_tol``.
    """
    if not math.isfinite(E) or E < -tol.domain_tol or E > params.e_bar + tol.domain_tol:
        msg = f"Enrolment level {E!r} outside the domain [0, {params.e_bar!r}]"
        raise DomainError(msg)
    return min(max(E, 0.0), params.e_bar)


def wage_premium(E: float, params: ModelParams, tol: Tolerances = DEFAULT_TOLERANCES) -> Premium:
    """Wage premium max(pi_bar - kappa * E, 0) and its saturation flag."""
    E = check_enrolment(E, params, tol)
    raw = params.pi_bar - params.kappa * E
    if raw < 0:
        return Premium(0.0, saturated=True)
    return Premium(raw, saturated=False)


def consumption_of(E: float, params: ModelParams, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Aggregate consumption implied by the budget identity, I / p_c - (p_e / p_c) * E."""
    E = check_enrolment(E, params, tol)
    consumption = (params.income - params.price_education * E) / params.price_consumption
    return min(max(consumption, 0.0), params.c_bar)


def premium_regime(E: float, params: ModelParams, tol: Tolerances = DEFAULT_TOLERANCES) -> Regime:
    """Classify E as interior (premium > 0), saturated (premium clamped) or at the kink."""
    E = check_enrolment(E, params, tol)
    if params.kappa == 0:
        return Regime.INTERIOR
    if abs(E - params.kink) <= tol.eps_kink:
        return Regime.KINK
    return Regime.SATURATED if params.pi_bar - params.kappa * E < 0 else Regime.INTERIOR


def preference_weights(E: float, params: ModelParams, tol: Tolerances = DEFAULT_TOLERANCES) -> PreferenceWeights:
    """The four preference weights at enrolment level E.

    alpha_F = 1 - exp(-rho E - rho_pi Pi), beta_F = 1 - exp(-rho C),
    alpha_P = exp(-sigma E) (1 - exp(-sigma_pi Pi)), beta_P = exp(-sigma C).
    """
    premium = wage_premium(E, params, tol).value
    consumption = consumption_of(E, params, tol)
    E = check_enrolment(E, params, tol)
    return PreferenceWeights(
        alpha_F=-math.expm1(-params.rho * E - params.rho_pi * premium),
        beta_F=-math.expm1(-params.rho * consumption),
        alpha_P=math.exp(-params.sigma * E) * -math.expm1(-params.sigma_premium * premium),
        beta_P=math.exp(-params.sigma * consumption),
    )


def _split(alpha: float, beta: float, tol: Tolerances, label: str) -> tuple[float, float]:
    """Return (alpha / (alpha + beta), beta / (alpha + beta)) for one type."""
    denominator = alpha + beta
    if denominator <= tol.eps_den:
        msg = f"Both preference weights of type {label} vanish (alpha={alpha!r}, beta={beta!r})"
        raise DegenerateWeights(msg)
    return alpha / denominator, beta / denominator


def type_shares(weights: PreferenceWeights, tol: Tolerances = DEFAULT_TOLERANCES) -> TypeShares:
    """Education shares of followers and positional agents.

    Raises:
        DegenerateWeights: If alpha_i + beta_i underflows for either type.
    """
    s_F, _ = _split(weights.alpha_F, weights.beta_F, tol, "F")
    s_P, _ = _split(weights.alpha_P, weights.beta_P, tol, "P")
    return TypeShares(s_F, s_P)


def individual_demands(E: float, params: ModelParams, tol: Tolerances = DEFAULT_TOLERANCES) -> Demands:
    """Cobb-Douglas demands e_i = s_i I / p_e and c_i = (1 - s_i) I / p_c."""
    weights = preference_weights(E, params, tol)
    s_F, rest_F = _split(weights.alpha_F, weights.beta_F, tol, "F")
    s_P, rest_P = _split(weights.alpha_P, weights.beta_P, tol, "P")
    return Demands(
        e_F=s_F * params.e_bar,
        c_F=rest_F * params.c_bar,
        e_P=s_P * params.e_bar,
        c_P=rest_P * params.c_bar,
    )


def weight_derivatives(E: float, params: ModelParams, tol: Tolerances = DEFAULT_TOLERANCES) -> PreferenceWeights:
    """Closed-form derivatives of the four weights with respect to E.

    In the saturated regime the premium is constant, so the premium terms drop out.
    Note that beta_F falls as E rises: d beta_F / dE = -(rho p_e / p_c) exp(-rho C).

    Raises:
        KinkProximity: If E is within ``tol.eps_kink`` of the premium kink.
    """
    regime = premium_regime(E, params, tol)
    if regime is Regime.KINK:
        msg = f"Enrolment level {E!r} is within {tol.eps_kink} of the premium kink {params.kink!r}"
        raise KinkProximity(msg)

    E = check_enrolment(E, params, tol)
    premium = wage_premium(E, params, tol).value
    consumption = consumption_of(E, params, tol)
    premium_E = -params.kappa if regime is Regime.INTERIOR else 0.0
    price_ratio = params.price_education / params.price_consumption

    exp_a = math.exp(-params.rho * E - params.rho_pi * premium)
    exp_b = math.exp(-params.rho * consumption)
    exp_a_tilde = math.exp(-params.sigma * E)
    exp_b_tilde = math.exp(-params.sigma_premium * premium)
    exp_c_tilde = math.exp(-params.sigma * consumption)

    return PreferenceWeights(
        alpha_F=(params.rho + params.rho_pi * premium_E) * exp_a,
        beta_F=-params.rho * price_ratio * exp_b,
        alpha_P=(
            -params.sigma * exp_a_tilde * -math.expm1(-params.sigma_premium * premium)
            + params.sigma_premium * premium_E * exp_a_tilde * exp_b_tilde
        ),
        beta_P=params.sigma * price_ratio * exp_c_tilde,
    )


def shares_derivative_E(E: float, params: ModelParams, tol: Tolerances = DEFAULT_TOLERANCES) -> ShareDerivatives:
    """Quotient-rule derivatives ds_i / dE = (alpha_i' beta_i - alpha_i beta_i') / (alpha_i + beta_i)^2.

    Raises:
        KinkProximity: Near the premium kink.
        DegenerateWeights: If a share denominator underflows.
    """
    slopes = weight_derivatives(E, params, tol)
    weights = preference_weights(E, params, tol)

    def quotient(alpha: float, beta: float, d_alpha: float, d_beta: float, label: str) -> float:
        denominator = alpha + beta
        if denominator <= tol.eps_den:
            msg = f"Both preference weights of type {label} vanish at E={E!r}"
            raise DegenerateWeights(msg)
        return (d_alpha * beta - alpha * d_beta) / denominator**2

    return ShareDerivatives(
        ds_F=quotient(weights.alpha_F, weights.beta_F, slopes.alpha_F, slopes.beta_F, "F"),
        ds_P=quotient(weights.alpha_P, weights.beta_P, slopes.alpha_P, slopes.beta_P, "P"),
    )


def _xlogy(x: float, y: float, eps_w: float) -> float:
    """x * log(y) with the Cobb-Douglas limit 0 for vanishing weights."""
    if x <= eps_w:
        return 0.0
    return x * math.log(y)


def indirect_utility(E: float, params: ModelParams, tol: Tolerances = DEFAULT_TOLERANCES) -> IndirectUtility:
    """Indirect utilities U_i = alpha_i [log(I/p_e) + log s_i] + beta_i [log(I/p_c) + log(1 - s_i)].

    A term alpha * log(s) (or beta * log(1 - s)) is taken as 0 when the weight is at most
    ``tol.eps_w``, the limit of Cobb-Douglas utility as the weight vanishes.
    """
    weights = preference_weights(E, params, tol)
    log_e = math.log(params.e_bar)
    log_c = math.log(params.c_bar)

    def utility(alpha: float, beta: float, label: str) -> float:
        share, rest = _split(alpha, beta, tol, label)
        return alpha * log_e + _xlogy(alpha, share, tol.eps_w) + beta * log_c + _xlogy(beta, rest, tol.eps_w)

    return IndirectUtility(
        u_F=utility(weights.alpha_F, weights.beta_F, "F"),
        u_P=utility(weights.alpha_P, weights.beta_P, "P"),
    )


def utility_derivative_forms(
    E: float,
    params: ModelParams,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[UtilityDerivatives, UtilityDerivatives]:
    """Compact and expanded forms of dU_i / dE.

    The compact form uses the cancellation of the share-derivative terms,
    alpha' [log(I/p_e) + log s] + beta' [log(I/p_c) + log(1 - s)]. The expanded form keeps
    them, adding alpha s' / s - beta s' / (1 - s), which is zero analytically.

    Returns:
        ``(compact, expanded)``.

    Raises:
        ShareAtBoundary: If a share lies within ``tol.eps_w`` of 0 or 1.
        KinkProximity: Near the premium kink.
    """
    weights = preference_weights(E, params, tol)
    slopes = weight_derivatives(E, params, tol)
    share_slopes = shares_derivative_E(E, params, tol)
    log_e = math.log(params.e_bar)
    log_c = math.log(params.c_bar)

    def forms(alpha: float, beta: float, d_alpha: float, d_beta: float, d_share: float, label: str) -> tuple:
        share, rest = _split(alpha, beta, tol, label)
        if share <= tol.eps_w or rest <= tol.eps_w:
            msg = f"Share of type {label} is at the boundary (s={share!r}) at E={E!r}; utility slopes diverge"
            raise ShareAtBoundary(msg)
        education_term = d_alpha * (log_e + math.log(share))
        consumption_term = d_beta * (log_c + math.log(rest))
        compact = education_term + consumption_term
        expanded = education_term + alpha * d_share / share + consumption_term - beta * d_share / rest
        scale = abs(education_term) + abs(consumption_term) + 2 * abs((alpha + beta) * d_share)
        if abs(compact - expanded) > FORM_AGREEMENT_TOL * max(scale, abs(compact)):
            msg = f"Utility slope forms disagree for type {label} at E={E!r}: {compact!r} vs {expanded!r}"
            raise DerivativeMismatch(msg)
        return compact, expanded

    compact_F, expanded_F = forms(
        weights.alpha_F, weights.beta_F, slopes.alpha_F, slopes.beta_F, share_slopes.ds_F, "F"
    )
    compact_P, expanded_P = forms(
        weights.alpha_P, weights.beta_P, slopes.alpha_P, slopes.beta_P, share_slopes.ds_P, "P"
    )
    return UtilityDerivatives(compact_F, compact_P), UtilityDerivatives(expanded_F, expanded_P)


def utility_derivative_E(E: float, params: ModelParams, tol: Tolerances = DEFAULT_TOLERANCES) -> UtilityDerivatives:
    """Derivatives dU_i / dE (compact form, checked against the expanded form).

    Raises:
        ShareAtBoundary: If a share lies within ``tol.eps_w`` of 0 or 1.
        KinkProximity: Near the premium kink.
        DerivativeMismatch: If the two forms disagree beyond relative 1e-10.
    """
    compact, _ = utility_derivative_forms(E, params, tol)
    return compact


def finite_difference(f: Callable[[float], float], x: float, h_rel: float = FD_REL_STEP) -> FiniteDifference:
    """Central difference f'(x) ~ (f(x + h) - f(x - h)) / 2h with h = h_rel * max(1, |x|).

    A second estimate at h / 2 gives the Richardson error estimate (4/3)|D(h) - D(h/2)|,
    to which the rounding floor eps * max|f| / h is added.
    """
    h = h_rel * max(1.0, abs(x))
    f_plus, f_minus = f(x + h), f(x - h)
    coarse = (f_plus - f_minus) / (2 * h)
    fine = (f(x + h / 2) - f(x - h / 2)) / h
    rounding = 4 * math.ulp(max(abs(f_plus), abs(f_minus), 1e-300)) / h
    return FiniteDifference(value=coarse, error=4 / 3 * abs(coarse - fine) + rounding)


def bounded_difference(
    f: Callable[[float], float],
    x: float,
    lo: float,
    hi: float,
    h_rel: float = FD_REL_STEP,
) -> FiniteDifference:
    """Finite difference that stays inside [lo, hi], switching to one-sided steps at the edges."""
    h = h_rel * max(1.0, abs(x))
    if x - h >= lo and x + h <= hi:
        return finite_difference(f, x, h_rel)

    step = h if x + h <= hi else -h
    f_x = f(x)
    coarse = (f(x + step) - f_x) / step
    fine = (f(x + step / 2) - f_x) / (step / 2)
    rounding = 4 * math.ulp(max(abs(f_x), 1e-300)) / h
    return FiniteDifference(value=2 * fine - coarse, error=abs(coarse - fine) + rounding)
