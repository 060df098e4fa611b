"""One-dimensional enrolment map with a fixed follower share.

Gamma(E; lambda) = (I / p_e) [lambda s_F(E) + (1 - lambda) s_P(E)] sends next period's
aggregate enrolment to the population-weighted education shares. This module
iterates it, locates and classifies its fixed points, certifies unimodality,
builds the absorbing interval and computes the comparative statics of a
stable fixed point with respect to the premium sensitivity kappa.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Final, Literal, NamedTuple

import numpy as np
from scipy.optimize import bisect, minimize_scalar
from scipy.special import expit, logsumexp

from edudyn.exceptions import (
    DomainError,
    InvarianceViolation,
    KinkProximity,
    NotStable,
    PropositionViolation,
    UnimodalityNotCertified,
)
from edudyn.model.core import (
    DEFAULT_TOLERANCES,
    Regime,
    bounded_difference,
    check_enrolment,
    premium_regime,
    preference_weights,
    shares_derivative_E,
    type_shares,
    wage_premium,
)

if TYPE_CHECKING:
    from collections.abc import Callable

    from edudyn.model.core import ModelParams, Tolerances

logger = logging.getLogger("edudyn")

NONHYPERBOLIC_BAND: Final = 1e-8
ROOT_XTOL: Final = 1e-12
ROOT_DEDUP: Final = 1e-9
CRITICAL_XTOL: Final = 1e-10
INVARIANCE_TOL: Final = 1e-10
FLAT_TOL: Final = 1e-13

DEFAULT_ROOT_GRID: Final = 2000
MIN_ROOT_GRID: Final = 1000
DEFAULT_CRITICAL_GRID: Final = 10_000
MIN_CRITICAL_GRID: Final = 10_000
DEFAULT_INVARIANCE_SAMPLES: Final = 10_000


class Stability(str, Enum):
    """Local stability class of a fixed point of the one-dimensional map."""

    STABLE = "stable"
    UNSTABLE = "unstable"
    NONHYPERBOLIC = "nonhyperbolic"


class Derivative(NamedTuple):
    """Slope of the map and how it was obtained."""

    value: float
    analytic: bool
    error: float = 0.0


def check_follower_share(lam: float) -> float:
    """Validate a follower share.

    Raises:
        DomainError: If lambda is outside [0, 1].
    """
    if not 0.0 <= lam <= 1.0:
        msg = f"Follower share {lam!r} outside [0, 1]"
        raise DomainError(msg)
    return float(lam)


def gamma(E: float, lam: float, params: ModelParams, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Evaluate Gamma(E; lambda), the enrolment of the next period."""
    lam = check_follower_share(lam)
    shares = type_shares(preference_weights(E, params, tol), tol)
    return min(params.e_bar * (lam * shares.s_F + (1 - lam) * shares.s_P), params.e_bar)


def gamma_lambda(E: float, params: ModelParams, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Partial derivative of Gamma with respect to lambda, (I / p_e)(s_F - s_P)."""
    shares = type_shares(preference_weights(E, params, tol), tol)
    return params.e_bar * (shares.s_F - shares.s_P)


def gamma_prime(E: float, lam: float, params: ModelParams, tol: Tolerances = DEFAULT_TOLERANCES) -> Derivative:
    """Slope Gamma'(E; lambda).

    Uses the analytic share derivatives and falls back to a finite difference near
    the premium kink. The fallback steps one-sidedly at the ends of the domain.
    """
    lam = check_follower_share(lam)
    try:
        slopes = shares_derivative_E(E, params, tol)
    except KinkProximity:
        logger.debug("Kink proximity at E=%r, using a finite difference", E)
        estimate = bounded_difference(
            lambda x: gamma(x, lam, params, tol),
            check_enrolment(E, params, tol),
            0.0,
            params.e_bar,
            tol.fd_rel_step,
        )
        return Derivative(estimate.value, analytic=False, error=estimate.error)
    return Derivative(params.e_bar * (lam * slopes.ds_F + (1 - lam) * slopes.ds_P), analytic=True)


def gamma_iterate(
    E: float,
    lam: float,
    params: ModelParams,
    times: int,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Apply Gamma ``times`` times to E."""
    if times < 0:
        msg = f"Iteration count must be non-negative, got {times}"
        raise ValueError(msg)
    for _ in range(times):
        E = gamma(E, lam, params, tol)
    return E


def classify(slope: float) -> Stability:
    """Classify a fixed point by the magnitude of the slope of the map there."""
    if abs(abs(slope) - 1.0) <= NONHYPERBOLIC_BAND:
        return Stability.NONHYPERBOLIC
    return Stability.STABLE if abs(slope) < 1.0 else Stability.UNSTABLE


@dataclass(frozen=True)
class Trajectory:
    """Orbit of a map.

    Attributes:
        states: Every visited state, ``states[0]`` being the seed. One column per state
            variable for two-dimensional orbits.
        burn_in: Number of leading transient steps.
        n_steps: Number of recorded steps after the burn-in.
    """

    states: np.ndarray
    burn_in: int
    n_steps: int

    @property
    def tail(self) -> np.ndarray:
        """The states recorded after the burn-in."""
        return self.states[-self.n_steps :]

    @property
    def window_min(self) -> np.ndarray | float:
        """Minimum over the post-burn-in window."""
        return self.tail.min(axis=0)

    @property
    def window_max(self) -> np.ndarray | float:
        """Maximum over the post-burn-in window."""
        return self.tail.max(axis=0)


def _check_steps(n_steps: int, burn_in: int) -> None:
    if n_steps < 1:
        msg = f"Number of recorded steps must be positive, got {n_steps}"
        raise ValueError(msg)
    if burn_in < 0:
        msg = f"Burn-in must be non-negative, got {burn_in}"
        raise ValueError(msg)


def iterate_1d(
    E0: float,
    lam: float,
    params: ModelParams,
    n_steps: int,
    burn_in: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Trajectory:
    """Iterate the one-dimensional map from E0 for ``burn_in + n_steps`` steps.

    Every state stays in [0, I / p_e].
    """
    _check_steps(n_steps, burn_in)
    lam = check_follower_share(lam)
    states = np.empty(burn_in + n_steps + 1)
    states[0] = check_enrolment(E0, params, tol)
    for t in range(burn_in + n_steps):
        states[t + 1] = gamma(states[t], lam, params, tol)
    return Trajectory(states=states, burn_in=burn_in, n_steps=n_steps)


def scan_roots(residual: Callable[[float], float], lo: float, hi: float, grid_n: int) -> list[float]:
    """Find the roots of ``residual`` on [lo, hi] by grid scan and bisection.

    Grid points where the residual is exactly zero are roots. Every strict sign
    change between neighbours is refined with bisection to 1e-12, and roots closer
    than 1e-9 are merged.
    """
    grid = np.linspace(lo, hi, grid_n)
    values = np.array([residual(x) for x in grid])
    roots: list[float] = []
    for k in range(grid_n):
        if values[k] == 0:
            roots.append(float(grid[k]))
        elif k + 1 < grid_n and values[k] * values[k + 1] < 0:
            roots.append(float(bisect(residual, grid[k], grid[k + 1], xtol=ROOT_XTOL)))

    unique: list[float] = []
    for root in sorted(roots):
        if not unique or root - unique[-1] > ROOT_DEDUP:
            unique.append(root)
    return unique


@dataclass(frozen=True)
class FixedPoint1D:
    """Fixed point of the one-dimensional map.

    Attributes:
        E_star: Enrolment level with Gamma(E*) = E*.
        gamma_prime: Slope of the map at E*.
        classification: Stability class from |Gamma'(E*)|.
        regime: Premium regime at E*.
        analytic_derivative: False when the slope came from the finite-difference fallback.
    """

    E_star: float
    gamma_prime: float
    classification: Stability
    regime: Regime
    analytic_derivative: bool


def fixed_points_1d(
    lam: float,
    params: ModelParams,
    grid_n: int = DEFAULT_ROOT_GRID,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list[FixedPoint1D]:
    """Every fixed point of Gamma(.; lambda) on [0, I / p_e], in increasing order.

    Args:
        lam: Follower share.
        params: Model parameters.
        grid_n: Number of scan points (at least 1000).
        tol: Numerical tolerances.

    Returns:
        The classified fixed points. An empty list is possible and is logged together
        with the sufficient existence condition.
    """
    if grid_n < MIN_ROOT_GRID:
        msg = f"Root scan needs at least {MIN_ROOT_GRID} grid points, got {grid_n}"
        raise ValueError(msg)
    lam = check_follower_share(lam)
    roots = scan_roots(lambda E: gamma(E, lam, params, tol) - E, 0.0, params.e_bar, grid_n)

    points = []
    for root in roots:
        slope = gamma_prime(root, lam, params, tol)
        points.append(
            FixedPoint1D(
                E_star=root,
                gamma_prime=slope.value,
                classification=classify(slope.value),
                regime=premium_regime(root, params, tol),
                analytic_derivative=slope.analytic,
            ),
        )

    if not points:
        check = existence_condition(lam, params)
        logger.warning("No fixed point found for lambda=%r; existence condition case: %s", lam, check.case)
    return points


@dataclass(frozen=True)
class ExistenceCheck:
    """Outcome of the sufficient existence condition for an interior fixed point.

    Attributes:
        case: ``"i"`` when p_e <= p_c, ``"ii"`` when lambda lies below the bound, otherwise
            ``"inconclusive"``.
        S: The positional share bound exp(x) / (1 + exp(x)) with
            x = sigma (I / p_e)(1 - kappa) - sigma_pi pi_bar.
        lambda_bound: (p_c / p_e - S) / (1 - S).
        endpoint_holds: Whether lambda + (1 - lambda) S <= 1.
        assumptions_hold: Whether rho = rho_pi and sigma = sigma_pi, as the condition assumes.
    """

    case: Literal["i", "ii", "inconclusive"]
    S: float
    lambda_bound: float
    endpoint_holds: bool
    assumptions_hold: bool


def existence_condition(lam: float, params: ModelParams) -> ExistenceCheck:
    """Evaluate the sufficient condition for a fixed point of the one-dimensional map."""
    lam = check_follower_share(lam)
    assumptions_hold = params.rho == params.rho_pi and params.sigma == params.sigma_premium
    if not assumptions_hold:
        logger.warning(
            "Existence condition assumes rho == rho_pi and sigma == sigma_pi (got %r/%r and %r/%r)",
            params.rho,
            params.rho_pi,
            params.sigma,
            params.sigma_premium,
        )

    exponent = params.sigma * params.e_bar * (1 - params.kappa) - params.sigma_premium * params.pi_bar
    S = float(expit(exponent))
    bound = -math.inf if S >= 1.0 else (params.price_consumption / params.price_education - S) / (1 - S)

    case: Literal["i", "ii", "inconclusive"]
    if params.price_education <= params.price_consumption:
        case = "i"
    elif lam < bound:
        case = "ii"
    else:
        case = "inconclusive"
    return ExistenceCheck(
        case=case,
        S=S,
        lambda_bound=bound,
        endpoint_holds=lam + (1 - lam) * S <= 1.0,
        assumptions_hold=assumptions_hold,
    )


class CriticalPoint(NamedTuple):
    """Interior local extremum of the map."""

    E: float
    kind: Literal["max", "min"]
    value: float


@dataclass(frozen=True)
class CriticalPointScan:
    """Interior extrema of the map and the unimodality verdict.

    Attributes:
        points: Local extrema in increasing order of E.
        unimodal: True iff there is exactly one interior maximum and no interior minimum.
        reason: ``"unimodal"``, ``"monotone"``, ``"multimodal"`` or ``"interior-minimum"``.
    """

    points: list[CriticalPoint]
    unimodal: bool
    reason: str

    @property
    def maxima(self) -> list[CriticalPoint]:
        """Interior maxima."""
        return [point for point in self.points if point.kind == "max"]

    @property
    def minima(self) -> list[CriticalPoint]:
        """Interior minima."""
        return [point for point in self.points if point.kind == "min"]


def critical_points(
    lam: float,
    params: ModelParams,
    grid_n: int = DEFAULT_CRITICAL_GRID,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> CriticalPointScan:
    """Locate the interior extrema of Gamma(.; lambda).

    Sign changes of the forward differences on a uniform grid bracket each extremum,
    which is then refined by golden-section search to 1e-10. Differences below a
    rounding floor count as flat.

    Raises:
        ValueError: If ``grid_n`` is below 10^4.
    """
    if grid_n < MIN_CRITICAL_GRID:
        msg = f"Critical-point scan needs at least {MIN_CRITICAL_GRID} grid points, got {grid_n}"
        raise ValueError(msg)
    lam = check_follower_share(lam)
    grid = np.linspace(0.0, params.e_bar, grid_n)
    values = np.array([gamma(E, lam, params, tol) for E in grid])
    steps = np.diff(values)
    steps[np.abs(steps) <= FLAT_TOL * params.e_bar] = 0.0

    def evaluate(E: float) -> float:
        return gamma(E, lam, params, tol)

    points: list[CriticalPoint] = []
    last_index: int | None = None
    for k, step in enumerate(steps):
        if step == 0:
            continue
        if last_index is not None and np.sign(step) != np.sign(steps[last_index]):
            kind: Literal["max", "min"] = "max" if steps[last_index] > 0 else "min"
            window = values[last_index + 1 : k + 1]
            middle = last_index + 1 + int(np.argmax(window) if kind == "max" else np.argmin(window))
            sign = -1.0 if kind == "max" else 1.0
            result = minimize_scalar(
                lambda E, sign=sign: sign * evaluate(E),
                bracket=(grid[last_index], grid[middle], grid[k + 1]),
                method="golden",
                options={"xtol": CRITICAL_XTOL},
            )
            E = float(np.clip(result.x, grid[last_index], grid[k + 1]))
            points.append(CriticalPoint(E=E, kind=kind, value=evaluate(E)))
        last_index = k

    n_max = sum(point.kind == "max" for point in points)
    n_min = len(points) - n_max
    if not points:
        unimodal, reason = False, "monotone"
    elif n_max == 1 and n_min == 0:
        unimodal, reason = True, "unimodal"
    elif n_max == 0:
        unimodal, reason = False, "interior-minimum"
    else:
        unimodal, reason = False, "multimodal"
    return CriticalPointScan(points=points, unimodal=unimodal, reason=reason)


@dataclass(frozen=True)
class AbsorbingInterval:
    """Trapping interval J = [Gamma(E_max), E_max] with E_max = Gamma(E_c).

    Attributes:
        E_c: The unique interior maximiser of the map.
        E_min: Lower end Gamma(E_max).
        E_max: Upper end Gamma(E_c).
        unimodal_certified: Always True, uncertified maps raise instead.
    """

    E_c: float
    E_min: float
    E_max: float
    unimodal_certified: bool = True

    def contains(self, E: float, tol: float = INVARIANCE_TOL) -> bool:
        """Whether E lies in J up to ``tol``."""
        return self.E_min - tol <= E <= self.E_max + tol


def absorbing_interval(
    lam: float,
    params: ModelParams,
    grid_n: int = DEFAULT_CRITICAL_GRID,
    samples: int = DEFAULT_INVARIANCE_SAMPLES,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> AbsorbingInterval:
    """Build and verify the absorbing interval of a unimodal map.

    Checks Gamma(J) within J and Gamma^2([0, I / p_e]) within J on ``samples`` uniform
    points each, both up to 1e-10.

    Raises:
        UnimodalityNotCertified: If the map is not certified unimodal.
        InvarianceViolation: If a sampled point escapes J.
    """
    scan = critical_points(lam, params, grid_n, tol)
    if not scan.unimodal:
        msg = f"Map is not certified unimodal for lambda={lam!r}: {scan.reason}"
        raise UnimodalityNotCertified(msg)

    E_c = scan.maxima[0].E
    E_max = gamma(E_c, lam, params, tol)
    E_min = gamma(E_max, lam, params, tol)
    interval = AbsorbingInterval(E_c=E_c, E_min=E_min, E_max=E_max)

    for E in np.linspace(E_min, E_max, samples):
        image = gamma(E, lam, params, tol)
        if not interval.contains(image):
            msg = f"Gamma({E!r}) = {image!r} leaves J = [{E_min!r}, {E_max!r}]"
            raise InvarianceViolation(msg)
    for E in np.linspace(0.0, params.e_bar, samples):
        image = gamma(gamma(E, lam, params, tol), lam, params, tol)
        if not interval.contains(image):
            msg = f"Gamma^2({E!r}) = {image!r} leaves J = [{E_min!r}, {E_max!r}]"
            raise InvarianceViolation(msg)

    logger.info("Absorbing interval for lambda=%r: [%.12g, %.12g], E_c=%.12g", lam, E_min, E_max, E_c)
    return interval


class ComparativeStatics(NamedTuple):
    """Response of a stable fixed point to the premium sensitivity kappa.

    Attributes:
        E_star: The fixed point.
        gamma_E: Slope of the map at E*.
        gamma_kappa: Partial of Gamma in kappa at E*, by central difference in kappa.
        gamma_kappa_via_premium: The same partial computed as -E* times the partial in pi_bar.
        dE_dkappa: gamma_kappa / (1 - gamma_E).
        log10_abs_dE_dkappa: log10 |dE*/dkappa| from the closed-form partial, finite when
            ``dE_dkappa`` underflows to 0 and ``-inf`` when kappa has no effect.
        error: Error estimate carried into dE_dkappa.
        regime: Premium regime at E*.
    """

    E_star: float
    gamma_E: float
    gamma_kappa: float
    gamma_kappa_via_premium: float
    dE_dkappa: float
    log10_abs_dE_dkappa: float
    error: float
    regime: Regime


def log_abs_gamma_kappa(E: float, lam: float, params: ModelParams, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Natural log of |Gamma_kappa| at an interior enrolment level, evaluated without exponentiating.

    Only alpha_F and alpha_P depend on kappa, through Pi = pi_bar - kappa E, so
    ds_i / dkappa = -E r_i exp(-a_i) beta_i / (alpha_i + beta_i)^2 with r_F = rho_pi,
    a_F = rho E + rho_pi Pi, r_P = sigma_pi and a_P = sigma E + sigma_pi Pi. Both terms are
    non-positive, so the logs add through logsumexp.

    Returns:
        The log magnitude, ``-inf`` when Gamma_kappa vanishes exactly.
    """
    lam = check_follower_share(lam)
    E = check_enrolment(E, params, tol)
    premium = wage_premium(E, params, tol).value
    weights = preference_weights(E, params, tol)

    def log_term(share: float, reactivity: float, exponent: float, alpha: float, beta: float) -> float:
        if share == 0 or reactivity == 0 or E == 0 or beta == 0:
            return -math.inf
        return math.log(share * E * reactivity) - exponent + math.log(beta) - 2 * math.log(alpha + beta)

    terms = [
        log_term(
            lam,
            params.rho_pi,
            params.rho * E + params.rho_pi * premium,
            weights.alpha_F,
            weights.beta_F,
        ),
        log_term(
            1 - lam,
            params.sigma_premium,
            params.sigma * E + params.sigma_premium * premium,
            weights.alpha_P,
            weights.beta_P,
        ),
    ]
    if max(terms) == -math.inf:
        return -math.inf
    return math.log(params.e_bar) + float(logsumexp(terms))


def comparative_statics_kappa(
    E_star: float,
    lam: float,
    params: ModelParams,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ComparativeStatics:
    """Implicit-function derivative dE*/dkappa = Gamma_kappa / (1 - Gamma_E) at a stable fixed point.

    In the saturated regime the premium does not depend on kappa and the result is 0.
    With a large premium exp(-sigma_pi Pi) underflows and ``dE_dkappa`` comes out as 0;
    ``log10_abs_dE_dkappa`` still carries its magnitude.

    Raises:
        NotStable: If |Gamma_E(E*)| >= 1.
        KinkProximity: If E* sits at the premium kink.
        PropositionViolation: If dE*/dkappa is positive beyond its error estimate.
    """
    lam = check_follower_share(lam)
    slope = gamma_prime(E_star, lam, params, tol)
    if abs(slope.value) >= 1.0 - NONHYPERBOLIC_BAND:
        msg = f"Fixed point E*={E_star!r} is not stable (Gamma_E={slope.value!r})"
        raise NotStable(msg)

    regime = premium_regime(E_star, params, tol)
    if regime is Regime.KINK:
        msg = f"Fixed point E*={E_star!r} sits at the premium kink"
        raise KinkProximity(msg)
    if regime is Regime.SATURATED:
        logger.info("Premium saturated at E*=%r, kappa has no effect", E_star)
        return ComparativeStatics(E_star, slope.value, 0.0, 0.0, 0.0, -math.inf, 0.0, regime)

    by_kappa = bounded_difference(
        lambda kappa: gamma(E_star, lam, params.with_value("kappa", kappa), tol),
        params.kappa,
        0.0,
        math.inf,
        tol.fd_rel_step,
    )
    by_premium = bounded_difference(
        lambda pi_bar: gamma(E_star, lam, params.with_value("pi_bar", pi_bar), tol),
        params.pi_bar,
        0.0,
        math.inf,
        tol.fd_rel_step,
    )
    via_premium = -E_star * by_premium.value
    if not math.isclose(by_kappa.value, via_premium, rel_tol=1e-4, abs_tol=by_kappa.error + E_star * by_premium.error):
        logger.warning("Gamma_kappa estimates disagree: %r vs %r", by_kappa.value, via_premium)

    denominator = 1.0 - slope.value
    value = by_kappa.value / denominator
    error = by_kappa.error / denominator
    log10_abs = (log_abs_gamma_kappa(E_star, lam, params, tol) - math.log(denominator)) / math.log(10)
    if value - error > 0:
        msg = f"dE*/dkappa = {value!r} is positive at E*={E_star!r}"
        raise PropositionViolation(msg)
    if value == 0:
        logger.warning("dE*/dkappa underflows to 0 at E*=%r (log10 magnitude %.6g)", E_star, log10_abs)
    return ComparativeStatics(E_star, slope.value, by_kappa.value, via_premium, value, log10_abs, error, regime)
