"""Two-dimensional map with an endogenous follower share.

Phi(E, lambda) = (Gamma(E; lambda), V(E)) where V(E) = expit(mu (U_F(E) - U_P(E))) is the
logit share of agents who choose to behave as followers next period. The
Jacobian has the form [[Gamma_E, Gamma_lambda], [V_E, 0]], so its trace is Gamma_E
and its determinant is -Gamma_lambda V_E. Local stability follows from the Schur
conditions on these two numbers.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Final, NamedTuple

import numpy as np
from scipy.special import expit

from edudyn.exceptions import (
    DegenerateWeights,
    DomainError,
    EdudynError,
    GStarNotBelowOne,
    HStarZero,
    KinkProximity,
    NotAFixedPoint,
    ParameterError,
    ShareAtBoundary,
)
from edudyn.model.core import (
    DEFAULT_TOLERANCES,
    bounded_difference,
    check_enrolment,
    indirect_utility,
    preference_weights,
    shares_derivative_E,
    utility_derivative_E,
    weight_derivatives,
)
from edudyn.model.map_1d import (
    Trajectory,
    check_follower_share,
    gamma,
    gamma_lambda,
    scan_roots,
)

if TYPE_CHECKING:
    from edudyn.model.core import ModelParams, Tolerances

logger = logging.getLogger("edudyn")

FIXED_POINT_TOL: Final = 1e-10
SCHUR_MARGIN: Final = 1e-10
H_STAR_FLOOR: Final = 1e-14
DEFAULT_ROOT_GRID_2D: Final = 400
MIN_ROOT_GRID_2D: Final = 200
DEFAULT_SHARE_GRID: Final = 1000
IMAGE_PASSES: Final = 3


@dataclass(frozen=True)
class State2D:
    """State of the two-dimensional map: enrolment and follower share."""

    E: float
    lam: float

    def __post_init__(self) -> None:
        """Validate that both coordinates are finite."""
        if not (math.isfinite(self.E) and math.isfinite(self.lam)):
            msg = f"State ({self.E!r}, {self.lam!r}) is not finite"
            raise DomainError(msg)
        check_follower_share(self.lam)
        object.__setattr__(self, "E", float(self.E))
        object.__setattr__(self, "lam", float(self.lam))


@dataclass(frozen=True)
class Trajectory2D(Trajectory):
    """Orbit of the two-dimensional map, ``states[:, 0]`` holding E and ``states[:, 1]`` lambda."""

    @property
    def enrolment(self) -> np.ndarray:
        """Enrolment column of the post-burn-in window."""
        return self.tail[:, 0]

    @property
    def follower_share(self) -> np.ndarray:
        """Follower-share column of the post-burn-in window."""
        return self.tail[:, 1]


def _check_mu(mu: float) -> float:
    if not math.isfinite(mu) or mu < 0:
        msg = f"Switching intensity 'mu' must be finite and >= 0, got {mu!r}"
        raise ParameterError("mu", msg)
    return float(mu)


def switch_share(E: float, params: ModelParams, mu: float, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Logit follower share V(E) = 1 / (1 + exp(-mu (U_F - U_P)))."""
    mu = _check_mu(mu)
    if mu == 0:
        check_enrolment(E, params, tol)
        return 0.5
    utility = indirect_utility(E, params, tol)
    return float(expit(mu * (utility.u_F - utility.u_P)))


def phi(state: State2D, params: ModelParams, mu: float, tol: Tolerances = DEFAULT_TOLERANCES) -> State2D:
    """One step of the two-dimensional map."""
    return State2D(gamma(state.E, state.lam, params, tol), switch_share(state.E, params, mu, tol))


def iterate_2d(
    state0: State2D,
    params: ModelParams,
    mu: float,
    n_steps: int,
    burn_in: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Trajectory2D:
    """Iterate the two-dimensional map for ``burn_in + n_steps`` steps.

    States stay in [0, I / p_e] x [0, 1].
    """
    if n_steps < 1 or burn_in < 0:
        msg = f"Invalid iteration counts n_steps={n_steps}, burn_in={burn_in}"
        raise ValueError(msg)
    mu = _check_mu(mu)
    states = np.empty((burn_in + n_steps + 1, 2))
    state = State2D(check_enrolment(state0.E, params, tol), state0.lam)
    states[0] = (state.E, state.lam)
    for t in range(burn_in + n_steps):
        state = phi(state, params, mu, tol)
        states[t + 1] = (state.E, state.lam)
    return Trajectory2D(states=states, burn_in=burn_in, n_steps=n_steps)


@dataclass(frozen=True)
class Jacobian2D:
    """Jacobian [[Gamma_E, Gamma_lambda], [V_E, 0]] of the two-dimensional map."""

    gamma_E: float
    gamma_lambda: float
    v_E: float
    analytic: bool = True

    @property
    def trace(self) -> float:
        """Trace, equal to Gamma_E."""
        return self.gamma_E

    @property
    def det(self) -> float:
        """Determinant, -Gamma_lambda V_E."""
        return -self.gamma_lambda * self.v_E

    def as_matrix(self) -> np.ndarray:
        """The Jacobian as a 2x2 array."""
        return np.array([[self.gamma_E, self.gamma_lambda], [self.v_E, 0.0]])


def jacobian_2d(state: State2D, params: ModelParams, mu: float, tol: Tolerances = DEFAULT_TOLERANCES) -> Jacobian2D:
    """Analytic Jacobian of the two-dimensional map.

    Raises:
        KinkProximity: Near the premium kink.
        ShareAtBoundary: If mu > 0 and a share is numerically 0 or 1.
    """
    mu = _check_mu(mu)
    slopes = shares_derivative_E(state.E, params, tol)
    gamma_E = params.e_bar * (state.lam * slopes.ds_F + (1 - state.lam) * slopes.ds_P)
    v_E = 0.0
    if mu > 0:
        utility_slopes = utility_derivative_E(state.E, params, tol)
        share = switch_share(state.E, params, mu, tol)
        v_E = mu * share * (1 - share) * (utility_slopes.dU_F - utility_slopes.dU_P)
    return Jacobian2D(gamma_E=gamma_E, gamma_lambda=gamma_lambda(state.E, params, tol), v_E=v_E)


def jacobian_2d_numeric(
    state: State2D,
    params: ModelParams,
    mu: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Jacobian2D:
    """Jacobian with finite-difference E-slopes, used as an oracle and near kinks or boundary shares."""
    mu = _check_mu(mu)
    E = check_enrolment(state.E, params, tol)
    gamma_E = bounded_difference(lambda x: gamma(x, state.lam, params, tol), E, 0.0, params.e_bar, tol.fd_rel_step)
    v_E = 0.0
    if mu > 0:
        v_E = bounded_difference(
            lambda x: switch_share(x, params, mu, tol),
            E,
            0.0,
            params.e_bar,
            tol.fd_rel_step,
        ).value
    return Jacobian2D(
        gamma_E=gamma_E.value,
        gamma_lambda=gamma_lambda(E, params, tol),
        v_E=v_E,
        analytic=False,
    )


class SchurConditions(NamedTuple):
    """Schur quantities 1 - tau + Delta, 1 + tau + Delta and 1 - Delta."""

    schur_1: float
    schur_2: float
    schur_3: float

    @property
    def stable(self) -> bool:
        """Whether all three quantities are positive beyond the 1e-10 margin."""
        return min(self) > SCHUR_MARGIN


def schur_conditions(jacobian: Jacobian2D) -> SchurConditions:
    """Evaluate the Schur stability conditions for a 2x2 Jacobian."""
    tau, delta = jacobian.trace, jacobian.det
    return SchurConditions(1 - tau + delta, 1 + tau + delta, 1 - delta)


def spectral_radius(jacobian: Jacobian2D) -> float:
    """Largest eigenvalue modulus of the Jacobian."""
    return float(np.max(np.abs(np.linalg.eigvals(jacobian.as_matrix()))))


class Bifurcation(str, Enum):
    """Codimension-one boundary closest to a fixed point."""

    SADDLE_NODE = "saddle-node"
    FLIP = "flip"
    NEIMARK_SACKER = "neimark-sacker"
    NONE = "none"


def nearest_bifurcation(jacobian: Jacobian2D) -> tuple[Bifurcation, float]:
    """Boundary whose Schur residual is smallest in magnitude.

    The Neimark-Sacker boundary only counts while -2 < Gamma_E < 2. When every
    residual is at least 1 the point is reported as far from all boundaries.
    """
    conditions = schur_conditions(jacobian)
    candidates = [(Bifurcation.SADDLE_NODE, abs(conditions.schur_1)), (Bifurcation.FLIP, abs(conditions.schur_2))]
    if -2 < jacobian.gamma_E < 2:  # noqa: PLR2004
        candidates.append((Bifurcation.NEIMARK_SACKER, abs(conditions.schur_3)))
    kind, residual = min(candidates, key=lambda item: item[1])
    if residual >= 1.0:
        return Bifurcation.NONE, residual
    return kind, residual


@dataclass(frozen=True)
class MuThreshold:
    """Switching-intensity threshold below which a fixed point stays stable.

    Attributes:
        at_point: (4 p_e / I)(1 - g*) / h* with g* = |Gamma_E(E*)| and h* = |U_F'(E*) - U_P'(E*)|.
        conservative: The same bound with g* and h* replaced by their overestimates.
        g_star: |Gamma_E| at the fixed point.
        h_star: Utility-slope gap at the fixed point.
        g_hat: Overestimate of g*, (I / p_e) max(|s_F'|, |s_P'|).
        h_hat: Overestimate of h* from the weight slopes and the share ranges over the region.
        region: Enrolment interval holding E*, over which the share ranges are taken.
    """

    at_point: float
    conservative: float
    g_star: float
    h_star: float
    g_hat: float
    h_hat: float
    region: tuple[float, float]


def enrolment_region(
    lam: float,
    params: ModelParams,
    grid_n: int = DEFAULT_SHARE_GRID,
    passes: int = IMAGE_PASSES,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[float, float]:
    """Hull of the iterated image Gamma^n([0, I / p_e]; lambda), sampled on a grid.

    Every fixed point of Gamma(.; lambda) lies in each iterated image of the domain.
    The image of the domain stays clear of E = 0 and E = I / p_e whenever both types
    keep some education and some consumption, so shares taken over it are bounded
    away from 0 and 1.
    """
    lam = check_follower_share(lam)
    lo, hi = 0.0, params.e_bar
    for _ in range(passes):
        images = [gamma(float(E), lam, params, tol) for E in np.linspace(lo, hi, grid_n)]
        lo, hi = min(images), max(images)
    return lo, hi


def _share_ranges(
    state: State2D,
    region: tuple[float, float],
    params: ModelParams,
    grid_n: int,
    tol: Tolerances,
) -> np.ndarray:
    """Min and max of s_i and 1 - s_i for both types over the region and the fixed point.

    Returns:
        Array of shape (2, 4) with rows (min, max) and columns (s_F, 1 - s_F, s_P, 1 - s_P).
    """
    rows = []
    for E in (*np.linspace(*region, grid_n), state.E):
        weights = preference_weights(float(E), params, tol)
        den_F = weights.alpha_F + weights.beta_F
        den_P = weights.alpha_P + weights.beta_P
        if min(den_F, den_P) <= tol.eps_den:
            msg = f"Preference weights vanish at E={float(E)!r}"
            raise DegenerateWeights(msg)
        rows.append((weights.alpha_F / den_F, weights.beta_F / den_F, weights.alpha_P / den_P, weights.beta_P / den_P))
    table = np.array(rows)
    return np.vstack([table.min(axis=0), table.max(axis=0)])


def mu_threshold(
    state_star: State2D,
    params: ModelParams,
    share_grid_n: int = DEFAULT_SHARE_GRID,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> MuThreshold:
    """Sufficient bound on mu for local stability of a fixed point of the two-dimensional map.

    The share ranges behind h_hat are taken over ``enrolment_region(lambda*)``, which
    holds E*. The conservative bound never exceeds the bound at the point and is 0
    when the overestimate of g* is not below one or a share range touches 0 or 1.

    Raises:
        GStarNotBelowOne: If |Gamma_E(E*)| >= 1.
        HStarZero: If the utility-slope gap vanishes, so every mu is admissible.
    """
    slopes = shares_derivative_E(state_star.E, params, tol)
    g_star = abs(params.e_bar * (state_star.lam * slopes.ds_F + (1 - state_star.lam) * slopes.ds_P))
    if g_star >= 1.0:
        msg = f"|Gamma_E| = {g_star!r} at E*={state_star.E!r} is not below one"
        raise GStarNotBelowOne(msg)

    utility_slopes = utility_derivative_E(state_star.E, params, tol)
    h_star = abs(utility_slopes.dU_F - utility_slopes.dU_P)
    if h_star <= H_STAR_FLOOR:
        msg = f"Utility slopes coincide at E*={state_star.E!r}; stability holds for every mu"
        raise HStarZero(msg)

    scale = 4 * params.price_education / params.income
    at_point = scale * (1 - g_star) / h_star

    g_hat = params.e_bar * max(abs(slopes.ds_F), abs(slopes.ds_P))
    region = enrolment_region(state_star.lam, params, share_grid_n, tol=tol)
    ranges = _share_ranges(state_star, region, params, share_grid_n, tol)
    weight_slopes = weight_derivatives(state_star.E, params, tol)
    log_e = math.log(params.e_bar)
    log_c = math.log(params.c_bar)

    def log_bound(level: float, column: int) -> float:
        low, high = ranges[0, column], ranges[1, column]
        if low <= 0:
            return math.inf
        return max(abs(level + math.log(low)), abs(level + math.log(high)))

    h_hat = (
        abs(weight_slopes.alpha_F) * log_bound(log_e, 0)
        + abs(weight_slopes.beta_F) * log_bound(log_c, 1)
        + abs(weight_slopes.alpha_P) * log_bound(log_e, 2)
        + abs(weight_slopes.beta_P) * log_bound(log_c, 3)
    )
    h_hat = max(h_hat, h_star)
    conservative = 0.0 if g_hat >= 1.0 or not math.isfinite(h_hat) else scale * (1 - g_hat) / h_hat
    return MuThreshold(
        at_point=at_point,
        conservative=min(conservative, at_point),
        g_star=g_star,
        h_star=h_star,
        g_hat=g_hat,
        h_hat=h_hat,
        region=region,
    )


@dataclass(frozen=True)
class StabilityReport:
    """Local stability analysis of a fixed point of the two-dimensional map.

    ``mu_threshold_at_point`` is ``inf`` when the utility-slope gap vanishes and ``None``
    when no threshold exists (|Gamma_E| >= 1) or the slopes are undefined.
    """

    state: State2D
    jacobian: Jacobian2D
    conditions: SchurConditions
    stable: bool
    spectral_radius: float
    nearest_bifurcation: Bifurcation
    bifurcation_residual: float
    mu_threshold_at_point: float | None
    mu_threshold_conservative: float | None


def fixed_point_residual(
    state: State2D,
    params: ModelParams,
    mu: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[float, float]:
    """Componentwise residual Phi(x) - x."""
    image = phi(state, params, mu, tol)
    return image.E - state.E, image.lam - state.lam


def schur_stability(
    state_star: State2D,
    params: ModelParams,
    mu: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
    residual_tol: float = FIXED_POINT_TOL,
    share_grid_n: int = DEFAULT_SHARE_GRID,
) -> StabilityReport:
    """Schur stability report of a fixed point of the two-dimensional map.

    Raises:
        NotAFixedPoint: If either residual component exceeds ``residual_tol``.
    """
    residual = fixed_point_residual(state_star, params, mu, tol)
    if max(abs(residual[0]), abs(residual[1])) > residual_tol:
        msg = f"State ({state_star.E!r}, {state_star.lam!r}) is not a fixed point, residual {residual!r}"
        raise NotAFixedPoint(msg)

    try:
        jacobian = jacobian_2d(state_star, params, mu, tol)
    except (KinkProximity, ShareAtBoundary):
        logger.warning("Analytic Jacobian unavailable at E*=%r, using finite differences", state_star.E)
        jacobian = jacobian_2d_numeric(state_star, params, mu, tol)

    conditions = schur_conditions(jacobian)
    kind, distance = nearest_bifurcation(jacobian)

    at_point: float | None = None
    conservative: float | None = None
    try:
        threshold = mu_threshold(state_star, params, share_grid_n, tol)
        at_point, conservative = threshold.at_point, threshold.conservative
    except HStarZero:
        at_point = conservative = math.inf
    except (GStarNotBelowOne, KinkProximity, ShareAtBoundary, DegenerateWeights) as err:
        logger.debug("No mu threshold at E*=%r: %s", state_star.E, err)

    return StabilityReport(
        state=state_star,
        jacobian=jacobian,
        conditions=conditions,
        stable=conditions.stable,
        spectral_radius=spectral_radius(jacobian),
        nearest_bifurcation=kind,
        bifurcation_residual=distance,
        mu_threshold_at_point=at_point,
        mu_threshold_conservative=conservative,
    )


@dataclass(frozen=True)
class FixedPoint2D:
    """Fixed point of the two-dimensional map with its stability report, or the error that prevented one."""

    state: State2D
    report: StabilityReport | None
    error: str | None = None


def fixed_points_2d(
    params: ModelParams,
    mu: float,
    grid_n: int = DEFAULT_ROOT_GRID_2D,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list[FixedPoint2D]:
    """Every fixed point of the two-dimensional map.

    A fixed point has lambda* = V(E*), so the search reduces to the roots of
    R(E) = Gamma(E; V(E)) - E on [0, I / p_e].
    """
    if grid_n < MIN_ROOT_GRID_2D:
        msg = f"Root scan needs at least {MIN_ROOT_GRID_2D} grid points, got {grid_n}"
        raise ValueError(msg)
    mu = _check_mu(mu)
    roots = scan_roots(
        lambda E: gamma(E, switch_share(E, params, mu, tol), params, tol) - E,
        0.0,
        params.e_bar,
        grid_n,
    )

    points = []
    for root in roots:
        state = State2D(root, switch_share(root, params, mu, tol))
        try:
            points.append(FixedPoint2D(state=state, report=schur_stability(state, params, mu, tol)))
        except EdudynError as err:
            logger.warning("Stability analysis failed at E*=%r: %s", root, err)
            points.append(FixedPoint2D(state=state, report=None, error=str(err)))
    return points
