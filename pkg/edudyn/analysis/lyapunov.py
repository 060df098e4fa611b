"""Largest Lyapunov exponents of the enrolment maps."""

from __future__ import annotations

import logging
import math
import sys
from typing import TYPE_CHECKING, Final, NamedTuple

import numpy as np

from edudyn.exceptions import DerivativeMismatch, KinkProximity, ShareAtBoundary
from edudyn.model.core import DEFAULT_TOLERANCES
from edudyn.model.map_1d import gamma, gamma_iterate, gamma_prime
from edudyn.model.map_2d import State2D, jacobian_2d, jacobian_2d_numeric, phi

if TYPE_CHECKING:
    from edudyn.model.core import ModelParams, Tolerances

logger = logging.getLogger("edudyn")

DEFAULT_LYAPUNOV_STEPS: Final = 10_000
DEFAULT_BURN_IN: Final = 2000
RENORMALIZE_EVERY: Final = 10
LOG_FLOOR: Final = sys.float_info.min


class LyapunovEstimate(NamedTuple):
    """Average log growth rate along an orbit.

    Attributes:
        exponent: Largest Lyapunov exponent estimate.
        steps: Number of averaged steps.
        fallback_count: Steps whose derivative came from finite differences.
    """

    exponent: float
    steps: int
    fallback_count: int


def _check_counts(n: int, burn_in: int) -> None:
    if n < 1 or burn_in < 0:
        msg = f"Invalid Lyapunov step counts n={n}, burn_in={burn_in}"
        raise ValueError(msg)
    if n < DEFAULT_LYAPUNOV_STEPS:
        logger.debug("Lyapunov estimate over %d steps, below the recommended %d", n, DEFAULT_LYAPUNOV_STEPS)


def lyapunov_1d(
    E0: float,
    lam: float,
    params: ModelParams,
    n: int = DEFAULT_LYAPUNOV_STEPS,
    burn_in: int = DEFAULT_BURN_IN,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> LyapunovEstimate:
    """Exponent (1 / n) sum ln|Gamma'(E_t)| after ``burn_in`` transient steps.

    Slopes of exactly zero are floored at the smallest positive double.
    """
    _check_counts(n, burn_in)
    E = gamma_iterate(E0, lam, params, burn_in, tol)
    total = 0.0
    fallbacks = 0
    for _ in range(n):
        slope = gamma_prime(E, lam, params, tol)
        fallbacks += not slope.analytic
        total += math.log(max(abs(slope.value), LOG_FLOOR))
        E = gamma(E, lam, params, tol)
    return LyapunovEstimate(exponent=total / n, steps=n, fallback_count=fallbacks)


def lyapunov_2d(
    state0: State2D,
    params: ModelParams,
    mu: float,
    n: int = DEFAULT_LYAPUNOV_STEPS,
    burn_in: int = DEFAULT_BURN_IN,
    tol: Tolerances = DEFAULT_TOLERANCES,
    renormalize_every: int = RENORMALIZE_EVERY,
) -> LyapunovEstimate:
    """Average log growth of a tangent vector pushed through the Jacobian products.

    The tangent vector starts at (1, 0) and is renormalized every ``renormalize_every`` steps.
    """
    _check_counts(n, burn_in)
    state = state0
    for _ in range(burn_in):
        state = phi(state, params, mu, tol)

    vector = np.array([1.0, 0.0])
    total = 0.0
    fallbacks = 0
    for step in range(1, n + 1):
        try:
            jacobian = jacobian_2d(state, params, mu, tol)
        except (KinkProximity, ShareAtBoundary, DerivativeMismatch):
            jacobian = jacobian_2d_numeric(state, params, mu, tol)
            fallbacks += 1
        vector = jacobian.as_matrix() @ vector
        state = phi(state, params, mu, tol)
        if step % renormalize_every == 0 or step == n:
            norm = float(np.linalg.norm(vector))
            if norm == 0 or not math.isfinite(norm):
                total += math.log(LOG_FLOOR) if norm == 0 else math.log(sys.float_info.max)
                vector = np.array([1.0, 0.0])
            else:
                total += math.log(norm)
                vector /= norm
    return LyapunovEstimate(exponent=total / n, steps=n, fallback_count=fallbacks)
