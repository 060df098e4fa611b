"""Orbit diagnostics: period detection, attractor bounds and cobweb paths."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Final

import numpy as np

from edudyn.model.core import DEFAULT_TOLERANCES, check_enrolment
from edudyn.model.map_1d import check_follower_share, gamma

if TYPE_CHECKING:
    from collections.abc import Sequence

    from edudyn.model.core import ModelParams, Tolerances

DEFAULT_MAX_PERIOD: Final = 64
DEFAULT_PERIOD_TOL: Final = 1e-8
DEFAULT_CURVE_GRID: Final = 1000


def _as_columns(tail: Sequence[float] | np.ndarray) -> np.ndarray:
    array = np.asarray(tail, dtype=float)
    return array[:, np.newaxis] if array.ndim == 1 else array


def period_detect(
    tail: Sequence[float] | np.ndarray,
    max_period: int = DEFAULT_MAX_PERIOD,
    tol: float = DEFAULT_PERIOD_TOL,
) -> int | None:
    """Smallest period p <= max_period whose lag-p differences over the tail are all within tol.

    Args:
        tail: Post-burn-in states, one row per step (one column per state variable).
        max_period: Largest period tested.
        tol: Componentwise tolerance on |x_{t+p} - x_t|.

    Returns:
        The period, or ``None`` for an aperiodic tail.

    Raises:
        ValueError: If the tail holds fewer than 4 * max_period states.
    """
    states = _as_columns(tail)
    if len(states) < 4 * max_period:
        msg = f"Period detection up to {max_period} needs at least {4 * max_period} states, got {len(states)}"
        raise ValueError(msg)
    for period in range(1, max_period + 1):
        if np.all(np.abs(states[period:] - states[:-period]) <= tol):
            return period
    return None


@dataclass(frozen=True)
class AttractorBounds:
    """Coordinatewise extrema of an orbit tail."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    @property
    def width(self) -> tuple[float, ...]:
        """Upper minus lower bound per coordinate."""
        return tuple(high - low for low, high in zip(self.lower, self.upper))


def attractor_bounds(tail: Sequence[float] | np.ndarray) -> AttractorBounds:
    """Bounds [min, max] of every state coordinate over the tail.

    Raises:
        ValueError: If the tail is empty.
    """
    states = _as_columns(tail)
    if states.size == 0:
        msg = "Cannot bound an empty orbit tail"
        raise ValueError(msg)
    return AttractorBounds(
        lower=tuple(float(value) for value in states.min(axis=0)),
        upper=tuple(float(value) for value in states.max(axis=0)),
    )


@dataclass(frozen=True)
class CobwebPath:
    """Plot-ready cobweb diagram.

    Attributes:
        curve: Array of shape (curve_grid_n, 2) sampling (E, Gamma(E)) over the domain.
        staircase: Array of shape (2 n_steps + 1, 2) tracing
            (E_t, E_t) -> (E_t, E_{t+1}) -> (E_{t+1}, E_{t+1}).
    """

    curve: np.ndarray
    staircase: np.ndarray


def cobweb(
    E0: float,
    lam: float,
    params: ModelParams,
    n_steps: int,
    curve_grid_n: int = DEFAULT_CURVE_GRID,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> CobwebPath:
    """Cobweb construction for ``n_steps`` iterations of the one-dimensional map."""
    if n_steps < 0 or curve_grid_n < 2:  # noqa: PLR2004
        msg = f"Invalid cobweb sizes n_steps={n_steps}, curve_grid_n={curve_grid_n}"
        raise ValueError(msg)
    lam = check_follower_share(lam)
    grid = np.linspace(0.0, params.e_bar, curve_grid_n)
    curve = np.column_stack([grid, [gamma(E, lam, params, tol) for E in grid]])

    E = check_enrolment(E0, params, tol)
    points = [(E, E)]
    for _ in range(n_steps):
        image = gamma(E, lam, params, tol)
        points.extend([(E, image), (image, image)])
        E = image
    return CobwebPath(curve=curve, staircase=np.array(points))
