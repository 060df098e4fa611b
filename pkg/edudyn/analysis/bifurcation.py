"""Bifurcation sweeps over one model parameter.

Each grid value is an independent cell: the map is iterated from the seed for
``burn_in`` steps, ``samples`` further states are recorded, and the cell gets a
Lyapunov exponent and a period verdict. Cells run on a thread or process pool
and are assembled in grid order, so the diagram does not depend on the number
of workers. With ``continuation`` the cells run in order, each seeded from the
last state of the previous one.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, ClassVar, Final, Literal

import numpy as np

from edudyn.exceptions import EdudynError, ParameterError
from edudyn.log_utils import configure_logger, log_memory_usage
from edudyn.model.core import DEFAULT_TOLERANCES, ModelParams, Tolerances
from edudyn.model.map_1d import iterate_1d
from edudyn.model.map_2d import State2D, iterate_2d

from .lyapunov import DEFAULT_LYAPUNOV_STEPS, lyapunov_1d, lyapunov_2d
from .orbits import DEFAULT_MAX_PERIOD, DEFAULT_PERIOD_TOL, period_detect

if TYPE_CHECKING:
    from collections.abc import Callable

logger = logging.getLogger("edudyn")

THREADS_ENV: Final = "EDUDYN_THREADS"
MIN_GRID_POINTS: Final = 100
SWEEPABLE: Final = ("rho", "rho_pi", "sigma", "sigma_pi", "kappa", "lambda", "mu", "pi_bar")


@dataclass(frozen=True)
class SweepSpec:
    """Everything a sweep needs, immutable and picklable.

    Attributes:
        parameter: Swept parameter, one of ``SWEEPABLE``.
        lo: First grid value.
        hi: Last grid value.
        system: ``"1d"`` for the map with fixed lambda, ``"2d"`` for the map with switching.
        params: Base model parameters.
        lam: Follower share of the one-dimensional map.
        mu: Switching intensity of the two-dimensional map.
        grid_points: Number of grid values (at least 100).
        burn_in: Transient steps discarded per cell.
        samples: States recorded per cell.
        lyapunov_steps: Steps averaged by the Lyapunov estimate.
        seed_E: Initial enrolment.
        seed_lambda: Initial follower share of the two-dimensional map.
        continuation: Seed each cell from the previous cell's last state.
        max_period: Largest period tested.
        period_tol: Tolerance of the period test.
        tol: Numerical tolerances.
    """

    UNITS: ClassVar[dict[str, str]] = {"lambda": "population share", "mu": "logit intensity"}

    parameter: str
    lo: float
    hi: float
    system: Literal["1d", "2d"] = "1d"
    params: ModelParams = field(default_factory=ModelParams)
    lam: float = 0.5
    mu: float = 0.0
    grid_points: int = 1000
    burn_in: int = 2000
    samples: int = 300
    lyapunov_steps: int = DEFAULT_LYAPUNOV_STEPS
    seed_E: float = 0.3
    seed_lambda: float = 0.5
    continuation: bool = False
    max_period: int = DEFAULT_MAX_PERIOD
    period_tol: float = DEFAULT_PERIOD_TOL
    tol: Tolerances = DEFAULT_TOLERANCES

    def __post_init__(self) -> None:
        """Validate the sweep settings."""
        if self.parameter not in SWEEPABLE:
            msg = f"Cannot sweep '{self.parameter}', expected one of {', '.join(SWEEPABLE)}"
            raise ParameterError("sweep.parameter", msg)
        if self.system not in ("1d", "2d"):
            msg = f"Unknown system '{self.system}', expected '1d' or '2d'"
            raise ParameterError("run.system", msg)
        if self.grid_points < MIN_GRID_POINTS:
            msg = f"A sweep needs at least {MIN_GRID_POINTS} grid points, got {self.grid_points}"
            raise ParameterError("sweep.grid_points", msg)
        if not self.lo <= self.hi:
            msg = f"Sweep range [{self.lo}, {self.hi}] is empty"
            raise ParameterError("sweep.lo", msg)
        if self.samples < 4 * self.max_period:
            msg = f"Period detection up to {self.max_period} needs at least {4 * self.max_period} samples"
            raise ParameterError("run.samples", msg)

    @property
    def unit(self) -> str:
        """Unit of the swept parameter."""
        return self.UNITS.get(self.parameter, "dimensionless")

    def grid(self) -> np.ndarray:
        """Ordered grid of parameter values."""
        return np.linspace(self.lo, self.hi, self.grid_points)


@dataclass(frozen=True)
class SweepCell:
    """Result of one grid value.

    Attributes:
        value: Parameter value.
        samples: Recorded states, shape (samples,) or (samples, 2). Empty on error.
        lyapunov: Largest Lyapunov exponent (nan on error).
        period: Detected period, ``None`` when aperiodic.
        fallback_count: Lyapunov steps that used finite-difference derivatives.
        error: Error message when the cell failed.
    """

    value: float
    samples: np.ndarray
    lyapunov: float
    period: int | None
    fallback_count: int = 0
    error: str | None = None

    @property
    def failed(self) -> bool:
        """Whether the cell recorded an error."""
        return self.error is not None


@dataclass(frozen=True)
class BifurcationDiagram:
    """Cells of a sweep in grid order."""

    parameter: str
    unit: str
    system: Literal["1d", "2d"]
    cells: list[SweepCell]

    @property
    def grid(self) -> np.ndarray:
        """Parameter values in grid order."""
        return np.array([cell.value for cell in self.cells])

    @property
    def periods(self) -> list[int | None]:
        """Detected period per cell."""
        return [cell.period for cell in self.cells]

    @property
    def lyapunov(self) -> np.ndarray:
        """Lyapunov exponent per cell."""
        return np.array([cell.lyapunov for cell in self.cells])


def _cell_inputs(spec: SweepSpec, value: float) -> tuple[ModelParams, float, float, State2D]:
    """Model parameters, lambda, mu and seed for one grid value."""
    params, lam, mu = spec.params, spec.lam, spec.mu
    seed = State2D(spec.seed_E, spec.seed_lambda)
    if spec.parameter == "lambda":
        lam = value
        seed = State2D(spec.seed_E, value)
    elif spec.parameter == "mu":
        mu = value
    else:
        params = params.with_value(spec.parameter, value)
    return params, lam, mu, seed


def run_cell(spec: SweepSpec, value: float, seed: State2D | None = None) -> SweepCell:
    """Compute one sweep cell. Errors are stored in the cell instead of raised."""
    value = float(value)
    try:
        params, lam, mu, default_seed = _cell_inputs(spec, value)
        seed = seed or default_seed
        if spec.system == "1d":
            trajectory = iterate_1d(seed.E, lam, params, spec.samples, spec.burn_in, spec.tol)
            tail = trajectory.tail
            estimate = lyapunov_1d(tail[-1], lam, params, spec.lyapunov_steps, burn_in=0, tol=spec.tol)
        else:
            trajectory = iterate_2d(seed, params, mu, spec.samples, spec.burn_in, spec.tol)
            tail = trajectory.tail
            last = State2D(tail[-1, 0], tail[-1, 1])
            estimate = lyapunov_2d(last, params, mu, spec.lyapunov_steps, burn_in=0, tol=spec.tol)
        period = period_detect(tail, spec.max_period, spec.period_tol)
    except EdudynError as err:
        logger.warning("Sweep cell %s=%r failed: %s", spec.parameter, value, err)
        return SweepCell(value=value, samples=np.empty(0), lyapunov=float("nan"), period=None, error=str(err))
    return SweepCell(
        value=value,
        samples=tail,
        lyapunov=estimate.exponent,
        period=period,
        fallback_count=estimate.fallback_count,
    )


def sweep_workers() -> int:
    """Worker count from ``EDUDYN_THREADS``, defaulting to every core."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or not raw.strip():
        return os.cpu_count() or 1
    try:
        workers = int(raw)
    except ValueError:
        msg = f"{THREADS_ENV} must be a positive integer, got {raw!r}"
        raise ParameterError(THREADS_ENV, msg) from None
    if workers < 1:
        msg = f"{THREADS_ENV} must be a positive integer, got {raw!r}"
        raise ParameterError(THREADS_ENV, msg)
    return workers


def _run_continuation(spec: SweepSpec, grid: np.ndarray) -> list[SweepCell]:
    cells = []
    seed: State2D | None = None
    for value in grid:
        cell = run_cell(spec, value, seed)
        cells.append(cell)
        if not cell.failed:
            last = cell.samples[-1]
            seed = State2D(float(last), spec.seed_lambda) if spec.system == "1d" else State2D(last[0], last[1])
            if spec.parameter == "lambda":
                seed = replace(seed, lam=float(value))
    return cells


def bifurcation_sweep(
    spec: SweepSpec,
    max_workers: int | None = None,
    mode: Literal["thread", "process"] = "process",
    progress: Callable[[int, int], None] | None = None,
) -> BifurcationDiagram:
    """Run a bifurcation sweep.

    Args:
        spec: Sweep definition.
        max_workers: Pool size. Defaults to ``EDUDYN_THREADS`` or the core count.
            A single worker runs in the calling thread.
        mode: "thread" for `ThreadPoolExecutor`, "process" for `ProcessPoolExecutor`.
        progress: Optional callback receiving (finished cells, total cells).

    Returns:
        The diagram with cells in grid order.
    """
    grid = spec.grid()
    workers = max_workers or sweep_workers()
    logger.info(
        "Sweeping %s over [%r, %r] with %d cells (%s map, %d workers)",
        spec.parameter,
        spec.lo,
        spec.hi,
        len(grid),
        spec.system,
        1 if spec.continuation else workers,
    )

    if spec.continuation or workers == 1:
        cells = _run_continuation(spec, grid) if spec.continuation else [run_cell(spec, value) for value in grid]
    else:
        ordered: list[SweepCell | None] = [None] * len(grid)
        if mode == "thread":
            executor: Executor = ThreadPoolExecutor(max_workers=workers)
        else:
            # Worker processes tag their log lines with the process id
            executor = ProcessPoolExecutor(max_workers=workers, initializer=configure_logger, initargs=("edudyn", mode))
        with executor:
            futures_index = {executor.submit(run_cell, spec, value): index for index, value in enumerate(grid)}
            for finished, future in enumerate(as_completed(futures_index), start=1):
                ordered[futures_index[future]] = future.result()
                if progress is not None:
                    progress(finished, len(grid))
            log_memory_usage()
        cells = [cell for cell in ordered if cell is not None]

    failures = sum(cell.failed for cell in cells)
    if failures:
        logger.warning("%d of %d sweep cells failed", failures, len(cells))
    return BifurcationDiagram(parameter=spec.parameter, unit=spec.unit, system=spec.system, cells=cells)


def first_transition(
    diagram: BifurcationDiagram,
    from_period: int | None = 1,
    to_period: int | None = 2,
) -> float | None:
    """Parameter value of the first cell whose period moves from ``from_period`` to ``to_period``.

    Failed cells, and cells whose period is neither of the two, are skipped when looking for the
    previous period, so a slowly converging cell right at the bifurcation does not hide it.
    ``None`` stands for aperiodic.

    Returns:
        The value of the first cell with ``to_period`` that follows a cell with ``from_period``,
        or ``None`` when no such transition exists.
    """
    previous: SweepCell | None = None
    for cell in diagram.cells:
        if cell.failed or cell.period not in (from_period, to_period):
            continue
        if previous is not None and previous.period == from_period and cell.period == to_period:
            return cell.value
        previous = cell
    return None
