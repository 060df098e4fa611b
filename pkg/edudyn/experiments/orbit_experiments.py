"""Time series and cobweb experiments."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, ClassVar

import numpy as np
import pandas as pd

from edudyn.analysis import attractor_bounds, cobweb, period_detect
from edudyn.model import State2D, iterate_1d, iterate_2d

from .base_experiment import BaseExperiment

if TYPE_CHECKING:
    from pathlib import Path

logger = logging.getLogger("edudyn")


class SimulateExperiment(BaseExperiment):
    """Orbit of the one- or two-dimensional map after the burn-in."""

    EXPERIMENT_NAME: ClassVar[str] = "simulate"

    def execute(self) -> list[Path]:
        """Iterate the map and write ``simulate.csv``."""
        config = self.config
        run = config.run
        if run.system == "1d":
            trajectory = iterate_1d(run.seed_E, config.mix.lam, config.model, run.steps, run.burn_in, config.tolerances)
            columns = {"E": trajectory.tail}
        else:
            trajectory = iterate_2d(
                State2D(run.seed_E, run.seed_lambda),
                config.model,
                config.mix.mu,
                run.steps,
                run.burn_in,
                config.tolerances,
            )
            columns = {"E": trajectory.tail[:, 0], "lambda": trajectory.tail[:, 1]}

        bounds = attractor_bounds(trajectory.tail)
        logger.info("Attractor bounds: lower %s, upper %s", bounds.lower, bounds.upper)
        if len(trajectory.tail) >= 4 * run.max_period:
            period = period_detect(trajectory.tail, run.max_period, run.period_tol)
            logger.info("Detected period: %s", "aperiodic" if period is None else period)

        frame = pd.DataFrame({"t": np.arange(run.burn_in + 1, run.burn_in + run.steps + 1), **columns})
        return [self.write("simulate.csv", frame, f"simulate-{run.system}")]


class CobwebExperiment(BaseExperiment):
    """Cobweb diagram of the one-dimensional map."""

    EXPERIMENT_NAME: ClassVar[str] = "cobweb"

    def execute(self) -> list[Path]:
        """Write the map curve to ``cobweb_curve.csv`` and the staircase to ``cobweb_staircase.csv``."""
        config = self.config
        path = cobweb(
            config.run.seed_E,
            config.mix.lam,
            config.model,
            config.run.steps,
            config.run.curve_grid_n,
            config.tolerances,
        )
        curve = pd.DataFrame({"E": path.curve[:, 0], "gamma_E": path.curve[:, 1]})
        staircase = pd.DataFrame(
            {"seq": np.arange(len(path.staircase)), "x": path.staircase[:, 0], "y": path.staircase[:, 1]},
        )
        return [
            self.write("cobweb_curve.csv", curve, "cobweb-curve"),
            self.write("cobweb_staircase.csv", staircase, "cobweb-staircase"),
        ]
