"""Bifurcation diagram experiment."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, ClassVar

import numpy as np
import pandas as pd

from edudyn.analysis import SweepSpec, bifurcation_sweep, first_transition
from edudyn.exceptions import ConfigError, ParameterError

from .base_experiment import BaseExperiment

if TYPE_CHECKING:
    from pathlib import Path

    from edudyn.analysis import BifurcationDiagram

logger = logging.getLogger("edudyn")

APERIODIC = "aperiodic"
FAILED = "error"


def diagram_frame(diagram: BifurcationDiagram) -> pd.DataFrame:
    """Long-format table with one row per recorded sample.

    A failed cell contributes a single row with ``sample_index`` -1, NaN values and period ``error``.
    """
    two_dimensional = diagram.system == "2d"
    blocks = []
    for cell in diagram.cells:
        if cell.failed:
            block = {
                "param_value": [cell.value],
                "sample_index": [-1],
                "state_value": [np.nan],
                "lyapunov": [np.nan],
                "period": [FAILED],
            }
            if two_dimensional:
                block["lambda_value"] = [np.nan]
        else:
            count = len(cell.samples)
            block = {
                "param_value": np.full(count, cell.value),
                "sample_index": np.arange(count),
                "state_value": cell.samples[:, 0] if two_dimensional else cell.samples,
                "lyapunov": np.full(count, cell.lyapunov),
                "period": [APERIODIC if cell.period is None else str(cell.period)] * count,
            }
            if two_dimensional:
                block["lambda_value"] = cell.samples[:, 1]
        blocks.append(pd.DataFrame(block))

    columns = ["param_value", "sample_index", "state_value", "lyapunov", "period"]
    if two_dimensional:
        columns.insert(3, "lambda_value")
    return pd.concat(blocks, ignore_index=True)[columns]


class BifurcateExperiment(BaseExperiment):
    """Attractor samples, Lyapunov exponent and period over a parameter grid."""

    EXPERIMENT_NAME: ClassVar[str] = "bifurcate"

    def sweep_spec(self) -> SweepSpec:
        """Translate the run configuration into a sweep definition."""
        config = self.config
        try:
            return SweepSpec(
                parameter=config.sweep.parameter,
                lo=config.sweep.lo,
                hi=config.sweep.hi,
                system=config.run.system,
                params=config.model,
                lam=config.mix.lam,
                mu=config.mix.mu,
                grid_points=config.sweep.grid_points,
                burn_in=config.run.burn_in,
                samples=config.run.samples,
                lyapunov_steps=config.run.lyapunov_steps,
                seed_E=config.run.seed_E,
                seed_lambda=config.run.seed_lambda,
                continuation=config.sweep.continuation,
                max_period=config.run.max_period,
                period_tol=config.run.period_tol,
                tol=config.tolerances,
            )
        except ParameterError as err:
            raise ConfigError(str(err), key=err.field) from err

    def execute(self) -> list[Path]:
        """Run the sweep and write ``bifurcation.csv``."""
        diagram = bifurcation_sweep(self.sweep_spec())
        flip = first_transition(diagram, 1, 2)
        if flip is not None:
            logger.info("First period 1 -> 2 transition at %s = %.6g", diagram.parameter, flip)
        chaotic = int(np.sum(diagram.lyapunov > 0))
        logger.info("%d of %d cells have a positive Lyapunov exponent", chaotic, len(diagram.cells))
        return [self.write("bifurcation.csv", diagram_frame(diagram), f"bifurcate-{diagram.system}")]
