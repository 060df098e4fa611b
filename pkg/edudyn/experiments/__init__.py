"""Experiments behind the ``edudyn`` command."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

from .base_experiment import BaseExperiment, ExperimentRegistryMeta
from .fixed_point_experiments import AbsorbingIntervalExperiment, ComparativeStaticsExperiment, FixedPointsExperiment
from .orbit_experiments import CobwebExperiment, SimulateExperiment
from .stability_experiments import MuThresholdExperiment, StabilityExperiment
from .sweep_experiments import BifurcateExperiment, diagram_frame

if TYPE_CHECKING:
    from pathlib import Path

    from edudyn.config import RunConfig

logger = logging.getLogger("edudyn")


def run_experiment(config: RunConfig) -> list[Path]:
    """Dispatch a validated configuration to its experiment and return the written files."""
    experiment = BaseExperiment.get(config.experiment)(config)
    logger.info("Running experiment: %s", experiment)
    return experiment.execute()


__all__ = [
    "AbsorbingIntervalExperiment",
    "BaseExperiment",
    "BifurcateExperiment",
    "CobwebExperiment",
    "ComparativeStaticsExperiment",
    "ExperimentRegistryMeta",
    "FixedPointsExperiment",
    "MuThresholdExperiment",
    "SimulateExperiment",
    "StabilityExperiment",
    "diagram_frame",
    "run_experiment",
]
