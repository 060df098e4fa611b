"""Fixed points, absorbing interval and comparative statics of the enrolment maps."""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING, ClassVar

import pandas as pd

from edudyn.model import (
    Stability,
    absorbing_interval,
    comparative_statics_kappa,
    existence_condition,
    fixed_points_1d,
    fixed_points_2d,
    premium_regime,
)

from .base_experiment import BaseExperiment

if TYPE_CHECKING:
    from pathlib import Path

logger = logging.getLogger("edudyn")


class FixedPointsExperiment(BaseExperiment):
    """All fixed points with their slope, stability class and premium regime."""

    EXPERIMENT_NAME: ClassVar[str] = "fixed-points"

    def execute(self) -> list[Path]:
        """Locate the fixed points and write ``fixed_points.csv``."""
        config = self.config
        if config.run.system == "1d":
            check = existence_condition(config.mix.lam, config.model)
            logger.info("Existence condition case %s (S=%.6g, bound %.6g)", check.case, check.S, check.lambda_bound)
            points = fixed_points_1d(config.mix.lam, config.model, config.run.root_grid_n, config.tolerances)
            frame = pd.DataFrame(
                [
                    {
                        "E_star": point.E_star,
                        "gamma_prime": point.gamma_prime,
                        "class": point.classification.value,
                        "regime": point.regime.value,
                    }
                    for point in points
                ],
                columns=["E_star", "gamma_prime", "class", "regime"],
            )
            return [self.write("fixed_points.csv", frame, "fixed-points-1d")]

        rows = []
        for point in fixed_points_2d(config.model, config.mix.mu, config.run.root_grid_n, config.tolerances):
            report = point.report
            if report is None:
                label, slope = "error", math.nan
            else:
                label = Stability.STABLE.value if report.stable else Stability.UNSTABLE.value
                slope = report.jacobian.gamma_E
            rows.append(
                {
                    "E_star": point.state.E,
                    "lambda_star": point.state.lam,
                    "gamma_prime": slope,
                    "class": label,
                    "regime": premium_regime(point.state.E, config.model, config.tolerances).value,
                },
            )
        frame = pd.DataFrame(rows, columns=["E_star", "lambda_star", "gamma_prime", "class", "regime"])
        return [self.write("fixed_points.csv", frame, "fixed-points-2d")]


class AbsorbingIntervalExperiment(BaseExperiment):
    """Trapping interval of a certified unimodal map."""

    EXPERIMENT_NAME: ClassVar[str] = "absorbing-interval"

    def execute(self) -> list[Path]:
        """Build and verify the interval and write ``absorbing_interval.csv``."""
        config = self.config
        interval = absorbing_interval(
            config.mix.lam,
            config.model,
            grid_n=config.run.critical_grid_n,
            samples=config.run.critical_grid_n,
            tol=config.tolerances,
        )
        frame = pd.DataFrame(
            [
                {
                    "E_c": interval.E_c,
                    "E_min": interval.E_min,
                    "E_max": interval.E_max,
                    "unimodal_certified": interval.unimodal_certified,
                },
            ],
        )
        return [self.write("absorbing_interval.csv", frame, "absorbing-interval")]


class ComparativeStaticsExperiment(BaseExperiment):
    """Response of every stable fixed point to the premium sensitivity kappa."""

    EXPERIMENT_NAME: ClassVar[str] = "comparative-statics"

    def execute(self) -> list[Path]:
        """Differentiate the stable fixed points in kappa and write ``comparative_statics.csv``."""
        config = self.config
        points = fixed_points_1d(config.mix.lam, config.model, config.run.root_grid_n, config.tolerances)
        stable = [point for point in points if point.classification is Stability.STABLE]
        if not stable:
            logger.warning("No stable fixed point for lambda=%r, nothing to differentiate", config.mix.lam)

        rows = []
        for point in stable:
            statics = comparative_statics_kappa(point.E_star, config.mix.lam, config.model, config.tolerances)
            logger.info("dE*/dkappa at E*=%.12g: %.6g", statics.E_star, statics.dE_dkappa)
            rows.append(
                {
                    "E_star": statics.E_star,
                    "gamma_E": statics.gamma_E,
                    "gamma_kappa": statics.gamma_kappa,
                    "gamma_kappa_via_premium": statics.gamma_kappa_via_premium,
                    "dE_dkappa": statics.dE_dkappa,
                    "log10_abs_dE_dkappa": statics.log10_abs_dE_dkappa,
                    "error_estimate": statics.error,
                    "regime": statics.regime.value,
                },
            )
        columns = [
            "E_star",
            "gamma_E",
            "gamma_kappa",
            "gamma_kappa_via_premium",
            "dE_dkappa",
            "log10_abs_dE_dkappa",
            "error_estimate",
            "regime",
        ]
        return [self.write("comparative_statics.csv", pd.DataFrame(rows, columns=columns), "comparative-statics")]
