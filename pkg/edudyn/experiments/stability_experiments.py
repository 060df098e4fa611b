"""Schur stability and switching-intensity thresholds of the two-dimensional map."""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING, ClassVar

import pandas as pd

from edudyn.csv_io import SCHEMAS
from edudyn.exceptions import DegenerateWeights, GStarNotBelowOne, HStarZero, KinkProximity, ShareAtBoundary
from edudyn.model import fixed_points_2d, mu_threshold

from .base_experiment import BaseExperiment

if TYPE_CHECKING:
    from pathlib import Path

logger = logging.getLogger("edudyn")

THRESHOLD_COLUMNS = (
    "g_star",
    "h_star",
    "g_hat",
    "h_hat",
    "region_lo",
    "region_hi",
    "mu_bar_at_point",
    "mu_bar_conservative",
)


def _or_nan(value: float | None) -> float:
    return math.nan if value is None else value


class StabilityExperiment(BaseExperiment):
    """Jacobian, Schur quantities and nearest bifurcation boundary of every fixed point.

    A fixed point whose analysis failed keeps its row, with ``status`` set to ``error``
    and every stability field left empty.
    """

    EXPERIMENT_NAME: ClassVar[str] = "stability"

    def execute(self) -> list[Path]:
        """Analyse the fixed points and write ``stability.csv``."""
        config = self.config
        columns = list(SCHEMAS["stability"])
        rows = []
        for point in fixed_points_2d(config.model, config.mix.mu, config.run.root_grid_n, config.tolerances):
            row = {"E_star": point.state.E, "lambda_star": point.state.lam}
            report = point.report
            if report is None:
                logger.warning("No stability report for E*=%r: %s", point.state.E, point.error)
                rows.append({**row, **dict.fromkeys(columns[2:-1], math.nan), "status": "error"})
                continue
            jacobian = report.jacobian
            logger.info(
                "Fixed point (%.12g, %.12g): %s, nearest boundary %s",
                point.state.E,
                point.state.lam,
                "stable" if report.stable else "unstable",
                report.nearest_bifurcation.value,
            )
            rows.append(
                {
                    **row,
                    "gamma_E": jacobian.gamma_E,
                    "gamma_lambda": jacobian.gamma_lambda,
                    "v_E": jacobian.v_E,
                    "trace": jacobian.trace,
                    "det": jacobian.det,
                    "schur_1": report.conditions.schur_1,
                    "schur_2": report.conditions.schur_2,
                    "schur_3": report.conditions.schur_3,
                    "stable": report.stable,
                    "spectral_radius": report.spectral_radius,
                    "nearest_bifurcation": report.nearest_bifurcation.value,
                    "bifurcation_residual": report.bifurcation_residual,
                    "mu_threshold_at_point": _or_nan(report.mu_threshold_at_point),
                    "mu_threshold_conservative": _or_nan(report.mu_threshold_conservative),
                    "status": "ok",
                },
            )
        frame = pd.DataFrame(rows, columns=columns)
        return [self.write("stability.csv", frame, "stability")]


class MuThresholdExperiment(BaseExperiment):
    """Largest switching intensity that provably keeps each fixed point stable."""

    EXPERIMENT_NAME: ClassVar[str] = "mu-threshold"

    def execute(self) -> list[Path]:
        """Compute both thresholds per fixed point and write ``mu_threshold.csv``."""
        config = self.config
        rows = []
        for point in fixed_points_2d(config.model, config.mix.mu, config.run.root_grid_n, config.tolerances):
            row = {"E_star": point.state.E, "lambda_star": point.state.lam}
            values = dict.fromkeys(THRESHOLD_COLUMNS, math.nan)
            try:
                threshold = mu_threshold(point.state, config.model, tol=config.tolerances)
            except GStarNotBelowOne:
                status = "no-threshold"
            except HStarZero:
                status = "unbounded"
                values["mu_bar_at_point"] = values["mu_bar_conservative"] = math.inf
            except (KinkProximity, ShareAtBoundary, DegenerateWeights) as err:
                logger.warning("Threshold undefined at E*=%r: %s", point.state.E, err)
                status = "undefined"
            else:
                status = "ok"
                values.update(
                    g_star=threshold.g_star,
                    h_star=threshold.h_star,
                    g_hat=threshold.g_hat,
                    h_hat=threshold.h_hat,
                    region_lo=threshold.region[0],
                    region_hi=threshold.region[1],
                    mu_bar_at_point=threshold.at_point,
                    mu_bar_conservative=threshold.conservative,
                )
                logger.info(
                    "mu threshold at E*=%.12g: %.6g (conservative %.6g)",
                    point.state.E,
                    threshold.at_point,
                    threshold.conservative,
                )
            rows.append({**row, **values, "status": status})
        frame = pd.DataFrame(rows, columns=list(SCHEMAS["mu-threshold"]))
        return [self.write("mu_threshold.csv", frame, "mu-threshold")]
