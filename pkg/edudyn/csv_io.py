"""Result files.

Every experiment writes UTF-8 CSV files that open with ``#`` header lines
recording the schema, the package version and the full effective
configuration, followed by a pandas-written table. Floats carry 17
significant digits, so identical runs produce byte-identical files.
`read_result` re-parses any of these files and checks the columns against the
schema named in the header.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Final

import pandas as pd

if TYPE_CHECKING:
    import os
    from collections.abc import Mapping

logger = logging.getLogger("edudyn")

FLOAT_FORMAT: Final = "%.17g"
HEADER_PREFIX: Final = "# "

SCHEMAS: Final[dict[str, tuple[str, ...]]] = {
    "simulate-1d": ("t", "E"),
    "simulate-2d": ("t", "E", "lambda"),
    "cobweb-curve": ("E", "gamma_E"),
    "cobweb-staircase": ("seq", "x", "y"),
    "fixed-points-1d": ("E_star", "gamma_prime", "class", "regime"),
    "fixed-points-2d": ("E_star", "lambda_star", "gamma_prime", "class", "regime"),
    "absorbing-interval": ("E_c", "E_min", "E_max", "unimodal_certified"),
    "bifurcate-1d": ("param_value", "sample_index", "state_value", "lyapunov", "period"),
    "bifurcate-2d": ("param_value", "sample_index", "state_value", "lambda_value", "lyapunov", "period"),
    "stability": (
        "E_star",
        "lambda_star",
        "gamma_E",
        "gamma_lambda",
        "v_E",
        "trace",
        "det",
        "schur_1",
        "schur_2",
        "schur_3",
        "stable",
        "spectral_radius",
        "nearest_bifurcation",
        "bifurcation_residual",
        "mu_threshold_at_point",
        "mu_threshold_conservative",
        "status",
    ),
    "mu-threshold": (
        "E_star",
        "lambda_star",
        "g_star",
        "h_star",
        "g_hat",
        "h_hat",
        "region_lo",
        "region_hi",
        "mu_bar_at_point",
        "mu_bar_conservative",
        "status",
    ),
    "comparative-statics": (
        "E_star",
        "gamma_E",
        "gamma_kappa",
        "gamma_kappa_via_premium",
        "dE_dkappa",
        "log10_abs_dE_dkappa",
        "error_estimate",
        "regime",
    ),
}


@dataclass(frozen=True)
class ResultFile:
    """A parsed result file."""

    schema: str
    header: dict[str, str]
    frame: pd.DataFrame


def write_result(
    path: str | os.PathLike[str],
    frame: pd.DataFrame,
    schema: str,
    header: Mapping[str, str],
) -> Path:
    """Write a result table with its header block.

    Args:
        path: Target file. Parent folders are created.
        frame: Table whose columns match ``SCHEMAS[schema]`` in order.
        schema: Schema name.
        header: Ordered ``key -> value`` pairs, usually the version and effective configuration.

    Returns:
        The written path.

    Raises:
        ValueError: If the schema is unknown or the columns do not match it.
    """
    if schema not in SCHEMAS:
        msg = f"Unknown result schema '{schema}'"
        raise ValueError(msg)
    if tuple(frame.columns) != SCHEMAS[schema]:
        msg = f"Columns {list(frame.columns)} do not match schema '{schema}' {list(SCHEMAS[schema])}"
        raise ValueError(msg)

    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8", newline="") as handle:
        handle.write(f"{HEADER_PREFIX}schema={schema}\n")
        for key, value in header.items():
            handle.write(f"{HEADER_PREFIX}{key}={value}\n")
        frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", na_rep="nan")
    logger.info("Wrote %d rows to %s", len(frame), target)
    return target


def read_header(path: str | os.PathLike[str]) -> dict[str, str]:
    """Read the ``#`` header block of a result file."""
    header: dict[str, str] = {}
    with Path(path).open(encoding="utf-8") as handle:
        for line in handle:
            if not line.startswith(HEADER_PREFIX.strip()):
                break
            key, _, value = line[len(HEADER_PREFIX) :].rstrip("\n").partition("=")
            header[key] = value
    return header


def read_result(path: str | os.PathLike[str]) -> ResultFile:
    """Parse a result file and validate it against its schema.

    Raises:
        ValueError: If the header names no known schema or the columns differ from it.
    """
    header = read_header(path)
    schema = header.pop("schema", None)
    if schema not in SCHEMAS:
        msg = f"{path}: header names no known schema ({schema!r})"
        raise ValueError(msg)
    frame = pd.read_csv(path, comment="#", keep_default_na=False, na_values=["nan"])
    if tuple(frame.columns) != SCHEMAS[schema]:
        msg = f"{path}: columns {list(frame.columns)} do not match schema '{schema}'"
        raise ValueError(msg)
    return ResultFile(schema=schema, header=header, frame=frame)
