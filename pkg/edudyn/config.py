"""Run configuration.

A configuration is a flat list of ``key = value`` lines with dotted section
prefixes::

    # Chaotic time series
    preset = fig1b
    experiment = simulate
    model.sigma = 16.5
    run.burn_in = 2000

``#`` starts a comment. ``preset`` loads a bundled preset first and the file's own
keys override it. A file whose content starts with ``{`` is read as a JSON
object instead, nested sections being flattened to the same dotted keys. The
values given with ``--set key=value`` on the command line are applied last.

Every key is validated. Unknown keys, malformed values and bound violations
raise `ConfigError` naming the source, the line and the key.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, fields
from importlib.resources import files
from pathlib import Path
from typing import TYPE_CHECKING, Any, Final, Literal

from edudyn.analysis.bifurcation import SWEEPABLE
from edudyn.exceptions import ConfigError, ParameterError
from edudyn.model.core import DEFAULT_TOLERANCES, ModelParams, PopulationMix, Tolerances
from edudyn.model.map_1d import MIN_CRITICAL_GRID

if TYPE_CHECKING:
    import os
    from collections.abc import Callable, Iterable, Mapping

logger = logging.getLogger("edudyn")

EXPERIMENTS: Final = (
    "simulate",
    "cobweb",
    "fixed-points",
    "absorbing-interval",
    "bifurcate",
    "stability",
    "mu-threshold",
    "comparative-statics",
)
PRESET_SUFFIX: Final = ".cfg"
TIED: Final = "tied"


@dataclass(frozen=True)
class RunSettings:
    """Iteration and numerical-grid settings shared by the experiments.

    Attributes:
        system: ``"1d"`` (lambda fixed) or ``"2d"`` (lambda switches with mu).
        steps: Recorded steps of ``simulate`` and ``cobweb``.
        burn_in: Discarded transient steps.
        samples: States recorded per sweep cell.
        seed_E: Initial enrolment.
        seed_lambda: Initial follower share of the two-dimensional map.
        lyapunov_steps: Steps averaged by Lyapunov estimates.
        curve_grid_n: Points of the cobweb map curve.
        root_grid_n: Scan points of the fixed-point search.
        critical_grid_n: Scan points of the critical-point search.
        max_period: Largest period tested.
        period_tol: Tolerance of the period test.
    """

    system: Literal["1d", "2d"] = "1d"
    steps: int = 300
    burn_in: int = 2000
    samples: int = 300
    seed_E: float = 0.3
    seed_lambda: float = 0.5
    lyapunov_steps: int = 10_000
    curve_grid_n: int = 1000
    root_grid_n: int = 2000
    critical_grid_n: int = 10_000
    max_period: int = 64
    period_tol: float = 1e-8

    def __post_init__(self) -> None:
        """Validate counts and seeds."""
        if self.system not in ("1d", "2d"):
            msg = f"System must be '1d' or '2d', got {self.system!r}"
            raise ParameterError("system", msg)
        for name in ("steps", "samples", "lyapunov_steps", "curve_grid_n", "root_grid_n", "critical_grid_n"):
            if getattr(self, name) < 1:
                msg = f"'{name}' must be a positive integer, got {getattr(self, name)!r}"
                raise ParameterError(name, msg)
        if self.critical_grid_n < MIN_CRITICAL_GRID:
            msg = f"'critical_grid_n' must be at least {MIN_CRITICAL_GRID}, got {self.critical_grid_n!r}"
            raise ParameterError("critical_grid_n", msg)
        if self.burn_in < 0:
            msg = f"'burn_in' must be non-negative, got {self.burn_in!r}"
            raise ParameterError("burn_in", msg)
        if self.max_period < 1:
            msg = f"'max_period' must be a positive integer, got {self.max_period!r}"
            raise ParameterError("max_period", msg)
        if not self.period_tol > 0:
            msg = f"'period_tol' must be positive, got {self.period_tol!r}"
            raise ParameterError("period_tol", msg)
        if not 0.0 <= self.seed_lambda <= 1.0:
            msg = f"'seed_lambda' must lie in [0, 1], got {self.seed_lambda!r}"
            raise ParameterError("seed_lambda", msg)


@dataclass(frozen=True)
class SweepSettings:
    """Swept parameter and its grid."""

    parameter: str = "sigma"
    lo: float = 0.0
    hi: float = 20.0
    grid_points: int = 1000
    continuation: bool = False

    def __post_init__(self) -> None:
        """Validate the swept parameter and the range."""
        if self.parameter not in SWEEPABLE:
            msg = f"Cannot sweep '{self.parameter}', expected one of {', '.join(SWEEPABLE)}"
            raise ParameterError("parameter", msg)
        if not self.lo <= self.hi:
            msg = f"Sweep range [{self.lo!r}, {self.hi!r}] is empty"
            raise ParameterError("hi", msg)


@dataclass(frozen=True)
class RunConfig:
    """Fully validated configuration of one experiment run."""

    experiment: str
    model: ModelParams = field(default_factory=ModelParams)
    mix: PopulationMix = field(default_factory=PopulationMix)
    run: RunSettings = field(default_factory=RunSettings)
    sweep: SweepSettings = field(default_factory=SweepSettings)
    tolerances: Tolerances = DEFAULT_TOLERANCES
    output_dir: Path = Path("results")
    preset: str | None = None

    def header_items(self) -> dict[str, str]:
        """The effective configuration as ordered ``key -> value`` pairs, defaults included."""
        items = {"experiment": self.experiment, "preset": self.preset or "none"}
        for item in fields(self.model):
            value = getattr(self.model, item.name)
            items[f"model.{item.name}"] = TIED if value is None else _format(value)
        items["mix.lambda"] = _format(self.mix.lam)
        items["mix.mu"] = _format(self.mix.mu)
        for section, settings in (("run", self.run), ("sweep", self.sweep), ("tolerance", self.tolerances)):
            for item in fields(settings):
                items[f"{section}.{item.name}"] = _format(getattr(settings, item.name))
        items["output.dir"] = self.output_dir.as_posix()
        return items


def _format(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _to_float(raw: str) -> float:
    return float(raw)


def _to_int(raw: str) -> int:
    return int(raw)


def _to_bool(raw: str) -> bool:
    lowered = raw.lower()
    if lowered in {"true", "yes", "on", "1"}:
        return True
    if lowered in {"false", "no", "off", "0"}:
        return False
    msg = f"expected a boolean, got {raw!r}"
    raise ValueError(msg)


def _to_premium_reactivity(raw: str) -> float | None:
    if raw.lower() in {TIED, "none", "null", ""}:
        return None
    return float(raw)


def _to_text(raw: str) -> str:
    if not raw:
        msg = "expected a non-empty value"
        raise ValueError(msg)
    return raw


KEYS: Final[dict[str, Callable[[str], Any]]] = {
    "experiment": _to_text,
    "preset": _to_text,
    "model.income": _to_float,
    "model.price_education": _to_float,
    "model.price_consumption": _to_float,
    "model.rho": _to_float,
    "model.rho_pi": _to_float,
    "model.sigma": _to_float,
    "model.sigma_pi": _to_premium_reactivity,
    "model.kappa": _to_float,
    "model.pi_bar": _to_float,
    "mix.lambda": _to_float,
    "mix.mu": _to_float,
    "run.system": _to_text,
    "run.steps": _to_int,
    "run.burn_in": _to_int,
    "run.samples": _to_int,
    "run.seed_E": _to_float,
    "run.seed_lambda": _to_float,
    "run.lyapunov_steps": _to_int,
    "run.curve_grid_n": _to_int,
    "run.root_grid_n": _to_int,
    "run.critical_grid_n": _to_int,
    "run.max_period": _to_int,
    "run.period_tol": _to_float,
    "sweep.parameter": _to_text,
    "sweep.lo": _to_float,
    "sweep.hi": _to_float,
    "sweep.grid_points": _to_int,
    "sweep.continuation": _to_bool,
    "output.dir": _to_text,
    "tolerance.eps_den": _to_float,
    "tolerance.eps_w": _to_float,
    "tolerance.eps_kink": _to_float,
    "tolerance.fd_rel_step": _to_float,
    "tolerance.domain_tol": _to_float,
}


@dataclass(frozen=True)
class _Entry:
    """Raw configuration value and where it came from."""

    value: str
    source: str
    line: int | None = None


def preset_names() -> list[str]:
    """Names of the bundled presets."""
    folder = files("edudyn").joinpath("presets")
    names = (item.name for item in folder.iterdir())
    return sorted(name.removesuffix(PRESET_SUFFIX) for name in names if name.endswith(PRESET_SUFFIX))


def preset_text(name: str) -> str:
    """Text of a bundled preset.

    Raises:
        ConfigError: If no preset has this name.
    """
    if name not in preset_names():
        msg = f"Unknown preset '{name}', available: {', '.join(preset_names())}"
        raise ConfigError(msg, key="preset")
    return files("edudyn").joinpath("presets").joinpath(f"{name}{PRESET_SUFFIX}").read_text(encoding="utf-8")


def parse_lines(text: str, source: str) -> dict[str, _Entry]:
    """Parse ``key = value`` lines into raw entries."""
    entries: dict[str, _Entry] = {}
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        key, separator, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not separator or not key:
            msg = f"expected 'key = value', got {raw_line.strip()!r}"
            raise ConfigError(msg, source=source, line=number)
        if key in entries:
            msg = f"duplicate key, first set on line {entries[key].line}"
            raise ConfigError(msg, source=source, line=number, key=key)
        entries[key] = _Entry(value, source, number)
    return entries


def parse_json(text: str, source: str) -> dict[str, _Entry]:
    """Parse a JSON object, flattening nested sections to dotted keys."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(err.msg, source=source, line=err.lineno) from err
    if not isinstance(document, dict):
        msg = "top level of a JSON configuration must be an object"
        raise ConfigError(msg, source=source)

    entries: dict[str, _Entry] = {}

    def walk(prefix: str, node: Mapping[str, Any]) -> None:
        for name, value in node.items():
            key = f"{prefix}.{name}" if prefix else str(name)
            if isinstance(value, dict):
                walk(key, value)
            else:
                entries[key] = _Entry(value if isinstance(value, str) else json.dumps(value), source)

    walk("", document)
    return entries


def parse_text(text: str, source: str) -> dict[str, _Entry]:
    """Parse configuration text in either form."""
    if text.lstrip().startswith("{"):
        return parse_json(text, source)
    return parse_lines(text, source)


def _read(location: str | os.PathLike[str]) -> dict[str, _Entry]:
    path = Path(location)
    if path.is_file():
        return parse_text(path.read_text(encoding="utf-8"), str(path))
    name = str(location)
    if name in preset_names():
        return parse_text(preset_text(name), f"preset:{name}")
    msg = f"No configuration file or preset named '{name}'"
    raise ConfigError(msg, source=name)


def _parse_overrides(overrides: Iterable[str]) -> dict[str, _Entry]:
    entries: dict[str, _Entry] = {}
    for override in overrides:
        key, separator, value = override.partition("=")
        if not separator or not key.strip():
            msg = f"expected key=value, got {override!r}"
            raise ConfigError(msg, source="--set")
        if key.strip() == "preset":
            msg = "presets are selected with --config"
            raise ConfigError(msg, source="--set", key="preset")
        entries[key.strip()] = _Entry(value.strip(), "--set")
    return entries


def _section(
    entries: Mapping[str, _Entry],
    values: Mapping[str, Any],
    prefix: str,
    build: Callable[..., Any],
    renames: Mapping[str, str] | None = None,
) -> Any:
    """Build one section dataclass, mapping bound violations back to their config line."""
    renames = renames or {}
    kwargs = {
        renames.get(key.removeprefix(f"{prefix}."), key.removeprefix(f"{prefix}.")): value
        for key, value in values.items()
        if key.startswith(f"{prefix}.")
    }
    try:
        return build(**kwargs)
    except ParameterError as err:
        key = f"{prefix}.{err.field}"
        entry = entries.get(key)
        raise ConfigError(
            str(err),
            source=entry.source if entry else None,
            line=entry.line if entry else None,
            key=key,
        ) from err


def load_config(
    location: str | os.PathLike[str] | None = None,
    overrides: Iterable[str] = (),
    *,
    experiment: str | None = None,
    output_dir: str | os.PathLike[str] | None = None,
) -> RunConfig:
    """Load, merge and validate a run configuration.

    Args:
        location: Configuration file path or bundled preset name. ``None`` uses defaults only.
        overrides: ``key=value`` strings applied after the file.
        experiment: Experiment name, overriding the file's ``experiment`` key.
        output_dir: Output folder, overriding ``output.dir``.

    Returns:
        The validated configuration.

    Raises:
        ConfigError: On any parse or validation failure.
    """
    entries: dict[str, _Entry] = {}
    preset: str | None = None
    if location is not None:
        file_entries = _read(location)
        if str(location) in preset_names() and not Path(location).is_file():
            preset = str(location)
        if "preset" in file_entries:
            preset = file_entries["preset"].value
            preset_entries = parse_text(preset_text(preset), f"preset:{preset}")
            if "preset" in preset_entries:
                msg = "presets cannot load other presets"
                raise ConfigError(msg, source=f"preset:{preset}", key="preset")
            entries.update(preset_entries)
        entries.update(file_entries)
    entries.update(_parse_overrides(overrides))
    if experiment is not None:
        entries["experiment"] = _Entry(experiment, "command line")
    if output_dir is not None:
        entries["output.dir"] = _Entry(str(output_dir), "command line")

    values: dict[str, Any] = {}
    for key, entry in entries.items():
        if key not in KEYS:
            msg = "unknown configuration key"
            raise ConfigError(msg, source=entry.source, line=entry.line, key=key)
        try:
            values[key] = KEYS[key](entry.value)
        except ValueError as err:
            msg = f"invalid value {entry.value!r}: {err}"
            raise ConfigError(msg, source=entry.source, line=entry.line, key=key) from err

    name = values.get("experiment")
    if name is None:
        msg = "no experiment given"
        raise ConfigError(msg, key="experiment")
    if name not in EXPERIMENTS:
        entry = entries["experiment"]
        msg = f"unknown experiment '{name}', expected one of {', '.join(EXPERIMENTS)}"
        raise ConfigError(msg, source=entry.source, line=entry.line, key="experiment")

    config = RunConfig(
        experiment=name,
        model=_section(entries, values, "model", ModelParams),
        mix=_section(entries, values, "mix", PopulationMix, {"lambda": "lam"}),
        run=_section(entries, values, "run", RunSettings),
        sweep=_section(entries, values, "sweep", SweepSettings),
        tolerances=_section(entries, values, "tolerance", Tolerances),
        output_dir=Path(values.get("output.dir", "results")),
        preset=preset,
    )
    logger.debug("Loaded configuration: %s", config.header_items())
    return config
