"""Nonlinear dynamics of educational choice."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("edudyn")
except PackageNotFoundError:  # Running from a source tree
    __version__ = "0.0.0"

from .config import RunConfig, load_config
from .exceptions import ConfigError, EdudynError, ParameterError
from .log_utils import configure_logger
from .model import ModelParams, PopulationMix, Tolerances

__all__ = [
    "ConfigError",
    "EdudynError",
    "ModelParams",
    "ParameterError",
    "PopulationMix",
    "RunConfig",
    "Tolerances",
    "configure_logger",
    "load_config",
]

# Set up the logger
logger = configure_logger("edudyn")
