"""Base class for experiments.

Every experiment behind ``edudyn <experiment>`` subclasses `BaseExperiment`. It
receives a validated `RunConfig`, computes its results and writes them with
`edudyn.csv_io.write_result`, stamping each file with the package version and
the effective configuration.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any, ClassVar

from edudyn.csv_io import write_result
from edudyn.exceptions import ConfigError

if TYPE_CHECKING:
    from pathlib import Path

    import pandas as pd

    from edudyn.config import RunConfig

logger = logging.getLogger("edudyn")


class ExperimentRegistryMeta(type):
    """Metaclass that registers every named `BaseExperiment` subclass.

    A subclass defining ``EXPERIMENT_NAME`` becomes reachable through
    `BaseExperiment.get` under that name.
    """

    registry: ClassVar[dict[str, type]] = {}

    def __init__(cls, name: str, bases: tuple[type, ...], namespace: dict[str, Any]) -> None:
        """Initializes the class and registers it if it names an experiment.

        Args:
            name: The name of the class being created.
            bases: The base classes of the class being created.
            namespace: The attributes and methods of the class being created.
        """
        super().__init__(name, bases, namespace)
        experiment_name = namespace.get("EXPERIMENT_NAME")
        if name != "BaseExperiment" and experiment_name:
            ExperimentRegistryMeta.registry[experiment_name] = cls
            logger.debug("Registered experiment %s", experiment_name)


class BaseExperiment(metaclass=ExperimentRegistryMeta):
    """Base class for all experiments.

    Attributes:
        EXPERIMENT_NAME: Name used on the command line. Overridden by subclasses.
        config: The validated run configuration.
    """

    EXPERIMENT_NAME: ClassVar[str] = "BASE"

    def __init__(self, config: RunConfig) -> None:
        """Initializes the experiment with its configuration."""
        self.config = config

    @classmethod
    def get(cls, name: str) -> type[BaseExperiment]:
        """Registered experiment class for ``name``.

        Raises:
            ConfigError: If no experiment has this name.
        """
        try:
            return ExperimentRegistryMeta.registry[name]
        except KeyError:
            msg = f"unknown experiment '{name}', expected one of {', '.join(cls.names())}"
            raise ConfigError(msg, key="experiment") from None

    @classmethod
    def names(cls) -> list[str]:
        """Names of all registered experiments."""
        return sorted(ExperimentRegistryMeta.registry)

    @property
    def output_dir(self) -> Path:
        """Folder receiving the result files."""
        return self.config.output_dir

    def header(self) -> dict[str, str]:
        """Header block written on top of every result file."""
        from edudyn import __version__

        return {"edudyn_version": __version__, **self.config.header_items()}

    def write(self, file_name: str, frame: pd.DataFrame, schema: str) -> Path:
        """Write one result table into the output folder."""
        return write_result(self.output_dir / file_name, frame, schema, self.header())

    def to_dict(self) -> dict[str, Any]:
        """Experiment name and effective configuration."""
        return {"experiment_name": self.EXPERIMENT_NAME, **self.config.header_items()}

    def __str__(self) -> str:
        """String form of `to_dict`."""
        return str(self.to_dict())

    def execute(self) -> list[Path]:
        """Run the experiment and return the written files."""
        raise NotImplementedError
