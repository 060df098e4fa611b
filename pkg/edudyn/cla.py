"""Command line entry point.

``edudyn <experiment> --config <path|preset> [--out DIR] [--set key=value ...]``

`CommandLineArguments` wraps the argparse parser and turns the parsed
arguments into a validated `RunConfig`. `main` runs the experiment and maps
failures to exit codes: 0 on success, 2 for configuration errors and 1 for
errors raised while computing. A failure is also reported as a one-line JSON
record on stderr and, when the output folder is known, as ``error.json``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Any, Final

from . import __version__
from .config import EXPERIMENTS, RunConfig, load_config, preset_names
from .exceptions import ConfigError, EdudynError
from .experiments import run_experiment

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = logging.getLogger("edudyn")

EXIT_OK: Final = 0
EXIT_RUNTIME: Final = 1
EXIT_CONFIG: Final = 2
ERROR_FILE: Final = "error.json"


class CommandLineArguments:
    """Creates and parses the ``edudyn`` command line.

    Examples:
        >>> cla = CommandLineArguments(["simulate", "--config", "fig3", "--set", "run.steps=50"])
        >>> cla.get_arguments().experiment
        'simulate'
        >>> cla.get_config().run.steps
        50
    """

    def __init__(
        self,
        argv: Sequence[str] | None = None,
        *,
        description: str | None = None,
        parser: argparse.ArgumentParser | None = None,
    ) -> None:
        """Build the parser and parse ``argv`` (``sys.argv[1:]`` when omitted).

        Args:
            argv: Arguments to parse.
            description: Description for the command line parser.
            parser: Custom parser to extend instead of a fresh one.
        """
        argv = list(sys.argv[1:] if argv is None else argv)
        parser = parser or argparse.ArgumentParser(
            prog="edudyn",
            description=description or "Nonlinear dynamics of educational choice.",
        )
        self.__add_generic_args(parser)
        self.__add_experiment_args(parser)

        try:
            self.__args = parser.parse_args(argv)
        except Exception:
            logger.exception("ARGUMENT ERROR: see `edudyn --help` for usage (edudyn %s)", __version__)
            raise
        finally:
            if "--dump_argparse_schema" in argv:  # Always dump schema if requested, even if parsing fails
                self.__dump_argparse_schema(parser)

        logger.debug("CLA Input: %s", self)

    def __add_generic_args(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument(
            "--dump_argparse_schema",
            action="store_true",
            help="If set, dumps the internal argparse schema as a JSON object to stdout. For debugging.",
        )
        parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level.")
        parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    def __add_experiment_args(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument(
            "experiment",
            nargs="?",
            choices=EXPERIMENTS,
            help="Experiment to run. Defaults to the 'experiment' key of the configuration.",
        )
        parser.add_argument(
            "--config",
            metavar="PATH|PRESET",
            help=f"Configuration file or bundled preset ({', '.join(preset_names())}).",
        )
        parser.add_argument("--out", metavar="DIR", help="Output folder, overriding 'output.dir'.")
        parser.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="Override one configuration key after the file is loaded. Repeatable.",
        )

    def __str__(self) -> str:
        """Print the string value of the argparse args."""
        return self.__args.__str__()

    def get_arguments(self) -> argparse.Namespace:
        """Retrieve the parsed arguments."""
        return self.__args

    def get_config(self) -> RunConfig:
        """Load the configuration named on the command line with all overrides applied.

        Raises:
            ConfigError: On any parse or validation failure.
        """
        return load_config(
            self.__args.config,
            self.__args.overrides,
            experiment=self.__args.experiment,
            output_dir=self.__args.out,
        )

    def __dump_argparse_schema(self, parser: argparse.ArgumentParser) -> None:
        """Dump the argparse schema as a JSON object to stdout."""
        args = [
            {
                "option_strings": action.option_strings,
                "dest": action.dest,
                "help": action.help,
                "type": getattr(action.type, "__name__", str(action.type)),
                "default": action.default,
                "required": action.required,
                "nargs": action.nargs,
                "choices": list(action.choices) if action.choices is not None else None,
                "metavar": action.metavar,
            }
            for action in parser._actions  # noqa: SLF001
        ]
        sys.stdout.write(json.dumps(args, indent=2))


def report_failure(
    error: Exception,
    exit_code: int,
    experiment: str | None,
    output_dir: Path | None,
) -> dict[str, Any]:
    """Emit the machine-readable error record on stderr and into ``error.json``."""
    record: dict[str, Any] = {
        "status": "error",
        "exit_code": exit_code,
        "error": type(error).__name__,
        "message": str(error),
        "experiment": experiment,
    }
    if isinstance(error, ConfigError):
        record.update(source=error.source, line=error.line, key=error.key)
    sys.stderr.write(json.dumps(record) + "\n")
    logger.error("%s failed: %s", experiment or "edudyn", error)
    if output_dir is not None:
        output_dir.mkdir(parents=True, exist_ok=True)
        (output_dir / ERROR_FILE).write_text(json.dumps(record, indent=2) + "\n", encoding="utf-8")
    return record


def main(argv: Sequence[str] | None = None) -> int:
    """Run one experiment from the command line and return the exit code."""
    cla = CommandLineArguments(argv)
    args = cla.get_arguments()
    if args.dump_argparse_schema:
        return EXIT_OK
    if args.verbose:
        logging.getLogger("edudyn").setLevel(logging.DEBUG)

    out = Path(args.out) if args.out else None
    try:
        config = cla.get_config()
    except ConfigError as err:
        report_failure(err, EXIT_CONFIG, args.experiment, out)
        return EXIT_CONFIG

    try:
        paths = run_experiment(config)
    except ConfigError as err:
        report_failure(err, EXIT_CONFIG, config.experiment, config.output_dir)
        return EXIT_CONFIG
    except (EdudynError, ValueError, ArithmeticError) as err:
        report_failure(err, EXIT_RUNTIME, config.experiment, config.output_dir)
        return EXIT_RUNTIME

    for path in paths:
        logger.info("Output: %s", path)
    return EXIT_OK
