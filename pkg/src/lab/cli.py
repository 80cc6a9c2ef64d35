# -*- coding: utf-8 -*-

import argparse
from typing import List, NoReturn, Optional

from lab.__version__ import __version__
from lab.core.constants import ExperimentEnum
from lab.core.exceptions import BaseLabError, ConfigError, InvariantFailureError
from lab.logger import logger
from lab.experiments import service as experiments_service


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise ConfigError(description=f"Invalid command line: {message}")


def _build_parser() -> argparse.ArgumentParser:
    _parser = _ArgumentParser(
        prog="lab",
        description="Numerical experiments on the Beurling transform and its commutators.",
    )
    _parser.add_argument(
        "experiment",
        choices=[_experiment.value for _experiment in ExperimentEnum],
        help="Experiment to run.",
    )
    _parser.add_argument(
        "-c",
        "--config",
        dest="config_path",
        default=None,
        help="JSON config file of the experiment.",
    )
    _parser.add_argument(
        "-s",
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Dotted config override, e.g. 'grid.n=128'. Repeatable.",
    )
    _parser.add_argument(
        "-o", "--out", dest="output_dir", default=None, help="Output directory."
    )
    _parser.add_argument("-V", "--version", action="version", version=f"%(prog)s {__version__}")
    return _parser


def run(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one experiment and write its report.

    Args:
        argv (Optional[List[str]], optional): Command-line arguments. Defaults to `sys.argv[1:]`.

    Raises:
        InvariantFailureError: If any check of the run failed (after the report is written).

    Returns:
        int: 0 when every check passed.
    """

    _args = _build_parser().parse_args(argv)
    _config = experiments_service.load_config(
        config_path=_args.config_path,
        overrides=_args.overrides,
        experiment=ExperimentEnum(_args.experiment),
        output_dir=_args.output_dir,
    )

    _result = experiments_service.run_experiment(_config)
    experiments_service.write_report(_result)

    if not _result.ok:
        raise InvariantFailureError(
            description=f"Failed checks: {', '.join(_result.failed)}",
            detail=_result.failed,
        )

    return 0


def main(argv: Optional[List[str]] = None) -> int:
    """Command-line entry point: 0 ok, 1 internal error, 2 failed check, 3 invalid input."""

    try:
        return run(argv)
    except BaseLabError as err:
        _description = err.error.get("description")
        logger.error(f"{err.message} {_description}" if _description else err.message)
        return err.exit_code
    except Exception:
        logger.exception("Unexpected error:")
        return 1


__all__ = ["run", "main"]
