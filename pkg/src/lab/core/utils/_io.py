# -*- coding: utf-8 -*-

import os
import csv
import json
import errno
from functools import lru_cache
from typing import Any, Dict, List

import yaml
import numpy as np
from pydantic import validate_call, constr
from beans_logging import logger

from lab.core.constants import WarnEnum


_path_max_length = 1024

_CSV_COLUMNS_PATH = os.path.join(
    os.path.dirname(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))),
    "assets",
    "schemas",
    "csv_columns.yml",
)


@validate_call
def create_dir(
    create_dir: constr(strip_whitespace=True, min_length=1, max_length=_path_max_length),  # type: ignore
    warn_mode: WarnEnum = WarnEnum.DEBUG,
) -> None:
    """Create directory if `create_dir` doesn't exist.

    Args:
        create_dir (str, required): Create directory path.
        warn_mode  (str, optional): Warning message mode, for example: 'ERROR', 'ALWAYS', 'DEBUG', 'IGNORE'. Defaults to 'DEBUG'.

    Raises:
        OSError: When warning mode is set to ERROR and directory already exists.
        OSError: If failed to create directory.
    """

    if not os.path.isdir(create_dir):
        try:
            _message = f"Creating '{create_dir}' directory..."
            if warn_mode == WarnEnum.ALWAYS:
                logger.info(_message)
            elif warn_mode == WarnEnum.DEBUG:
                logger.debug(_message)

            os.makedirs(create_dir)
        except OSError as err:
            if (err.errno == errno.EEXIST) and (warn_mode == WarnEnum.DEBUG):
                logger.debug(f"'{create_dir}' directory already exists!")
            else:
                logger.error(f"Failed to create '{create_dir}' directory!")
                raise

        _message = f"Successfully created '{create_dir}' directory."
        if warn_mode == WarnEnum.ALWAYS:
            logger.success(_message)
        elif warn_mode == WarnEnum.DEBUG:
            logger.debug(_message)

    elif warn_mode == WarnEnum.ERROR:
        raise OSError(errno.EEXIST, f"'{create_dir}' directory already exists!")

    return


@validate_call
def read_json(
    file_path: constr(strip_whitespace=True, min_length=1, max_length=_path_max_length),  # type: ignore
) -> Any:
    """Read a JSON document from file.

    Args:
        file_path (str, required): JSON file path.

    Returns:
        Any: Parsed JSON document.
    """

    with open(file_path, "r", encoding="utf-8") as _file:
        return json.load(_file)


def dumps_json(data: Any) -> str:
    """Serialize data into deterministic JSON text (sorted keys, fixed indent, trailing newline)."""

    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=True) + "\n"


@validate_call
def write_json(
    file_path: constr(strip_whitespace=True, min_length=1, max_length=_path_max_length),  # type: ignore
    data: Any,
) -> None:
    """Write data into a deterministic JSON file.

    Args:
        file_path (str, required): Output JSON file path.
        data      (Any, required): JSON compatible data.
    """

    _dir = os.path.dirname(file_path)
    if _dir:
        create_dir(create_dir=_dir)

    with open(file_path, "w", encoding="utf-8", newline="\n") as _file:
        _file.write(dumps_json(data))

    logger.debug(f"Saved JSON report '{file_path}'.")
    return


@lru_cache(maxsize=1)
def load_csv_columns() -> Dict[str, List[str]]:
    """Load CSV column orders from the schema file shipped in `assets/schemas`.

    Returns:
        Dict[str, List[str]]: Table name to ordered column list.
    """

    with open(_CSV_COLUMNS_PATH, "r", encoding="utf-8") as _file:
        _schema: dict = yaml.safe_load(_file) or {}

    _columns = {}
    for _table, _spec in _schema.get("tables", {}).items():
        _columns[_table] = [_column["name"] for _column in _spec["columns"]]

    return _columns


def _format_cell(val: Any) -> str:
    if val is None:
        return ""

    if isinstance(val, (bool, np.bool_)):
        return "true" if val else "false"

    if isinstance(val, (float, np.floating)):
        return repr(float(val))

    return str(val)


@validate_call
def write_csv(
    file_path: constr(strip_whitespace=True, min_length=1, max_length=_path_max_length),  # type: ignore
    table: str,
    rows: List[Dict[str, Any]],
    sort_by: List[str],
) -> None:
    """Write rows into a CSV file with the column order of `table` from the CSV schema.
    Rows are sorted by `sort_by` keys before writing.

    Args:
        file_path (str                 , required): Output CSV file path.
        table     (str                 , required): Table name in the CSV schema.
        rows      (List[Dict[str, Any]], required): Rows as dictionaries.
        sort_by   (List[str]           , required): Column names to sort rows by.

    Raises:
        KeyError  : If `table` is not in the CSV schema.
        ValueError: If a row has a column that is not in the schema.
    """

    _columns = load_csv_columns()[table]
    for _row in rows:
        _unknown = set(_row.keys()) - set(_columns)
        if _unknown:
            raise ValueError(f"Unknown '{table}' CSV columns: {sorted(_unknown)}!")

    _rows = sorted(rows, key=lambda _row: tuple(_row.get(_key) for _key in sort_by))

    _dir = os.path.dirname(file_path)
    if _dir:
        create_dir(create_dir=_dir)

    with open(file_path, "w", encoding="utf-8", newline="") as _file:
        _writer = csv.writer(_file, lineterminator="\n")
        _writer.writerow(_columns)
        for _row in _rows:
            _writer.writerow([_format_cell(_row.get(_column)) for _column in _columns])

    logger.debug(f"Saved '{table}' CSV table '{file_path}' with {len(_rows)} rows.")
    return


__all__ = [
    "create_dir",
    "read_json",
    "dumps_json",
    "write_json",
    "load_csv_columns",
    "write_csv",
]
