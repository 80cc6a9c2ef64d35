# -*- coding: utf-8 -*-

import copy
import json
from typing import Any, List

from pydantic import validate_call


@validate_call
def deep_merge(dict1: dict, dict2: dict) -> dict:
    """Return a new dictionary that's the result of a deep merge of two dictionaries.
    If there are conflicts, values from `dict2` will overwrite those in `dict1`.

    Args:
        dict1 (dict, required): The base dictionary that will be merged.
        dict2 (dict, required): The dictionary to merge into `dict1`.

    Returns:
        dict: The merged dictionary.
    """

    _merged = copy.deepcopy(dict1)
    for _key, _val in dict2.items():
        if (
            _key in _merged
            and isinstance(_merged[_key], dict)
            and isinstance(_val, dict)
        ):
            _merged[_key] = deep_merge(_merged[_key], _val)
        else:
            _merged[_key] = copy.deepcopy(_val)

    return _merged


def parse_value(raw: str) -> Any:
    """Parse a command-line override value, JSON first and plain string otherwise."""

    try:
        return json.loads(raw)
    except ValueError:
        return raw


@validate_call
def dotted_to_dict(overrides: List[str]) -> dict:
    """Convert `key.sub=value` override strings into a nested dictionary.

    Args:
        overrides (List[str], required): Override strings, for example `grid.n=64`.

    Raises:
        ValueError: If an override has no `=` or an empty key.

    Returns:
        dict: Nested dictionary ready for `deep_merge`.
    """

    _result: dict = {}
    for _override in overrides:
        if "=" not in _override:
            raise ValueError(f"Override '{_override}' must look like 'key=value'!")

        _key, _raw = _override.split("=", 1)
        _parts = [_part.strip() for _part in _key.split(".")]
        if (not _parts) or any(not _part for _part in _parts):
            raise ValueError(f"Override '{_override}' has an empty key!")

        _node = _result
        for _part in _parts[:-1]:
            _node = _node.setdefault(_part, {})
            if not isinstance(_node, dict):
                raise ValueError(f"Override '{_override}' conflicts with a previous one!")

        _node[_parts[-1]] = parse_value(_raw)

    return _result


__all__ = [
    "deep_merge",
    "parse_value",
    "dotted_to_dict",
]
