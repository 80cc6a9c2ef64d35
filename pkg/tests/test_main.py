# -*- coding: utf-8 -*-

import json

import pytest

from lab.cli import main
from lab.resources.operators import service as operators_service


_IDENTITIES_ARGS = [
    "identities",
    "--set",
    "grid.n=8",
    "--set",
    "identities.trials=2",
    "--set",
    "identities.agreement_n=8",
    "--set",
    "identities.kernel_trials=50",
    "--set",
    "identities.convergence_ladder=[]",
]


def _read_report(path) -> dict:
    with open(path, "r", encoding="utf-8") as _file:
        return json.load(_file)


def test_main_ok(tmp_path):
    assert main(_IDENTITIES_ARGS + ["--out", str(tmp_path)]) == 0

    _report = _read_report(tmp_path / "identities.json")
    assert _report["ok"] is True
    assert _report["config"]["grid"]["n"] == 8
    assert _report["constants"]["tolerances"]["isometry"] == 1e-12
    assert (tmp_path / "identities.checks.csv").is_file()
    assert (tmp_path / "identities.jacobian_trials.csv").is_file()


def test_main_config_file(tmp_path):
    _config_path = tmp_path / "sparse.json"
    _config_path.write_text(
        json.dumps(
            {
                "experiment": "sparse",
                "grid": {"n": 8},
                "sparse": {"corpus": [{"class": "constant", "value": 1.5}], "lp_draws": 2},
            }
        )
    )
    _out = tmp_path / "out"

    assert main(["sparse", "--config", str(_config_path), "--out", str(_out)]) == 0
    assert _read_report(_out / "sparse.json")["summary"]["families"]["s00_constant"]["size"] == 1


@pytest.mark.parametrize(
    "args",
    [
        ["unknown"],
        ["identities", "--set", "grid.n=12"],
        ["identities", "--set", "grid.periodic=false"],
        ["lowerbound", "--set", "exponents.p=2", "--set", "exponents.q=4"],
        ["sparse", "--config", "missing.json"],
        ["sparse", "--bogus"],
    ],
)
def test_main_invalid_input(args, tmp_path):
    assert main(args + ["--out", str(tmp_path)]) == 3


def test_main_corrupted_multiplier(tmp_path, monkeypatch):
    _symbol = operators_service._beurling_symbol
    monkeypatch.setattr(
        operators_service, "_beurling_symbol", lambda grid: 1.001 * _symbol(grid)
    )

    assert main(_IDENTITIES_ARGS + ["--out", str(tmp_path)]) == 2

    _report = _read_report(tmp_path / "identities.json")
    assert _report["ok"] is False
    assert "isometry" in _report["failed"]
    assert "fundamental_relation" in _report["failed"]
