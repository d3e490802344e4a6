# SPDX-FileCopyrightText: 2024-present Alan Meeson <am@carefullycalculated.co.uk>
#
# SPDX-License-Identifier: Apache-2.0
import pytest

from computable_analysis.config import (
    DEFAULT_BUDGET,
    DEFAULT_PRECISION,
    PRECISION_ENV_VAR,
    RunConfig,
    default_precision,
)
from computable_analysis.errors import DeserializationError, ValidationError


def test_default_precision_without_environment():
    assert default_precision({}) == DEFAULT_PRECISION
    assert default_precision({PRECISION_ENV_VAR: "  "}) == DEFAULT_PRECISION


def test_default_precision_from_environment():
    assert default_precision({PRECISION_ENV_VAR: "48"}) == 48


def test_default_precision_reads_os_environ(monkeypatch):
    monkeypatch.setenv(PRECISION_ENV_VAR, "12")
    assert default_precision() == 12
    monkeypatch.delenv(PRECISION_ENV_VAR)
    assert default_precision() == DEFAULT_PRECISION


@pytest.mark.parametrize("raw", ["abc", "0", "-3", "1.5"])
def test_default_precision_rejects_bad_values(raw):
    with pytest.raises(ValidationError):
        default_precision({PRECISION_ENV_VAR: raw})


def test_init_defaults():
    config = RunConfig(subcommand="eval")
    assert config.precision == DEFAULT_PRECISION
    assert config.budget == DEFAULT_BUDGET
    assert config.input_path is None
    assert config.output_path is None
    assert config.output_format == "json"


@pytest.mark.parametrize(
    "kwargs",
    [
        {"precision": 0},
        {"budget": 0},
        {"output_format": "parquet"},
    ],
)
def test_init_validation(kwargs):
    with pytest.raises(ValidationError):
        RunConfig(subcommand="eval", **kwargs)


def test_to_dict():
    config = RunConfig(subcommand="dseq", precision=12, output_format="csv", input_path="u.json")
    assert config.to_dict() == {
        "type": "computable_analysis.config.RunConfig",
        "init_parameters": {
            "subcommand": "dseq",
            "precision": 12,
            "budget": DEFAULT_BUDGET,
            "input_path": "u.json",
            "output_path": None,
            "output_format": "csv",
        },
    }


def test_from_dict():
    config = RunConfig(subcommand="wave", budget=500, output_path="out.jsonl")
    assert RunConfig.from_dict(config.to_dict()) == config


def test_from_dict_errors():
    with pytest.raises(DeserializationError):
        RunConfig.from_dict({"type": "something.Else", "init_parameters": {"subcommand": "eval"}})
    with pytest.raises(DeserializationError):
        RunConfig.from_dict({"type": RunConfig.NAME, "init_parameters": {"precision": 10}})
