# SPDX-FileCopyrightText: 2024-present Alan Meeson <am@carefullycalculated.co.uk>
#
# SPDX-License-Identifier: Apache-2.0
import logging
import os
from dataclasses import asdict, dataclass
from typing import Any, Dict, Mapping, Optional

from computable_analysis.errors import DeserializationError, ValidationError
from computable_analysis.schema.records import OutputFormat

logger = logging.getLogger(__name__)

PRECISION_ENV_VAR = "COMPUTABLE_ANALYSIS_PRECISION"
DEFAULT_PRECISION = 30
DEFAULT_BUDGET = 100_000


def default_precision(environ: Optional[Mapping[str, str]] = None) -> int:
    """
    The default precision in bits, taken from COMPUTABLE_ANALYSIS_PRECISION when set.

    :param environ: the environment to read. Defaults to `os.environ`.
    :return: the precision.
    :raises ValidationError: if the environment value is not a positive integer.
    """
    env = os.environ if environ is None else environ
    raw = env.get(PRECISION_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_PRECISION
    try:
        value = int(raw)
    except ValueError as exc:
        err = f"{PRECISION_ENV_VAR} must be a positive integer, got '{raw}'"
        raise ValidationError(err) from exc
    if value < 1:
        err = f"{PRECISION_ENV_VAR} must be a positive integer, got {value}"
        raise ValidationError(err)
    logger.debug("Default precision %d bits taken from %s.", value, PRECISION_ENV_VAR)
    return value


@dataclass(frozen=True)
class RunConfig:
    """The settings for one command-line run."""

    NAME = "computable_analysis.config.RunConfig"

    subcommand: str
    precision: int = DEFAULT_PRECISION
    budget: int = DEFAULT_BUDGET
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    output_format: OutputFormat = "json"

    def __post_init__(self):
        if self.precision < 1:
            err = f"precision must be at least 1 bit. Currently, precision is {self.precision}"
            raise ValidationError(err)
        if self.budget < 1:
            err = f"budget must be at least 1. Currently, budget is {self.budget}"
            raise ValidationError(err)
        if self.output_format not in ("json", "csv"):
            err = f"output_format must be 'json' or 'csv'. Currently, output_format is '{self.output_format}'"
            raise ValidationError(err)

    def to_dict(self) -> Dict[str, Any]:
        """
        Serialize this configuration to a dictionary.
        """
        return {"type": self.NAME, "init_parameters": asdict(self)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """
        Deserialize a configuration from a dictionary.

        :param data: The dictionary to deserialize from.
        :return: The deserialized configuration.
        :raises DeserializationError: if the dictionary is not a serialized RunConfig.
        """
        if data.get("type") != cls.NAME:
            err = f"Expected a serialized {cls.NAME}, got type '{data.get('type')}'"
            raise DeserializationError(err)
        init_params = data.get("init_parameters", {})
        if "subcommand" not in init_params:
            err = f"Missing 'subcommand' in serialization data for {cls.NAME}"
            raise DeserializationError(err)
        return cls(**init_params)
