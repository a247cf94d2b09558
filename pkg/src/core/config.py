"""
Configuration loading from the environment (and a local .env file).
"""

import os
from typing import Callable, Optional, TypeVar

from dotenv import load_dotenv
from loguru import logger
from pydantic import ValidationError

from .exceptions import ConfigurationError
from .state import EngineSettings

PREFIX = "GIUGA_HALF_"
T = TypeVar("T")


def _read(name: str, convert: Callable[[str], T]) -> Optional[T]:
    raw = os.getenv(PREFIX + name)
    if raw is None or raw.strip() == "":
        return None
    try:
        return convert(raw.strip())
    except ValueError:
        raise ConfigurationError(f"{PREFIX}{name}={raw!r} is not a valid value") from None


def _integer(raw: str) -> int:
    # Accept "1e6" and "1_000_000" alongside plain digits.
    raw = raw.replace("_", "")
    if "e" in raw.lower():
        value = float(raw)
        if value != int(value):
            raise ValueError(raw)
        return int(value)
    return int(raw)


def load_settings(dotenv: bool = True) -> EngineSettings:
    """
    Build EngineSettings from GIUGA_HALF_* variables.

    Args:
        dotenv: Read a .env file first (existing variables win)

    Returns:
        Validated settings; unset variables keep their defaults

    Raises:
        ConfigurationError: a variable cannot be parsed or is out of range
    """
    if dotenv:
        load_dotenv()

    values = {
        "jobs": _read("JOBS", _integer),
        "factor_timeout": _read("FACTOR_TIMEOUT", float),
        "trial_limit": _read("TRIAL_LIMIT", _integer),
        "mr_rounds": _read("MR_ROUNDS", _integer),
        "cheap_bits": _read("CHEAP_BITS", _integer),
        "segment_size": _read("SEGMENT_SIZE", _integer),
        "digits": _read("DIGITS", _integer),
        "log_level": _read("LOG_LEVEL", str.upper),
        "log_file": _read("LOG_FILE", str),
    }
    values = {key: value for key, value in values.items() if value is not None}
    if "factor_timeout" in values and values["factor_timeout"] <= 0:
        values["factor_timeout"] = None

    try:
        settings = EngineSettings(**values)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid {PREFIX}* setting: {exc.errors()[0]['msg']}") from None

    logger.debug(f"Settings loaded: {settings.model_dump()}")
    return settings
