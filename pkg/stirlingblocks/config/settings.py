"""
stirlingblocks environment configuration

Settings come from ``STIRLINGBLOCKS_*`` environment variables, optionally
seeded from a local ``.env`` file, and are validated before use.
"""

import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Union

from dotenv import load_dotenv

from ..core.errors import ConfigurationError

logger = logging.getLogger(__name__)

PREFIX = "STIRLINGBLOCKS_"
LOG_FORMATS = ("plain", "structured")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

_dotenv_loaded = False


def load_environment(path: Optional[str] = None) -> None:
    """Load a ``.env`` file once; variables already set in the process win"""
    global _dotenv_loaded
    if _dotenv_loaded and path is None:
        return
    load_dotenv(dotenv_path=path, override=False)
    _dotenv_loaded = True


@dataclass
class ValidationResult:
    """Result of settings validation"""

    is_valid: bool
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)


class SettingsValidator:
    """Validates the ``STIRLINGBLOCKS_*`` environment"""

    DEFAULTS = {
        "JOBS": "1",
        "LOG_LEVEL": "WARNING",
        "LOG_FORMAT": "plain",
        "MAX_ORDER": "9",
        "DEFAULT_TRUNCATION": "6",
    }

    INT_VARS = ("JOBS", "MAX_ORDER", "DEFAULT_TRUNCATION")

    # brute force at order 10 already walks 654,729,075 words for k = 2
    MAX_ORDER_WARNING = 10

    def __init__(self, environ: Optional[Dict[str, str]] = None):
        self.environ = environ if environ is not None else os.environ
        self.config: Dict[str, Any] = {}
        self.validation_result: Optional[ValidationResult] = None

    def raw(self, name: str) -> str:
        return self.environ.get(PREFIX + name, self.DEFAULTS[name]).strip()

    def validate(self) -> ValidationResult:
        errors: List[str] = []
        warnings: List[str] = []

        errors.extend(self._validate_integers())

        level = self.raw("LOG_LEVEL").upper()
        if level not in LOG_LEVELS:
            errors.append(f"{PREFIX}LOG_LEVEL must be one of {LOG_LEVELS}, got {level!r}")

        fmt = self.raw("LOG_FORMAT").lower()
        if fmt not in LOG_FORMATS:
            errors.append(f"{PREFIX}LOG_FORMAT must be one of {LOG_FORMATS}, got {fmt!r}")

        max_order = self._parse_env_value(self.raw("MAX_ORDER"))
        if isinstance(max_order, int) and max_order > self.MAX_ORDER_WARNING:
            warnings.append(
                f"{PREFIX}MAX_ORDER={max_order} allows brute-force runs that take hours"
            )

        self.validation_result = ValidationResult(
            is_valid=not errors, errors=errors, warnings=warnings
        )
        return self.validation_result

    def _validate_integers(self) -> List[str]:
        errors = []
        for name in self.INT_VARS:
            value = self._parse_env_value(self.raw(name))
            if not isinstance(value, int) or isinstance(value, bool):
                errors.append(f"{PREFIX}{name} must be an integer, got {self.raw(name)!r}")
            elif name == "JOBS" and value < 1:
                errors.append(f"{PREFIX}JOBS must be at least 1, got {value}")
            elif value < 0:
                errors.append(f"{PREFIX}{name} must be nonnegative, got {value}")
        return errors

    def load_configuration(self) -> Dict[str, Any]:
        config = {name: self._parse_env_value(self.raw(name)) for name in self.DEFAULTS}
        config["LOG_LEVEL"] = str(config["LOG_LEVEL"]).upper()
        config["LOG_FORMAT"] = str(config["LOG_FORMAT"]).lower()
        self.config = config
        return config

    @staticmethod
    def _parse_env_value(value: str) -> Union[str, int]:
        """Integers become ints, everything else stays a string"""
        value = value.strip()
        try:
            return int(value)
        except ValueError:
            return value


@dataclass(frozen=True)
class Settings:
    """Validated runtime settings"""

    jobs: int = 1
    log_level: str = "WARNING"
    log_format: str = "plain"
    max_order: int = 9
    default_truncation: int = 6


def load_settings(environ: Optional[Dict[str, str]] = None) -> Settings:
    """
    Read and validate settings.

    Raises:
        ConfigurationError: if any variable is invalid
    """
    if environ is None:
        load_environment()
    validator = SettingsValidator(environ)
    result = validator.validate()
    for warning in result.warnings:
        logger.warning(warning)
    if not result.is_valid:
        raise ConfigurationError("; ".join(result.errors))
    config = validator.load_configuration()
    return Settings(
        jobs=config["JOBS"],
        log_level=config["LOG_LEVEL"],
        log_format=config["LOG_FORMAT"],
        max_order=config["MAX_ORDER"],
        default_truncation=config["DEFAULT_TRUNCATION"],
    )
