"""Config parser for sweep and noise documents."""

import json
import logging
import math
import os
from typing import Any, Dict, Optional

import jsonschema
import yaml

from .exceptions import ConfigParsingError, ConfigValidationError, NoiseModelError, OutputError
from .experiment import SweepConfig, alpha_grid, phi_grid
from .noise import NoiseModel
from .schema import get_noise_model_schema, get_sweep_config_schema

logger = logging.getLogger(__name__)

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")


class ConfigParser:
    """Parser for JSON (or YAML) sweep configuration files."""

    def __init__(self, schema: Optional[Dict[str, Any]] = None) -> None:
        """Initialize the parser.

        Args:
            schema: Optional custom schema for validation. If None, uses default schema.
        """
        self.schema = schema if schema is not None else get_sweep_config_schema()

    def parse_file(self, file_path: str) -> Dict[str, Any]:
        """Parse a config file and return the validated document.

        Args:
            file_path: Path to the config file.

        Returns:
            Parsed configuration dictionary.

        Raises:
            ConfigParsingError: If file cannot be read or parsed.
            ConfigValidationError: If the document doesn't match the schema.
        """
        if not os.path.exists(file_path):
            raise ConfigParsingError(f"File not found: {file_path}")

        try:
            with open(file_path, "r", encoding="utf-8") as f:
                content = f.read()
        except IOError as e:
            raise ConfigParsingError(f"Failed to read file {file_path}", str(e))

        logger.debug("Parsing config %s", file_path)
        return self.parse_string(content)

    def parse_string(self, content: str) -> Dict[str, Any]:
        """Parse a config document from a string.

        JSON documents are read with ``json.loads``; anything else goes through
        ``yaml.safe_load``.

        Raises:
            ConfigParsingError: If the content cannot be parsed; the message
                carries line and column when the parser reports them.
            ConfigValidationError: If the document doesn't match the schema.
        """
        document = _safe_load(content)
        if document is None:
            raise ConfigParsingError("Empty config document")
        if not isinstance(document, dict):
            raise ConfigValidationError(
                f"Config document must be an object, got {type(document).__name__}"
            )

        self.validate(document)
        return document

    def validate(self, document: Dict[str, Any]) -> None:
        """Validate a config document against the schema.

        Raises:
            ConfigValidationError: If validation fails; the message names the
                offending field.
        """
        _validate(document, self.schema)

    def build(self, document: Dict[str, Any]) -> SweepConfig:
        """Turn a validated document into a :class:`SweepConfig`.

        Raises:
            ConfigValidationError: If a value violates a domain rule.
        """
        scale = math.pi / 180.0 if document.get("degrees", False) else 1.0

        if "alpha_values" in document:
            alpha_values = tuple(float(a) * scale for a in document["alpha_values"])
        else:
            alpha_values = alpha_grid(document.get("alpha_steps", 5))
        if "phi_values" in document:
            phi_values = tuple(float(p) * scale for p in document["phi_values"])
        else:
            phi_values = phi_grid(document.get("phi_steps", 21))

        noise = None
        if "noise" in document:
            try:
                noise = NoiseModel.from_dict(document["noise"])
            except NoiseModelError as e:
                raise ConfigValidationError(f"noise: {e}")

        kwargs: Dict[str, Any] = {
            key: document[key]
            for key in ("mode", "shots", "repetitions", "seed", "branch")
            if key in document
        }
        return SweepConfig(
            scheme=document["scheme"],
            alpha_values=alpha_values,
            phi_values=phi_values,
            noise=noise,
            **kwargs,
        )


def _safe_load(content: str) -> Any:
    # JSON first: YAML 1.1 reads exponent floats such as 1e-05 as strings.
    try:
        return json.loads(content)
    except json.JSONDecodeError as e:
        json_error = e

    try:
        return yaml.safe_load(content)
    except yaml.YAMLError as e:
        if content.lstrip().startswith(("{", "[")):
            raise ConfigParsingError(
                f"Failed to parse config at line {json_error.lineno}, column {json_error.colno}",
                json_error.msg,
            )
        mark = getattr(e, "problem_mark", None)
        if mark is not None:
            raise ConfigParsingError(
                f"Failed to parse config at line {mark.line + 1}, column {mark.column + 1}",
                getattr(e, "problem", None) or str(e),
            )
        raise ConfigParsingError("Failed to parse config", str(e))


def _validate(document: Any, schema: Dict[str, Any]) -> None:
    try:
        jsonschema.validate(document, schema)
    except jsonschema.ValidationError as e:
        error_path = ".".join(str(p) for p in e.absolute_path) if e.absolute_path else "root"
        raise ConfigValidationError(f"Invalid field {error_path}: {e.message}")
    except jsonschema.SchemaError as e:
        raise ConfigValidationError("Invalid schema definition", str(e))


def load_config(path: str) -> SweepConfig:
    """Read, validate and build a sweep config from ``path``."""
    parser = ConfigParser()
    config = parser.build(parser.parse_file(path))
    logger.info("Loaded %s config from %s (%d points)", config.scheme.value, path, config.point_count)
    return config


def load_noise_model(path: str) -> NoiseModel:
    """Read a noise model from a bare noise document or a full sweep config."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            content = f.read()
    except IOError as e:
        raise ConfigParsingError(f"Failed to read file {path}", str(e))

    document = _safe_load(content)

    if isinstance(document, dict) and "scheme" in document:
        ConfigParser().validate(document)
        if "noise" not in document:
            raise ConfigValidationError(f"Config {path} has no noise field")
        document = document["noise"]
    elif document is None:
        raise ConfigParsingError(f"Empty noise file: {path}")
    else:
        _validate(document, get_noise_model_schema())

    try:
        return NoiseModel.from_dict(document)
    except NoiseModelError as e:
        raise ConfigValidationError(f"noise: {e}")


def write_config(config: SweepConfig, path: str) -> None:
    """Write ``config`` as a JSON document that :func:`load_config` reads back unchanged."""
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(config.to_dict(), f, indent=2)
            f.write("\n")
    except IOError as e:
        raise OutputError(f"Failed to write config {path}", str(e))


def bundled_config_path(name: str = "melbourne_q8_q9_q10.json") -> str:
    """Path of a config file shipped with the package."""
    path = os.path.join(DATA_DIR, name)
    if not os.path.exists(path):
        raise ConfigParsingError(f"No bundled config named {name}")
    return path
