import logging
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Mapping, Optional

from blowuplab.ansatz.constraints import validate_params
from blowuplab.ansatz.types import BlowupParams
from blowuplab.core.errors import ConfigError, DomainError
from blowuplab.core.yaml_parser import BaseYamlParser, BaseYamlVisitor

from .types import ConfigKey, RunConfig

logger = logging.getLogger(__name__)

DEFAULTS_PATH = Path(__file__).parent / "defaults.yaml"
TYPES = ("int", "float", "bool", "path", "choice")


class DefaultsVisitor(BaseYamlVisitor[List[ConfigKey]]):
    def visit_key(self, key):
        name = self._get_or_die(key, "name")
        kind = self._get_or_die(key, "type")
        if kind not in TYPES:
            self._fail(f"Unknown type {kind} for key {name}")
        return ConfigKey(
            name,
            kind,
            self._get_or_die(key, "default"),
            self._get_or_else(key, "description", ""),
            self._get_or_else(key, "param", False),
            self._get_or_else(key, "min", None),
            self._get_or_else(key, "positive", False),
            tuple(self._get_or_else(key, "choices", ())),
        )

    def visit(self, defaults):
        return self._visit_list(self.visit_key, defaults, "keys", required=True)


class DefaultsParser(BaseYamlParser[List[ConfigKey]]):
    def get_visitor(self) -> DefaultsVisitor:
        return DefaultsVisitor()


@lru_cache(maxsize=None)
def _load(path: str) -> tuple:
    with open(path, "rb") as f:
        return tuple(DefaultsParser().parse(f)[0])


def load_defaults(path: Path = DEFAULTS_PATH) -> Dict[str, ConfigKey]:
    return {key.name: key for key in _load(str(path))}


def convert(key: ConfigKey, raw):
    """Converts a raw text or YAML value for one key, raising ConfigError when it does not fit"""
    text = str(raw).strip()
    try:
        if key.type == "int":
            value = int(text)
        elif key.type == "float":
            value = float(text)
        elif key.type == "bool":
            lowered = text.lower()
            if lowered not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(text)
            value = lowered in ("true", "1", "yes")
        elif key.type == "choice":
            if text not in key.choices:
                raise ValueError(f"expected one of {', '.join(key.choices)}")
            value = text
        else:
            value = text
    except ValueError as err:
        raise ConfigError(f"Cannot read {key.name}={text!r} as {key.type}: {err}")
    if key.minimum is not None and value < key.minimum:
        raise ConfigError(f"{key.name} must be at least {key.minimum}, got {value}")
    if key.positive and value <= 0:
        raise ConfigError(f"{key.name} must be positive, got {value}")
    return value


def parse_lines(text: str) -> Dict[str, str]:
    entries = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"Line {number}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        entries[key] = value
    return entries


def build_config(entries: Mapping[str, object], defaults: Optional[Dict[str, ConfigKey]] = None) -> RunConfig:
    defaults = load_defaults() if defaults is None else defaults
    unknown = sorted(set(entries) - set(defaults))
    if unknown:
        raise ConfigError(f"Unknown configuration keys: {', '.join(unknown)}")
    values = {name: convert(key, entries.get(name, key.default)) for name, key in defaults.items()}
    params = BlowupParams(**{name: values[name] for name, key in defaults.items() if key.param})
    try:
        validate_params(params, values["override"])
    except DomainError as err:
        raise ConfigError(str(err))
    h_table = Path(values["h_table"]) if values["h_table"] else None
    return RunConfig(
        values["subcommand"],
        params,
        values["nodes"],
        values["y_max"],
        values["x_max"],
        values["time_samples"],
        Path(values["output"]),
        values["seed"],
        values["override"],
        h_table,
        values["threshold"],
    )


def parse_config(text: str, overrides: Mapping[str, str] = None) -> RunConfig:
    """
    Reads key=value lines with # comments; keys not given take their documented defaults.
    Constraint failures raise ConstraintViolation unless override=true.
    """
    entries = parse_lines(text)
    entries.update(overrides or {})
    config = build_config(entries)
    logger.debug("Parsed configuration: %s", config)
    return config
