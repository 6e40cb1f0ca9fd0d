"""Flat ``key = value`` experiment configuration.

Values are parsed against the type of the documented default: ints, floats,
bools (true/false), strings, and comma-separated tuples of numbers.  The
rendered form is embedded verbatim in every output header.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

OUTPUT_ENV = "LAPGAP_OUTPUT_DIR"
COMMON_DEFAULTS = {"trials": 100, "seed": 0, "workers": 1}


class ConfigError(ValueError):
    """Invalid or unknown configuration entry."""


def _parse_scalar(text: str, like):
    if isinstance(like, bool):
        low = text.lower()
        if low in ("true", "1", "yes"):
            return True
        if low in ("false", "0", "no"):
            return False
        raise ConfigError(f"expected a boolean, got {text!r}")
    if isinstance(like, int):
        try:
            return int(text)
        except ValueError:
            raise ConfigError(f"expected an integer, got {text!r}") from None
    if isinstance(like, float):
        try:
            return float(text)
        except ValueError:
            raise ConfigError(f"expected a number, got {text!r}") from None
    return text


def parse_value(text: str, like):
    text = text.strip()
    if isinstance(like, tuple):
        elem = like[0] if like else 0.0
        items = [t for t in text.split(",") if t.strip()]
        if not items:
            raise ConfigError("expected a nonempty comma-separated list")
        return tuple(_parse_scalar(t.strip(), elem) for t in items)
    return _parse_scalar(text, like)


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ",".join(format_value(x) for x in v)
    return str(v)


@dataclass
class ExperimentConfig:
    experiment: str
    params: dict = field(default_factory=dict)

    @property
    def trials(self) -> int:
        return self.params["trials"]

    @property
    def seed(self) -> int:
        return self.params["seed"]

    @property
    def workers(self) -> int:
        return self.params["workers"]

    def lines(self) -> list[str]:
        """Rendered config, one ``key = value`` per line; workers is omitted
        because results never depend on it."""
        out = [f"experiment = {self.experiment}"]
        out += [f"{k} = {format_value(v)}" for k, v in sorted(self.params.items()) if k != "workers"]
        return out

    def dumps(self) -> str:
        return "\n".join(self.lines()) + "\n"


def build_config(experiment: str, defaults: dict, overrides: dict | None = None) -> ExperimentConfig:
    """Merge ``overrides`` (strings or typed values) onto the defaults."""
    params = {**COMMON_DEFAULTS, **defaults}
    for key, raw in (overrides or {}).items():
        key = key.strip().replace("-", "_")
        if key not in params:
            raise ConfigError(f"unknown key {key!r} for experiment {experiment!r}")
        params[key] = parse_value(raw, params[key]) if isinstance(raw, str) else raw
    if params["trials"] < 1:
        raise ConfigError("trials must be at least 1")
    if params["seed"] < 0:
        raise ConfigError("seed must be nonnegative")
    if params["workers"] < 1:
        raise ConfigError("workers must be at least 1")
    return ExperimentConfig(experiment, params)


def parse_text(text: str) -> tuple[str | None, dict]:
    """Split config text into (experiment name, raw overrides).  '#' starts a comment."""
    name, raw = None, {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        k, v = (s.strip() for s in line.split("=", 1))
        if k == "experiment":
            name = v
        else:
            raw[k] = v
    return name, raw


def output_dir(explicit: str | os.PathLike | None = None) -> Path:
    return Path(explicit or os.environ.get(OUTPUT_ENV) or "lapgap-out")
