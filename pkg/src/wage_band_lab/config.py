"""Run configuration: INI files, command-line overrides, model building.

A run is configured by up to four flat INI sections (model, policy,
search, output), every key of which can also be set on the command
line; the command line wins. Unknown sections or keys are rejected
with a diagnostic naming the offender, so typos fail loudly instead
of silently running the defaults.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field

from .errors import ConfigError
from .model import ExampleModel, ModelParams, ParametricModel
from .optimizer import CONSTRAINTS, SearchSettings

ENV_THREADS = "WAGE_BAND_LAB_THREADS"

PARAMETRIC = "parametric"
EXAMPLE = "example"
VARIANTS = (PARAMETRIC, EXAMPLE)

_MODEL_KEYS: dict[str, type] = {
    "variant": str,
    "a": float,
    "b": float,
    "q": float,
    "rho": float,
    "beta": float,
    "A": float,
    "k": float,
    "t_floor": float,
    "z_min": float,
    "z_max": float,
    "ability_law": str,
}
# the closed-form variant only has a support and a statutory floor
_EXAMPLE_ONLY = {"variant", "z_min", "z_max", "t_floor"}

_POLICY_KEYS: dict[str, type] = {
    "omega": float,
    "constraint": str,
    "t_lo": float,
    "t_hi": float,
    "z_lo": float,
    "z_hi": float,
}

_SEARCH_KEYS: dict[str, type] = {
    "grid_points": int,
    "polish_evals": int,
    "pool_nodes": int,
    "tie_tol": float,
    "resolution": int,
    "threads": int,
}

_OUTPUT_KEYS: dict[str, type] = {
    "directory": str,
    "figures": bool,
}

_SCHEMA = {
    "model": _MODEL_KEYS,
    "policy": _POLICY_KEYS,
    "search": _SEARCH_KEYS,
    "output": _OUTPUT_KEYS,
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass(frozen=True)
class PolicySettings:
    """What the policymaker asks for: the weight, the constraint set,
    and (for solve/profile) an explicit band."""

    omega: float = 0.5
    constraint: str = "Full"
    t_lo: float | None = None
    t_hi: float | None = None
    z_lo: float | None = None
    z_hi: float | None = None


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "out"
    figures: bool = False


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs, already validated and merged."""

    variant: str = PARAMETRIC
    model_values: dict = field(default_factory=dict)
    policy: PolicySettings = PolicySettings()
    search: SearchSettings = SearchSettings()
    resolution: int = 40
    threads: int = 1
    output: OutputSettings = OutputSettings()

    def build_model(self):
        if self.variant == EXAMPLE:
            return ExampleModel(**self.model_values)
        return ParametricModel(ModelParams(**self.model_values))

    def model_params(self) -> ModelParams:
        if self.variant == EXAMPLE:
            raise ConfigError(
                "this command sweeps ModelParams fields and needs the"
                " parametric variant; got model variant 'example'")
        return ModelParams(**self.model_values)


def _coerce(raw, kind: type, where: str):
    if isinstance(raw, str):
        text = raw.strip()
        try:
            if kind is bool:
                low = text.lower()
                if low in _TRUE:
                    return True
                if low in _FALSE:
                    return False
                raise ValueError(text)
            return kind(text)
        except ValueError:
            raise ConfigError(
                f"config: value {text!r} for {where} is not a valid"
                f" {kind.__name__}") from None
    if kind is float and isinstance(raw, int):
        return float(raw)
    return raw


def load_config_file(path) -> dict[str, dict[str, object]]:
    """Parse and validate one INI file into typed section maps."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise ConfigError(f"config: {path} is not valid INI: {exc}") from None

    values: dict[str, dict[str, object]] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(
                f"config: unknown section [{section}] in {path}"
                f" (expected one of {', '.join(_SCHEMA)})")
        keys = _SCHEMA[section]
        bucket: dict[str, object] = {}
        for key, raw in parser.items(section):
            if key not in keys:
                raise ConfigError(
                    f"config: unknown key {key!r} in section [{section}]"
                    f" of {path}")
            bucket[key] = _coerce(raw, keys[key], f"[{section}] {key}")
        values[section] = bucket
    return values


def _threads_from_env() -> int | None:
    raw = os.environ.get(ENV_THREADS)
    if raw is None or raw.strip() == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(
            f"config: environment variable {ENV_THREADS}={raw!r} is not"
            " an integer") from None


def assemble(config_path=None, overrides=None) -> RunConfig:
    """Merge file values and command-line overrides into a RunConfig.

    `overrides` maps (section, key) to values; None entries mean the
    flag was not given. Precedence: command line, then the environment
    (threads only), then the file, then defaults.
    """
    values: dict[str, dict[str, object]] = {s: {} for s in _SCHEMA}
    if config_path is not None:
        for section, bucket in load_config_file(config_path).items():
            values[section].update(bucket)

    env_threads = _threads_from_env()
    if env_threads is not None:
        values["search"]["threads"] = env_threads

    for (section, key), value in (overrides or {}).items():
        if value is None:
            continue
        values[section][key] = _coerce(value, _SCHEMA[section][key],
                                       f"[{section}] {key}")

    model_values = dict(values["model"])
    variant = model_values.pop("variant", PARAMETRIC)
    if variant not in VARIANTS:
        raise ConfigError(
            f"config: model variant must be one of {', '.join(VARIANTS)};"
            f" got {variant!r}")
    if variant == EXAMPLE:
        for key in model_values:
            if key not in _EXAMPLE_ONLY:
                raise ConfigError(
                    f"config: key {key!r} does not apply to the example"
                    " variant (only z_min, z_max, t_floor do)")

    policy_values = dict(values["policy"])
    constraint = policy_values.get("constraint", "Full")
    if constraint not in CONSTRAINTS:
        raise ConfigError(
            f"config: constraint must be one of {', '.join(CONSTRAINTS)};"
            f" got {constraint!r}")
    policy = PolicySettings(**policy_values)

    search_values = dict(values["search"])
    resolution = search_values.pop("resolution", 40)
    threads = search_values.pop("threads", 1)
    if threads < 1:
        raise ConfigError("config: threads must be a positive integer")
    search = SearchSettings(**search_values)

    output = OutputSettings(**values["output"])
    return RunConfig(variant, model_values, policy, search,
                     int(resolution), int(threads), output)
