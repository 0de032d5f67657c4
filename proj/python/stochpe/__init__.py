"""Python front end of the stochpe simulator.

The heavy lifting happens in the compiled ``_core`` module; the helpers here
decode its JSON reports into dictionaries.
"""

import json

from ._core import (
    ConfigError,
    command,
    ou_mean_square,
    preset_text,
    presets,
    resolved_config,
    schema,
    simulate,
    verify_suites,
    version,
)
from . import _core

__all__ = [
    "ConfigError",
    "command",
    "ensemble",
    "growth_constants",
    "ou_mean_square",
    "preset_text",
    "presets",
    "resolved_config",
    "schema",
    "simulate",
    "verify",
    "verify_suites",
    "version",
]
__version__ = version()


def ensemble(preset="", config="", overrides=()):
    return json.loads(_core.ensemble_json(preset, config, list(overrides)))


def verify(suite, preset="", config="", overrides=()):
    return json.loads(_core.verify_json(suite, preset, config, list(overrides)))


def growth_constants(preset="", config="", overrides=()):
    return json.loads(_core.growth_constants_json(preset, config, list(overrides)))
