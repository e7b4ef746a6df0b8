"""Gauge-consistent truncation of a double-well dipole coupled to a cavity mode."""

import json

from . import _core
from ._core import *  # noqa: F401,F403
from ._core import GaugetruncError

__all__ = [name for name in dir(_core) if not name.startswith("_")]
__all__ += ["run", "validate", "default_config", "GaugetruncError"]


def default_config():
    return json.loads(_core.default_config())


def validate(**config):
    """List of issues (dicts with line, key, message, hint); empty when valid."""
    return _core.validate_config(json.dumps(config))


def run(experiment, **overrides):
    """Run one experiment; returns tables (numpy data) and provenance as a dict."""
    config = dict(overrides, experiment=experiment)
    result = _core.run_experiment(json.dumps(config))
    result["provenance"] = json.loads(result["provenance"])
    return result
