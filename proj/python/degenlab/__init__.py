"""Numerical experiments for degenerate elliptic equations."""

import json

from . import _core
from ._core import (
    ComputationError,
    DomainError,
    critical_source_exponent,
    eval_f,
    eval_u,
    kernel,
    sha256_hex,
)

__version__ = _core.__version__
SCHEMA_VERSION = _core.SCHEMA_VERSION


class ConfigError(ValueError):
    def __init__(self, errors):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


def validate(config):
    return _core.validate_config(json.dumps(config))


def execute(config):
    """Run a configuration in memory. Returns (report, sweep_csv); nothing is written."""
    errors = validate(config)
    if errors:
        raise ConfigError(errors)
    report, sweep, _ = _core.execute(json.dumps(config))
    return json.loads(report), sweep


def run(config):
    """Write report.json, manifest.json and optional sweep.csv. Returns the exit code."""
    code, _ = _core.run(json.dumps(config))
    return code


def exponents(n, p, q, s, gamma=2):
    report, _ = execute({"command": "exponents", "params": {"n": n, "p": p, "q": q, "s": s, "gamma": gamma}})
    return report["result"]


__all__ = [
    "ComputationError",
    "ConfigError",
    "DomainError",
    "SCHEMA_VERSION",
    "critical_source_exponent",
    "eval_f",
    "eval_u",
    "execute",
    "exponents",
    "kernel",
    "run",
    "sha256_hex",
    "validate",
]
