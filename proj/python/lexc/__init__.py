"""Python bindings for the lexc excursion library."""

import json

from ._lexc import (
    ConfigError,
    DomainError,
    InsufficientDataError,
    UnsupportedError,
    excursions,
    experiment_kinds,
    experiment_table,
    git_describe,
    height_lifetime_ratio_constant,
    normalize_config,
    pareto_limit_cdf,
    scale_function,
    simulate,
    stable_height_tail,
    stable_lifetime_tail,
    stable_scale_function,
)
from ._lexc import run_experiment as _run_experiment


def run_experiment(ini_text, seed=None, shards=None):
    """Run an experiment from INI text and return the summary dict."""
    return json.loads(_run_experiment(ini_text, seed, shards))


def load_text(path):
    with open(path, encoding="utf-8") as f:
        return f.read()


__all__ = [
    "ConfigError",
    "DomainError",
    "InsufficientDataError",
    "UnsupportedError",
    "excursions",
    "experiment_kinds",
    "experiment_table",
    "git_describe",
    "height_lifetime_ratio_constant",
    "load_text",
    "normalize_config",
    "pareto_limit_cdf",
    "run_experiment",
    "scale_function",
    "simulate",
    "stable_height_tail",
    "stable_lifetime_tail",
    "stable_scale_function",
]
