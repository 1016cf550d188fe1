"""NAMMD closeness and two-sample tests."""

import json

from ._core import (
    ConfigError,
    InfeasibleError,
    InputError,
    IoError,
    Kernel,
    NammdError,
    cross_gram,
    estimate,
    exact_nammd,
    fuse_test,
    gram_matrix,
    median_heuristic,
    mmd_dct,
    nammd_dct,
    permutation_test,
    select_kernel,
    tv_distance,
    uniform_with_tv,
)
from ._core import run_experiment as _run_experiment


def run_experiment(config):
    """Run a harness experiment. `config` is a dict or a JSON string; returns a list of row dicts."""
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(_run_experiment(text))


__all__ = [
    "ConfigError", "InfeasibleError", "InputError", "IoError", "Kernel", "NammdError",
    "cross_gram", "estimate", "exact_nammd", "fuse_test", "gram_matrix", "median_heuristic",
    "mmd_dct", "nammd_dct", "permutation_test", "run_experiment", "select_kernel",
    "tv_distance", "uniform_with_tv",
]
