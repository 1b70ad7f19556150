"""Separating a Brownian component from a Levy signal: native bindings."""

import json

from . import _core
from ._core import (
    DegenerateInput,
    bridge_of,
    default_threshold,
    fit_rate,
    gaussian_increments,
    reorder_decompose,
    sup_bridge_error,
    threshold_decompose,
)

__version__ = _core.__version__


def _dump(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def simulate(spec, n, seed, replication=0):
    """Simulate X = Y + sigma W on n steps; spec is a composite spec dict or JSON text."""
    return _core.simulate(_dump(spec), n, seed, replication)


def run_experiment(config):
    """Run an experiment config (dict or JSON text); one dict per report."""
    return _core.run_experiment(_dump(config))


__all__ = [
    "DegenerateInput",
    "bridge_of",
    "default_threshold",
    "fit_rate",
    "gaussian_increments",
    "reorder_decompose",
    "run_experiment",
    "simulate",
    "sup_bridge_error",
    "threshold_decompose",
]
