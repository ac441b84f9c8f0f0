"""Streaming identity testing in Kolmogorov distance."""

import json as _json

from ._core import (
    DomainError,
    InsufficientSamples,
    IoError,
    Model,
    ParseError,
    StateError,
    TesterConfig,
    UnsupportedModel,
    amplified_test,
    binomial_tail_exact,
    chernoff_bounds,
    dkw_threshold,
    dyadic_decompose,
    exact_kdistance,
    ks_statistic,
    ks_test,
    lemma1_witness,
    level_count,
    level_params,
    memory_report,
    required_samples,
    run_trial,
    wedge_perturb,
)
from ._core import run_experiment_json as _run_experiment_json

__version__ = "0.1.0"


def run_experiment(plan, with_timing=False):
    """Run an experiment plan (dict or JSON string) and return the CSV text."""
    if not isinstance(plan, str):
        plan = _json.dumps(plan)
    return _run_experiment_json(plan, with_timing)


__all__ = [name for name in dir() if not name.startswith("_")]
