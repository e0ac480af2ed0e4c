"""Exact branch-and-cut solver for the multiple depot ring-star problem."""

import json as _json

from ._mdrsp import (
    Instance,
    MdrspError,
    brute_force_opt,
    check_solution,
    separate,
    verify_dimension,
)
from ._mdrsp import solve as _solve

__all__ = [
    "Instance",
    "MdrspError",
    "brute_force_opt",
    "check_solution",
    "separate",
    "solve",
    "verify_dimension",
]


def solve(instance, time_limit=7200.0, seed=0, heuristic=True, log=False):
    """Solve an Instance to proven optimality; returns the report as a dict."""
    return _json.loads(
        _solve(instance, time_limit=time_limit, seed=seed,
               heuristic=heuristic, log=log)
    )
