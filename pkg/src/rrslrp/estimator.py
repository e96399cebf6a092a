"""Estimator-style front end so the solver composes with sklearn tooling.

All iteration controls are constructor parameters (``get_params`` /
``set_params`` / ``clone`` work as usual); ``fit`` validates the instance,
runs the Lagrangian loop, and exposes the incumbent through fitted
attributes.
"""

from __future__ import annotations

from typing import Optional

from sklearn.base import BaseEstimator

from .instance import Instance, check_instance
from .solver import SolverConfig, run


class LocationRoutingSolver(BaseEstimator):
    """Joint station-placement and vehicle-routing solver.

    Parameters mirror ``SolverConfig``.  After ``fit(instance)``:

    ``selection_``    frozenset of chosen station node ids
    ``routes_``       dict vehicle id -> VehicleRoute of the incumbent
    ``unserved_``     demands left to virtual vehicles
    ``best_upper_``, ``best_lower_``, ``gap_``  final bounds
    ``trace_``        per-iteration records
    ``status_``       "optimal", "feasible" or "no_feasible_incumbent"
    ``n_iter_``       iterations executed
    """

    def __init__(self, max_iterations: int = 50, termination_delta: float = 1e-6,
                 step_rule: str = "harmonic", step_scale: float = 1.0,
                 virtual_penalty: Optional[float] = None,
                 ordering_seed: Optional[int] = None):
        self.max_iterations = max_iterations
        self.termination_delta = termination_delta
        self.step_rule = step_rule
        self.step_scale = step_scale
        self.virtual_penalty = virtual_penalty
        self.ordering_seed = ordering_seed

    def fit(self, instance: Instance, y=None):
        check_instance(instance)
        config = SolverConfig(
            max_iterations=self.max_iterations,
            termination_delta=self.termination_delta,
            step_rule=self.step_rule,
            step_scale=self.step_scale,
            virtual_penalty=self.virtual_penalty,
            ordering_seed=self.ordering_seed,
        )
        result = run(instance, config)
        self.result_ = result
        self.selection_ = result.selection
        self.routes_ = result.routes
        self.unserved_ = result.unserved
        self.best_upper_ = result.best_upper
        self.best_lower_ = result.best_lower
        self.gap_ = result.gap
        self.trace_ = result.trace
        self.status_ = result.status
        self.n_iter_ = len(result.trace)
        return self

    def score(self, instance: Instance = None, y=None) -> float:
        """Negative best upper bound (higher is better), sklearn-style."""
        if not hasattr(self, "result_"):
            raise RuntimeError("call fit() first")
        return -self.best_upper_
