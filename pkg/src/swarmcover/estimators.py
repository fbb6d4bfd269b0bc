"""Scikit-learn style estimator facade.

The generators follow the familiar fit/attributes shape: hyper
parameters go to ``__init__`` unchanged, ``fit`` takes a system model
(or model text) instead of a data matrix, and results land in trailing
underscore attributes.  ``get_params``/``set_params`` and ``clone`` work
as usual, which makes seed sweeps and grid experiments one-liners.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator

from .generator import generate
from .model import SystemModel, as_model
from .mopso import SwarmConfig
from .verify import greedy_baseline

__all__ = ["SwarmGenerator", "GreedyGenerator"]


class SwarmGenerator(BaseEstimator):
    """Covering suite generator backed by the particle swarm.

    After ``fit``, ``suite_`` holds the generated :class:`TestSuite` and
    ``report_`` the full generation report.
    """

    def __init__(
        self,
        particles: int = 80,
        workers: int = 8,
        inertia: float = 0.7,
        c1: float = 1.5,
        c2: float = 1.5,
        max_iterations: int = 500,
        stagnation_window: int = 30,
        retries: int = 3,
        timeout: float | None = None,
        seed: int = 0,
    ):
        self.particles = particles
        self.workers = workers
        self.inertia = inertia
        self.c1 = c1
        self.c2 = c2
        self.max_iterations = max_iterations
        self.stagnation_window = stagnation_window
        self.retries = retries
        self.timeout = timeout
        self.seed = seed

    def _config(self) -> SwarmConfig:
        return SwarmConfig(
            particles=self.particles,
            workers=self.workers,
            inertia=self.inertia,
            c1=self.c1,
            c2=self.c2,
            max_iterations=self.max_iterations,
            stagnation_window=self.stagnation_window,
            retries=self.retries,
            timeout=self.timeout,
            rng_seed=self.seed,
        )

    def fit(self, model: SystemModel | str, y=None) -> "SwarmGenerator":
        model = as_model(model)
        self.report_ = generate(model, self._config())
        self.suite_ = self.report_.suite
        self.n_rows_ = self.suite_.size
        return self


class GreedyGenerator(BaseEstimator):
    """Seeded greedy baseline generator with the same estimator shape."""

    def __init__(self, seed: int = 0):
        self.seed = seed

    def fit(self, model: SystemModel | str, y=None) -> "GreedyGenerator":
        model = as_model(model)
        self.suite_ = greedy_baseline(model, seed=self.seed)
        self.n_rows_ = self.suite_.size
        return self
