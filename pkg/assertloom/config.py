#!/usr/bin/env python3
"""
config.py
---------
Configuration dataclasses with the default constants of the reduction flow.
CLI flags override individual fields; validate() rejects inconsistent values.
"""

import logging
import math
from dataclasses import asdict, dataclass, field

from .errors import WeightError

logger = logging.getLogger(__name__)

ATOM_COUNT_MODES = ("leaves", "per_assertion", "distinct")
LASSO_ENGINES = ("automaton", "direct")
LASSO_MEASURES = ("overlap", "jaccard")


def _positive(**values):
    for name, value in values.items():
        if value <= 0:
            logger.error("Configuration value %s must be positive, got %r", name, value)
            raise ValueError(f"{name} must be positive, got {value!r}")


@dataclass
class ClusterConfig:
    alpha: float = 0.4
    beta: float = 0.6
    threshold: float = 0.85
    min_pts: int = 2
    lasso_samples: int = 500
    prefix_max: int = 4
    loop_max: int = 4
    workers: int = 64
    coarse_partition: bool = True
    lasso_engine: str = "automaton"
    lasso_measure: str = "overlap"
    truth_table_limit: int = 20
    automaton_atom_budget: int = 16
    expansion_cap: int = 64
    embedder: str = "hash"
    embed_dim: int = 256

    @property
    def eps(self):
        return 1.0 - self.threshold

    def validate(self):
        if abs(self.alpha + self.beta - 1.0) > 1e-9:
            logger.error("Similarity weights alpha=%s beta=%s do not sum to 1", self.alpha, self.beta)
            raise WeightError(f"alpha + beta must equal 1 (got {self.alpha} + {self.beta})")
        if self.alpha < 0 or self.beta < 0:
            raise WeightError("alpha and beta must be non-negative")
        if not 0.0 <= self.threshold < 1.0:
            raise ValueError(f"threshold must lie in [0, 1), got {self.threshold}")
        if self.lasso_engine not in LASSO_ENGINES:
            raise ValueError(f"lasso_engine must be one of {LASSO_ENGINES}")
        if self.lasso_measure not in LASSO_MEASURES:
            raise ValueError(f"lasso_measure must be one of {LASSO_MEASURES}")
        if self.prefix_max < 0:
            raise ValueError("prefix_max must be >= 0")
        _positive(min_pts=self.min_pts, lasso_samples=self.lasso_samples, loop_max=self.loop_max,
                  workers=self.workers, embed_dim=self.embed_dim)
        return self

    def echo(self):
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "threshold": self.threshold,
            "lasso_samples": self.lasso_samples,
            "workers": self.workers,
            "embedder": self.embedder,
            "coarse_partition": self.coarse_partition,
            "lasso_engine": self.lasso_engine,
            "lasso_measure": self.lasso_measure,
        }


@dataclass
class RuleConfig:
    expansion_cap: int = 64
    sat_var_budget: int = 64
    certify_samples: int = 500
    refutation_samples: int = 500
    prefix_max: int = 4
    loop_max: int = 4
    seed: int = 0

    def validate(self):
        _positive(expansion_cap=self.expansion_cap, sat_var_budget=self.sat_var_budget,
                  certify_samples=self.certify_samples, refutation_samples=self.refutation_samples)
        return self

    def echo(self):
        return {"certify_samples": self.certify_samples, "rules_seed": self.seed}


@dataclass
class SearchConfig:
    exploration: float = math.sqrt(2)
    patience: int = 3
    max_depth: int = 12
    rollout_depth: int = 6
    iterations: int = 200
    seed: int = 0
    atom_count_mode: str = "leaves"

    def validate(self):
        _positive(exploration=self.exploration, patience=self.patience, max_depth=self.max_depth,
                  rollout_depth=self.rollout_depth, iterations=self.iterations)
        if self.atom_count_mode not in ATOM_COUNT_MODES:
            raise ValueError(f"atom_count_mode must be one of {ATOM_COUNT_MODES}")
        return self

    def echo(self):
        return {
            "mcts_iterations": self.iterations,
            "patience": self.patience,
            "atom_count_mode": self.atom_count_mode,
            "search_seed": self.seed,
        }


@dataclass
class PipelineConfig:
    cluster: ClusterConfig = field(default_factory=ClusterConfig)
    rules: RuleConfig = field(default_factory=RuleConfig)
    search: SearchConfig = field(default_factory=SearchConfig)
    seed: int = 0

    def validate(self):
        self.cluster.validate()
        self.rules.validate()
        self.search.validate()
        return self

    def echo(self):
        """Flat summary written into the report."""
        summary = {"seed": self.seed}
        for section in (self.cluster, self.rules, self.search):
            summary.update(section.echo())
        return summary

    def to_dict(self):
        return asdict(self)
