#!/usr/bin/env python3
"""
mcts.py
-------
Per-cluster rule-sequence search.

A state is an assertion set, an action is one of the five rules, and the
reward of a step is the drop in assertion count plus the drop in atom count.
UCT search explores rule orders:

    selection   walk the tree by UCT until a node with an untried rule
    expansion   add that child (Rule 1 is always tried first)
    simulation  apply random rules until none changes the set
    backprop    add the trajectory reward to every edge on the path

The search stops once the best trajectory reward has not improved for
`patience` iterations, or at the iteration cap, and returns the terminal
set of the best trajectory.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .config import PipelineConfig, SearchConfig
from .hashing import derive_seed
from .rules import RULE_ORDER, RuleEngine, RuleId, atom_count, state_key

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepRecord:
    rule: RuleId
    delta_assertions: int
    delta_atoms: int
    changed: bool = True

    @property
    def reward(self):
        return self.delta_assertions + self.delta_atoms


@dataclass(frozen=True)
class ReductionState:
    assertions: tuple
    assertion_count: int
    atom_count: int
    history: tuple = ()
    steps: tuple = ()

    @classmethod
    def initial(cls, assertions, mode="leaves"):
        assertions = tuple(assertions)
        return cls(assertions, len(assertions), atom_count(assertions, mode))

    @cached_property
    def key(self):
        return state_key(self.assertions)

    @property
    def depth(self):
        return len(self.history)


def reward(prev, nxt):
    return (prev.assertion_count - nxt.assertion_count) + (prev.atom_count - nxt.atom_count)


def uct_score(q, parent_visits, edge_visits, c=math.sqrt(2)):
    return q + c * math.sqrt(math.log(parent_visits) / edge_visits)


class SearchNode:
    def __init__(self, state, edge=None, parent=None):
        self.state = state
        self.edge = edge
        self.parent = parent
        self.children = {}
        self.edge_visits = {}
        self.edge_value = {}

    @property
    def visits(self):
        """Creation visit plus one per backpropagated trajectory through an edge."""
        return 1 + sum(self.edge_visits.values())

    @property
    def cumulative_reward(self):
        root = self
        while root.parent is not None:
            root = root.parent
        return reward(root.state, self.state)

    def q(self, rule):
        n = self.edge_visits.get(rule, 0)
        return self.edge_value.get(rule, 0.0) / n if n else 0.0

    def untried(self):
        return [rule for rule in RULE_ORDER if self.edge_visits.get(rule, 0) == 0]


def uct_select(node, c=math.sqrt(2)):
    """
    Unvisited rules first (in rule order), then argmax of Q + c*sqrt(ln N / N_a).
    Ties keep the earlier rule.
    """
    untried = node.untried()
    if untried:
        return untried[0]
    best, best_score = None, -math.inf
    for rule in RULE_ORDER:
        score = uct_score(node.q(rule), node.visits, node.edge_visits[rule], c)
        if score > best_score:
            best, best_score = rule, score
    return best


@dataclass
class SearchResult:
    assertions: tuple
    best_reward: int
    iterations: int
    history: tuple
    steps: tuple
    r_max_trace: list = field(default_factory=list)
    certificates: int = 0
    incidents: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def rule_counts(self):
        counts = {rule.value: 0 for rule in RULE_ORDER}
        for step in self.steps:
            if step.changed:
                counts[step.rule.value] += 1
        return counts

    @property
    def rule_deltas(self):
        deltas = {rule.value: 0 for rule in RULE_ORDER}
        for step in self.steps:
            deltas[step.rule.value] += step.delta_assertions
        return deltas


class ClusterSearch:
    """
    One search tree over one cluster. Transitions are memoized by (state
    content, rule), so transposed rule orders reuse the same certified result.
    """

    def __init__(self, cluster, config=None, rule_config=None, label=""):
        self.config = (config or SearchConfig()).validate()
        self.engine = RuleEngine(rule_config, self.config.atom_count_mode, label)
        self.label = label
        self.rng = np.random.default_rng(self.config.seed)
        self.root = SearchNode(ReductionState.initial(cluster, self.config.atom_count_mode))
        self.r_max = 0
        self.best = self.root.state
        self.r_max_trace = []
        self.certificates = 0
        self._memo = {}

    def transition(self, state, rule):
        key = (state.key, rule)
        if key not in self._memo:
            outcome, certificate = self.engine.apply_certified(rule, state.assertions)
            if certificate is not None:
                self.certificates += 1
            self._memo[key] = outcome.new_set
        new_set = self._memo[key]
        count = len(new_set)
        atoms = atom_count(new_set, self.config.atom_count_mode)
        if count > state.assertion_count:
            logger.error("%s grew cluster %s from %d to %d", rule.value, self.label, state.assertion_count, count)
            raise AssertionError("assertion count increased along a trajectory")
        changed = state_key(new_set) != state.key
        step = StepRecord(rule, state.assertion_count - count, state.atom_count - atoms, changed)
        return ReductionState(new_set, count, atoms, state.history + (rule,), state.steps + (step,))

    def rollout(self, state):
        noops = set()
        for _ in range(self.config.rollout_depth):
            candidates = [rule for rule in RULE_ORDER if rule not in noops]
            if not candidates:
                break
            rule = candidates[int(self.rng.integers(len(candidates)))]
            nxt = self.transition(state, rule)
            if nxt.key == state.key:
                noops.add(rule)
            else:
                noops.clear()
            state = nxt
        return state

    def one_iteration(self):
        node = self.root
        path = []
        while node.state.depth < self.config.max_depth:
            rule = uct_select(node, self.config.exploration)
            path.append((node, rule))
            if rule not in node.children:
                node.children[rule] = SearchNode(self.transition(node.state, rule), rule, node)
                node = node.children[rule]
                break
            node = node.children[rule]

        terminal = self.rollout(node.state)
        total = reward(self.root.state, terminal)
        stepwise = sum(step.reward for step in terminal.steps)
        prefix = sum(step.reward for step in node.state.steps)
        if total != stepwise or node.cumulative_reward != prefix:
            logger.error("Reward mismatch in cluster %s: %d vs %d (tree prefix %d vs %d)",
                         self.label, total, stepwise, node.cumulative_reward, prefix)
            raise AssertionError("trajectory reward does not telescope")

        for parent, rule in path:
            parent.edge_visits[rule] = parent.edge_visits.get(rule, 0) + 1
            parent.edge_value[rule] = parent.edge_value.get(rule, 0.0) + total
        return total, terminal

    def run(self):
        start = time.perf_counter()
        stale = 0
        iterations = 0
        while stale < self.config.patience and iterations < self.config.iterations:
            total, terminal = self.one_iteration()
            iterations += 1
            if total > self.r_max:
                self.r_max, self.best = total, terminal
                stale = 0
            else:
                stale += 1
            self.r_max_trace.append(self.r_max)
        logger.debug("Cluster %s: %d iterations, best reward %d, %d -> %d assertions",
                     self.label, iterations, self.r_max, self.root.state.assertion_count,
                     self.best.assertion_count)
        return SearchResult(
            assertions=self.best.assertions,
            best_reward=self.r_max,
            iterations=iterations,
            history=self.best.history,
            steps=self.best.steps,
            r_max_trace=list(self.r_max_trace),
            certificates=self.certificates,
            incidents=list(self.engine.incidents),
            elapsed=time.perf_counter() - start,
        )

    def run_rule1_only(self):
        """Singletons: Rule 1 to a fixpoint, no search."""
        start = time.perf_counter()
        state = self.root.state
        while True:
            nxt = self.transition(state, RuleId.R1)
            if nxt.key == state.key:
                break
            state = nxt
        steps = tuple(s for s in state.steps if s.changed)
        return SearchResult(state.assertions, reward(self.root.state, state), 0, state.history, steps,
                            certificates=self.certificates, incidents=list(self.engine.incidents),
                            elapsed=time.perf_counter() - start)


def transition(state, rule, engine=None, atom_count_mode="leaves"):
    """Applies one certified rule to a state; rollbacks leave the set unchanged."""
    search = ClusterSearch(state.assertions, SearchConfig(atom_count_mode=atom_count_mode))
    if engine is not None:
        search.engine = engine
    search.root = SearchNode(state)
    return search.transition(state, RuleId(rule))


def mcts_reduce(cluster, config=None, rule_config=None, label=""):
    if not cluster:
        raise ValueError("mcts_reduce needs a non-empty cluster")
    search = ClusterSearch(cluster, config, rule_config, label)
    if len(cluster) == 1:
        return search.run_rule1_only()
    return search.run()


def _fixpoint(cluster, rules, rule_config, mode):
    engine = RuleEngine(rule_config, mode)
    current = tuple(cluster)
    changed = True
    while changed:
        changed = False
        for rule in rules:
            outcome, _ = engine.apply_certified(rule, current)
            if outcome.changed:
                current = outcome.new_set
                changed = True
    return current


def single_rule_baseline(cluster, rule, rule_config=None, atom_count_mode="leaves"):
    return _fixpoint(cluster, [RuleId(rule)], rule_config, atom_count_mode)


def greedy_baseline(cluster, rule_config=None, atom_count_mode="leaves"):
    """R1..R5 round robin until a full round changes nothing."""
    return _fixpoint(cluster, RULE_ORDER, rule_config, atom_count_mode)


@dataclass
class CorpusReduction:
    assertions: list
    results: list
    elapsed: float

    @property
    def rule_counts(self):
        counts = {rule.value: 0 for rule in RULE_ORDER}
        for result in self.results:
            for name, n in result.rule_counts.items():
                counts[name] += n
        return counts

    @property
    def rule_deltas(self):
        deltas = {rule.value: 0 for rule in RULE_ORDER}
        for result in self.results:
            for name, n in result.rule_deltas.items():
                deltas[name] += n
        return deltas


def reduce_corpus(clusters, corpus, config=None):
    """
    Reduces every cluster independently (seeded by the global seed and the
    cluster index) and concatenates the results in cluster order.
    """
    config = config or PipelineConfig()
    start = time.perf_counter()
    by_id = {a.id: a for a in corpus}
    members = [[by_id[i] for i in cluster] for cluster in getattr(clusters, "clusters", clusters)]
    if not members:
        return CorpusReduction([], [], 0.0)

    def job(index):
        search = replace(config.search, seed=derive_seed(config.seed, index))
        return mcts_reduce(members[index], search, config.rules, label=str(index))

    with ThreadPoolExecutor(max_workers=config.cluster.workers) as executor:
        results = list(executor.map(job, range(len(members))))

    reduced = [a for result in results for a in result.assertions]
    elapsed = time.perf_counter() - start
    logger.info("Reduced %d clusters: %d -> %d assertions in %.2fs",
                len(members), len(by_id), len(reduced), elapsed)
    return CorpusReduction(reduced, results, elapsed)
