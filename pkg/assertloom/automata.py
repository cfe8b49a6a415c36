#!/usr/bin/env python3
"""
automata.py
-----------
Buchi automata for behavioural similarity.

ltl_to_buchi() runs a tableau expansion: a state is the set of formulas that
must hold from the current position, and expanding it yields covers
(literal guard, next-state obligations). Every Until/Finally contributes a
generalized acceptance set of transitions (those that do not postpone it),
degeneralized with a level counter into a single set of accepting states.

accepts() propagates the reachable states through the lasso prefix and then
looks for an accepting state on a cycle of the (state x loop position) product,
using strongly connected components from scipy.
"""

import logging
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import AutomatonBudgetError, PoolMismatchError
from .expr import Atom, Not, make_and
from .hashing import hash16
from .ltl import Bool, Finally, Globally, LAnd, LOr, Lit, Next, Release, Until, ltl_atoms, to_text

logger = logging.getLogger(__name__)

DEFAULT_ATOM_BUDGET = 16


@dataclass(frozen=True)
class Lasso:
    atoms: tuple
    prefix: tuple
    loop: tuple

    def __post_init__(self):
        if not self.loop:
            raise ValueError("Lasso loop must be non-empty")

    @property
    def key(self):
        return (self.prefix, self.loop)

    def project(self, atoms):
        """Re-encodes the letters over another atom order; missing atoms read 0."""
        if tuple(atoms) == self.atoms:
            return self
        source = {name: bit for bit, name in enumerate(self.atoms)}
        moves = [(source[name], j) for j, name in enumerate(atoms) if name in source]

        def remap(letter):
            return sum(((letter >> src) & 1) << dst for src, dst in moves)

        return Lasso(tuple(atoms), tuple(remap(x) for x in self.prefix), tuple(remap(x) for x in self.loop))


@dataclass
class BuchiAutomaton:
    states: list
    alphabet_atoms: tuple
    transitions: list = field(default_factory=list)  # (src, pos_mask, neg_mask, dst)
    initial: int = 0
    accepting: frozenset = frozenset()

    def __post_init__(self):
        self._out = None

    def outgoing(self, state):
        if self._out is None:
            self._out = [[] for _ in self.states]
            for src, pos, neg, dst in self.transitions:
                self._out[src].append((pos, neg, dst))
        return self._out[state]

    def guard(self, pos, neg):
        """The BoolExpr a letter must satisfy to take a transition."""
        literals = []
        for j, name in enumerate(self.alphabet_atoms):
            if pos >> j & 1:
                literals.append(Atom(name))
            elif neg >> j & 1:
                literals.append(Not(Atom(name)))
        return make_and(literals)

    def step(self, current, letter):
        reached = set()
        for state in current:
            for pos, neg, dst in self.outgoing(state):
                if letter & pos == pos and letter & neg == 0:
                    reached.add(dst)
        return reached


def _untils(f, found):
    if isinstance(f, (Until, Finally)):
        found.add(f)
    if isinstance(f, (LAnd, LOr)):
        for c in f.children:
            _untils(c, found)
    elif isinstance(f, (Next, Globally, Finally)):
        _untils(f.child, found)
    elif isinstance(f, (Until, Release)):
        _untils(f.lhs, found)
        _untils(f.rhs, found)
    return found


def _expand(obligations):
    """
    Tableau covers of a set of formulas: list of (literals, next, processed).
    """
    covers = []
    stack = [(list(obligations), frozenset(), frozenset(), frozenset())]
    while stack:
        todo, literals, nxt, processed = stack.pop()
        dead = False
        while todo and not dead:
            f = todo.pop()
            if f in processed:
                continue
            processed = processed | {f}
            if isinstance(f, Bool):
                dead = not f.value
            elif isinstance(f, Lit):
                if Lit(f.name, not f.positive) in literals:
                    dead = True
                literals = literals | {f}
            elif isinstance(f, LAnd):
                todo.extend(f.children)
            elif isinstance(f, LOr):
                for child in f.children[1:]:
                    stack.append((todo + [child], literals, nxt, processed))
                todo.append(f.children[0])
            elif isinstance(f, Next):
                nxt = nxt | {f.child}
            elif isinstance(f, Globally):
                todo.append(f.child)
                nxt = nxt | {f}
            elif isinstance(f, Finally):
                stack.append((list(todo), literals, nxt | {f}, processed))
                todo.append(f.child)
            elif isinstance(f, Until):
                stack.append((todo + [f.lhs], literals, nxt | {f}, processed))
                todo.append(f.rhs)
            elif isinstance(f, Release):
                stack.append((todo + [f.rhs], literals, nxt | {f}, processed))
                todo.extend((f.lhs, f.rhs))
        if not dead:
            covers.append((literals, nxt, processed))
    return covers


def _fulfils(processed, until):
    goal = until.child if isinstance(until, Finally) else until.rhs
    return until not in processed or goal in processed


def ltl_to_buchi(f, atom_budget=DEFAULT_ATOM_BUDGET):
    atoms = tuple(sorted(ltl_atoms(f)))
    if len(atoms) > atom_budget:
        logger.warning("Automaton construction refused: %d atoms exceed budget %d", len(atoms), atom_budget)
        raise AutomatonBudgetError(f"{len(atoms)} atoms exceed budget {atom_budget}")
    bit = {name: j for j, name in enumerate(atoms)}
    untils = sorted(_untils(f, set()), key=to_text)
    k = len(untils)

    expansions = {}
    labels = []
    index = {}
    transitions = []
    accepting = set()

    def state_id(obligations, level):
        key = (obligations, level)
        if key not in index:
            index[key] = len(labels)
            labels.append(key)
            if level == k:
                accepting.add(index[key])
            queue.append(key)
        return index[key]

    queue = deque()
    initial = state_id(frozenset((f,)), 0)
    while queue:
        obligations, level = queue.popleft()
        src = index[(obligations, level)]
        if obligations not in expansions:
            expansions[obligations] = _expand(obligations)
        start = 0 if level == k else level
        for literals, nxt, processed in expansions[obligations]:
            pos = sum(1 << bit[lit.name] for lit in literals if lit.positive)
            neg = sum(1 << bit[lit.name] for lit in literals if not lit.positive)
            reached = start
            while reached < k and _fulfils(processed, untils[reached]):
                reached += 1
            transitions.append((src, pos, neg, state_id(nxt, reached)))

    aut = BuchiAutomaton(labels, atoms, transitions, initial, frozenset(accepting))
    logger.debug("Built automaton for %s: %d states, %d transitions", to_text(f), len(labels), len(transitions))
    return aut


def accepts(aut, lam):
    lam = lam.project(aut.alphabet_atoms)
    current = {aut.initial}
    for letter in lam.prefix:
        current = aut.step(current, letter)
        if not current:
            return False

    m = len(lam.loop)
    start = [(q, 0) for q in sorted(current)]
    seen = set(start)
    queue = deque(start)
    edges = []
    while queue:
        q, i = queue.popleft()
        letter = lam.loop[i]
        for pos, neg, dst in aut.outgoing(q):
            if letter & pos == pos and letter & neg == 0:
                target = (dst, (i + 1) % m)
                edges.append(((q, i), target))
                if target not in seen:
                    seen.add(target)
                    queue.append(target)
    if not edges:
        return False

    nodes = {node: n for n, node in enumerate(sorted(seen))}
    rows = [nodes[a] for a, _ in edges]
    cols = [nodes[b] for _, b in edges]
    graph = csr_matrix((np.ones(len(edges)), (rows, cols)), shape=(len(nodes), len(nodes)))
    _, labels = connected_components(graph, directed=True, connection="strong")
    sizes = np.bincount(labels)
    looping = {nodes[a] for a, b in edges if a == b}
    for (q, _), n in nodes.items():
        if q in aut.accepting and (sizes[labels[n]] > 1 or n in looping):
            return True
    return False


def sample_lassos(ap, count, seed, prefix_max=4, loop_max=4, max_attempts=None):
    """
    Deterministic pool of distinct lassos over ap. When the space is too small
    the pool is capped after a bounded number of retries.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    ap = tuple(ap)
    rng = np.random.default_rng(seed)
    max_attempts = max_attempts or count * 20
    pool = []
    seen = set()
    attempts = 0
    while len(pool) < count and attempts < max_attempts:
        attempts += 1
        prefix_len = int(rng.integers(0, prefix_max + 1))
        loop_len = int(rng.integers(1, loop_max + 1))
        bits = rng.integers(0, 2, size=(prefix_len + loop_len, len(ap)))
        letters = tuple(sum(int(b) << j for j, b in enumerate(row)) for row in bits)
        lam = Lasso(ap, letters[:prefix_len], letters[prefix_len:])
        if lam.key in seen:
            continue
        seen.add(lam.key)
        pool.append(lam)
    if len(pool) < count:
        logger.warning("Lasso pool over %d atoms capped at %d of %d requested", len(ap), len(pool), count)
    return pool


def pool_ids(pool):
    return tuple(hash16(f"{lam.atoms}|{lam.prefix}|{lam.loop}") for lam in pool)


@dataclass(frozen=True, eq=False)
class AcceptanceVector:
    lasso_ids: tuple
    bits: np.ndarray

    def __post_init__(self):
        if len(self.bits) != len(self.lasso_ids):
            raise ValueError("bits and lasso_ids differ in length")

    def _check(self, other):
        if self.lasso_ids != other.lasso_ids:
            raise PoolMismatchError("acceptance vectors come from different lasso pools")

    def conjoin(self, other):
        self._check(other)
        return AcceptanceVector(self.lasso_ids, self.bits & other.bits)

    def counterexample(self, other):
        """Index of the first lasso the two vectors disagree on, or None."""
        self._check(other)
        diff = np.flatnonzero(self.bits != other.bits)
        return int(diff[0]) if len(diff) else None


def vector_from(predicate, pool, ids=None):
    bits = np.fromiter((predicate(lam) for lam in pool), dtype=bool, count=len(pool))
    return AcceptanceVector(ids if ids is not None else pool_ids(pool), bits)


def acceptance_vector(aut, pool, ids=None):
    return vector_from(lambda lam: accepts(aut, lam), pool, ids)


def jaccard(v1, v2):
    v1._check(v2)
    union = np.count_nonzero(v1.bits | v2.bits)
    if union == 0:
        return 1.0
    return np.count_nonzero(v1.bits & v2.bits) / union


def overlap(v1, v2):
    """
    |A & B| / min(|A|, |B|). Equals 1 whenever one accepted set contains the
    other, so an assertion and a weakening of it score 1. Two empty sets score
    1, one empty set scores 0.
    """
    v1._check(v2)
    smaller = min(np.count_nonzero(v1.bits), np.count_nonzero(v2.bits))
    if smaller == 0:
        return 1.0 if not (v1.bits.any() or v2.bits.any()) else 0.0
    return np.count_nonzero(v1.bits & v2.bits) / smaller


LASSO_MEASURE_FUNCTIONS = {"overlap": overlap, "jaccard": jaccard}
