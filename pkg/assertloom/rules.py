#!/usr/bin/env python3
"""
rules.py
--------
The five reduction rules as set-to-set transformations, and the lasso
certificate that guards every application.

  R1_IntraSimplify     align, simplify buckets, prune entailed consequent literals
  R2_PostConjunction   same antecedent key -> one assertion, consequents ANDed
  R3_PreDisjunction    same consequent key -> antecedents ORed / ranges compacted
  R4_EquivalenceDedup  SAT-equivalent pairs keep the assertion with fewer atoms
  R5_ImplicationPrune  strictly implied assertions are deleted

Rules never merge across clocks. Any refused SAT query means "no rewrite".
New assertions get content ids `<rule>__<hash16 of printed form>`.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .assertion import (
    Assertion, AssertionKind, Delay, Sequence, atom_occurrences, atomic_propositions,
    normalize_sequence, print_assertion, range_product, sequence_key,
)
from .automata import pool_ids, sample_lassos, vector_from
from .config import RuleConfig
from .entailment import entails, equivalent, implies, satisfiable
from .errors import LtlConversionError, SatBudgetError, SoundnessIncident
from .expr import FALSE, TRUE, canonical_key, conjuncts, make_and, make_or
from .hashing import derive_seed, hash16
from .ltl import eval_on_lasso
from .simplify import simplify
from .temporal import (
    TimedExpansion, align, holds_on_lasso, is_alignable, rebuild, sequence_from_buckets, timed, to_ltl,
    window_formula,
)

logger = logging.getLogger(__name__)


class RuleId(str, Enum):
    R1 = "R1_IntraSimplify"
    R2 = "R2_PostConjunction"
    R3 = "R3_PreDisjunction"
    R4 = "R4_EquivalenceDedup"
    R5 = "R5_ImplicationPrune"

    @property
    def short(self):
        return self.name


RULE_ORDER = tuple(RuleId)


def content_id(rule, a):
    return f"{rule.short}__{hash16(print_assertion(a))}"


def is_falsum(a):
    """True when some consequent item is the constant 0."""
    return any(item == FALSE for item in normalize_sequence(a.consequent).items)


def atom_count(assertions, mode="leaves"):
    if mode == "leaves":
        return sum(atom_occurrences(a) for a in assertions)
    if mode == "distinct":
        return len(frozenset().union(*(atomic_propositions(a) for a in assertions)))
    return sum(len(atomic_propositions(a)) for a in assertions)


def state_key(assertions):
    return tuple(sorted((a.id, print_assertion(a)) for a in assertions))


@dataclass
class RuleOutcome:
    rule: RuleId
    new_set: tuple
    removed: list = field(default_factory=list)
    rewritten: list = field(default_factory=list)
    merged: list = field(default_factory=list)
    delta_assertions: int = 0
    delta_atoms: int = 0
    flags: list = field(default_factory=list)
    changed: bool = False

    @classmethod
    def unchanged(cls, rule, assertions):
        return cls(rule, tuple(assertions), flags=[a.id for a in assertions if is_falsum(a)])


@dataclass
class Certificate:
    rule: object
    passed: bool
    samples: int
    counterexample: object = None
    old_count: int = 0
    new_count: int = 0

    def summary(self):
        return {
            "rule": getattr(self.rule, "value", self.rule),
            "passed": self.passed,
            "samples": self.samples,
            "counterexample": None if self.counterexample is None else {
                "atoms": list(self.counterexample.atoms),
                "prefix": list(self.counterexample.prefix),
                "loop": list(self.counterexample.loop),
            },
        }


class RuleEngine:
    """
    Applies rules to one cluster. Window formulas and lasso vectors are cached
    per assertion content, so repeated applications inside a search are cheap.
    """

    def __init__(self, config=None, atom_count_mode="leaves", label=""):
        self.config = (config or RuleConfig()).validate()
        self.atom_count_mode = atom_count_mode
        self.label = label
        self.incidents = []
        self._windows = {}
        self._pools = {}
        self._vectors = {}
        self._refutations = {}

    # -- shared helpers -----------------------------------------------------

    def _outcome(self, rule, old, new, removed=(), rewritten=(), merged=()):
        new = tuple(new)
        changed = state_key(old) != state_key(new)
        return RuleOutcome(
            rule=rule,
            new_set=new if changed else tuple(old),
            removed=list(removed),
            rewritten=list(rewritten),
            merged=list(merged),
            delta_assertions=len(old) - len(new),
            delta_atoms=atom_count(old, self.atom_count_mode) - atom_count(new, self.atom_count_mode),
            flags=[a.id for a in new if is_falsum(a)],
            changed=changed,
        )

    def _alignable(self, a):
        return is_alignable(a, self.config.expansion_cap)

    def window(self, a):
        key = (a.clock, a.antecedent, a.consequent)
        if key not in self._windows:
            self._windows[key] = window_formula(a, self.config.expansion_cap)
        return self._windows[key]

    # -- Rule 1 ---------------------------------------------------------------

    def _simplify_one(self, a):
        """('keep'|'delete'|'rewrite', assertion or None)."""
        if range_product(a) != 1:
            return "keep", a
        budget = self.config.sat_var_budget
        exp = align(a, self.config.expansion_cap).expansions[0]
        pre = {k: simplify(e) for k, e in exp.pre_buckets.items()}
        pre = {k: e for k, e in pre.items() if e != TRUE}
        if any(e == FALSE for e in pre.values()):
            logger.debug("%s: vacuous antecedent", a.id)
            return "delete", None
        pre_formula = make_and(timed(e, k) for k, e in sorted(pre.items()))
        try:
            if not satisfiable(pre_formula, budget):
                logger.debug("%s: inconsistent antecedent", a.id)
                return "delete", None
        except SatBudgetError:
            return "keep", a

        post = {}
        falsum = False
        for k, bucket in sorted(exp.post_buckets.items()):
            kept = []
            for literal in conjuncts(simplify(bucket)):
                stamped = timed(literal, k)
                try:
                    if entails(pre_formula, stamped, budget):
                        continue
                    if not satisfiable(make_and([pre_formula, stamped]), budget):
                        falsum = True
                        break
                except SatBudgetError:
                    pass
                kept.append(literal)
            if falsum:
                break
            if kept:
                post[k] = simplify(make_and(kept))
        anchor = max(pre) if pre else 0
        if falsum:
            post = {anchor: FALSE}
        elif not post:
            logger.debug("%s: consequent entailed by antecedent", a.id)
            return "delete", None

        rebuilt = rebuild(TimedExpansion(pre, post, anchor), a.clock, a.id, a.kind)
        if print_assertion(rebuilt) == print_assertion(a):
            return "keep", a
        return "rewrite", rebuilt.with_id(content_id(RuleId.R1, rebuilt))

    def apply_rule1(self, s):
        new, removed, rewritten = [], [], []
        seen = set()
        for a in s:
            action, result = self._simplify_one(a)
            if action == "delete":
                removed.append(a.id)
                continue
            if result.id in seen:
                removed.append(a.id)
                continue
            seen.add(result.id)
            if action == "rewrite":
                rewritten.append((a.id, result.id))
            new.append(result)
        return self._outcome(RuleId.R1, s, new, removed, rewritten)

    # -- Rule 2 ---------------------------------------------------------------

    @staticmethod
    def _relative_buckets(seq):
        buckets = {}
        offset = 0
        for i, expr in enumerate(seq.items):
            if i > 0:
                offset += seq.delays[i - 1].lo
            buckets.setdefault(offset, []).append(expr)
        return buckets

    def apply_rule2(self, s):
        groups = {}
        for a in sorted(s, key=lambda x: x.id):
            if a.consequent.is_fixed:
                groups.setdefault((a.clock, sequence_key(a.antecedent)), []).append(a)
        replacement, merged = {}, []
        for (clock, _), members in groups.items():
            if len(members) < 2:
                continue
            buckets = {}
            for m in members:
                for k, items in self._relative_buckets(normalize_sequence(m.consequent)).items():
                    buckets.setdefault(k, []).extend(items)
            merged_buckets = {k: make_and(v) for k, v in buckets.items()}
            merged_buckets = {k: e for k, e in merged_buckets.items() if e != TRUE}
            consequent = normalize_sequence(sequence_from_buckets(merged_buckets, 0))
            kind = AssertionKind.PROPOSITIONAL if all(m.is_propositional for m in members) \
                else AssertionKind.IMPLICATION
            result = Assertion("", clock, members[0].antecedent, consequent, kind)
            result = result.with_id(content_id(RuleId.R2, result))
            ids = [m.id for m in members]
            merged.append((ids, result.id))
            replacement[ids[0]] = result
            for other in ids[1:]:
                replacement[other] = None
        new = self._substitute(s, replacement)
        return self._outcome(RuleId.R2, s, new, merged=merged)

    @staticmethod
    def _substitute(s, replacement):
        new = []
        seen = set()
        for a in s:
            result = replacement.get(a.id, a)
            if result is None or result.id in seen:
                continue
            seen.add(result.id)
            new.append(result)
        return new

    # -- Rule 3 ---------------------------------------------------------------

    @staticmethod
    def merge_antecedents(s1, s2):
        """
        Disjunction of two antecedents as one sequence, or None when they differ
        in more than one item or one overlapping/adjacent delay range.
        """
        s1, s2 = normalize_sequence(s1), normalize_sequence(s2)
        items1, items2 = s1.items, s2.items
        if len(items1) != len(items2):
            return None
        item_diff = [i for i in range(len(items1)) if canonical_key(items1[i]) != canonical_key(items2[i])]
        delay_diff = [i for i in range(len(s1.delays)) if s1.delays[i] != s2.delays[i]]
        items, delays = list(items1), list(s1.delays)
        if not delay_diff and len(item_diff) <= 1:
            for i in item_diff:
                items[i] = make_or([items1[i], items2[i]])
        elif not item_diff and len(delay_diff) == 1:
            i = delay_diff[0]
            a, b = s1.delays[i].lo, s1.delays[i].hi
            c, d = s2.delays[i].lo, s2.delays[i].hi
            if max(a, c) > min(b, d) + 1:
                return None
            delays[i] = Delay(min(a, c), max(b, d))
        else:
            return None
        return normalize_sequence(Sequence(items[0], tuple(zip(delays, items[1:]))))

    def apply_rule3(self, s):
        groups = {}
        for a in sorted(s, key=lambda x: x.id):
            if not a.is_propositional:
                groups.setdefault((a.clock, sequence_key(a.consequent)), []).append(a)
        replacement, merged = {}, []
        for members in groups.values():
            nodes = [(m, [m.id]) for m in members]
            progress = True
            while progress:
                progress = False
                for i in range(len(nodes)):
                    for j in range(i + 1, len(nodes)):
                        (a, ids_a), (b, ids_b) = nodes[i], nodes[j]
                        antecedent = self.merge_antecedents(a.antecedent, b.antecedent)
                        if antecedent is None:
                            continue
                        result = Assertion("", a.clock, antecedent, a.consequent, AssertionKind.IMPLICATION)
                        result = result.with_id(content_id(RuleId.R3, result))
                        nodes[i] = (result, ids_a + ids_b)
                        del nodes[j]
                        progress = True
                        break
                    if progress:
                        break
            for result, ids in nodes:
                if len(ids) < 2:
                    continue
                merged.append((sorted(ids), result.id))
                first = min(ids, key=[m.id for m in s].index)
                replacement[first] = result
                for other in ids:
                    if other != first:
                        replacement[other] = None
        new = self._substitute(s, replacement)
        return self._outcome(RuleId.R3, s, new, merged=merged)

    # -- Rule 4 ---------------------------------------------------------------

    @staticmethod
    def _survivor_key(a):
        return (len(atomic_propositions(a)), atom_occurrences(a), a.id)

    def refutes(self, a, b):
        """True when some shared lasso tells a and b apart. False proves nothing."""
        key = (print_assertion(a), print_assertion(b))
        if key not in self._refutations:
            pool, ids, pool_key = self._pool(atomic_propositions(a) | atomic_propositions(b),
                                             self.config.refutation_samples, "refute")
            va = self._vector(a, pool, ids, pool_key)
            vb = self._vector(b, pool, ids, pool_key)
            self._refutations[key] = va.counterexample(vb) is not None
        return self._refutations[key]

    def equivalent_pair(self, a, b):
        if a.clock != b.clock:
            return False
        if print_assertion(a) == print_assertion(b):
            return True
        if not (self._alignable(a) and self._alignable(b)):
            refuted = self.refutes(a, b)
            logger.debug("Opaque pair (%s, %s): %s", a.id, b.id,
                         "refuted" if refuted else "inconclusive, kept")
            return False
        try:
            return equivalent(self.window(a), self.window(b), self.config.sat_var_budget)
        except SatBudgetError:
            return False

    def apply_rule4(self, s):
        ordered = sorted(s, key=lambda x: x.id)
        removed = []
        gone = set()
        for i, a in enumerate(ordered):
            if a.id in gone:
                continue
            for b in ordered[i + 1:]:
                if b.id in gone or not self.equivalent_pair(a, b):
                    continue
                loser = b if self._survivor_key(a) <= self._survivor_key(b) else a
                gone.add(loser.id)
                removed.append(loser.id)
                if loser is a:
                    break
        new = [a for a in s if a.id not in gone]
        return self._outcome(RuleId.R4, s, new, removed)

    # -- Rule 5 ---------------------------------------------------------------

    def _rule5_pass(self, s):
        ordered = sorted(s, key=lambda x: x.id)
        gone, deleters, removed = set(), set(), []
        for i, a in enumerate(ordered):
            if a.id in gone or not self._alignable(a):
                continue
            for b in ordered[i + 1:]:
                if b.id in gone or b.clock != a.clock or not self._alignable(b):
                    continue
                try:
                    ab = implies(self.window(a), self.window(b), self.config.sat_var_budget)
                    ba = implies(self.window(b), self.window(a), self.config.sat_var_budget)
                except SatBudgetError:
                    continue
                if ab == ba:
                    continue
                strong, weak = (a, b) if ab else (b, a)
                if is_falsum(strong):
                    logger.info("Falsum assertion %s kept as a design-bug detector, not as a subsumer", strong.id)
                    continue
                # a subsumer stays for the rest of this pass; the next pass may remove it
                if weak.id in deleters:
                    continue
                gone.add(weak.id)
                deleters.add(strong.id)
                removed.append(weak.id)
                if weak is a:
                    break
        return removed

    def apply_rule5(self, s):
        """Subsumption passes until one removes nothing."""
        removed = []
        current = tuple(s)
        while True:
            dropped = self._rule5_pass(current)
            if not dropped:
                break
            removed.extend(dropped)
            gone = set(dropped)
            current = tuple(a for a in current if a.id not in gone)
        return self._outcome(RuleId.R5, s, list(current), removed)

    # -- dispatch ---------------------------------------------------------------

    def apply(self, rule, s):
        rule = RuleId(rule)
        handler = {
            RuleId.R1: self.apply_rule1,
            RuleId.R2: self.apply_rule2,
            RuleId.R3: self.apply_rule3,
            RuleId.R4: self.apply_rule4,
            RuleId.R5: self.apply_rule5,
        }[rule]
        outcome = handler(tuple(s))
        if outcome.delta_assertions < 0:
            logger.error("%s grew the set from %d to %d", rule.value, len(s), len(outcome.new_set))
            raise AssertionError(f"{rule.value} increased the assertion count")
        return outcome

    def apply_certified(self, rule, s):
        """Applies a rule and rolls back when the certificate fails."""
        outcome = self.apply(rule, s)
        if not outcome.changed:
            return outcome, None
        certificate = self.certify(s, outcome.new_set, rule)
        if certificate.passed:
            return outcome, certificate
        logger.error("Soundness incident: %s in cluster %s, counterexample %s",
                     RuleId(rule).value, self.label or "-", certificate.summary()["counterexample"])
        self.incidents.append(SoundnessIncident(RuleId(rule).value, certificate))
        return RuleOutcome.unchanged(RuleId(rule), s), certificate

    # -- certification ------------------------------------------------------------

    def _pool(self, aps, samples, purpose):
        ap = tuple(sorted(aps))
        key = (ap, samples, purpose)
        if key not in self._pools:
            pool = sample_lassos(ap, samples, derive_seed(self.config.seed, purpose, ap),
                                 self.config.prefix_max, self.config.loop_max)
            ids = pool_ids(pool)
            self._pools[key] = (pool, ids, hash16("|".join(ids)))
        return self._pools[key]

    def _vector(self, a, pool, ids, pool_key):
        key = (a.clock, a.antecedent, a.consequent, pool_key)
        if key not in self._vectors:
            try:
                formula = to_ltl(a, self.config.expansion_cap)
                self._vectors[key] = vector_from(lambda lam: eval_on_lasso(formula, lam), pool, ids)
            except LtlConversionError:
                self._vectors[key] = vector_from(lambda lam: holds_on_lasso(a, lam), pool, ids)
        return self._vectors[key]

    def conjunction_bits(self, assertions, pool, ids, pool_key):
        bits = np.ones(len(pool), dtype=bool)
        for a in assertions:
            bits &= self._vector(a, pool, ids, pool_key).bits
        return bits

    def certify(self, old_set, new_set, rule=None):
        """
        Compares AND(old) and AND(new) on one shared lasso pool. A disagreeing
        lasso is returned as the counterexample.
        """
        samples = self.config.certify_samples
        if state_key(old_set) == state_key(new_set):
            return Certificate(rule, True, 0, None, len(old_set), len(new_set))
        aps = frozenset().union(*(atomic_propositions(a) for a in list(old_set) + list(new_set)))
        pool, ids, pool_key = self._pool(aps, samples, "certify")
        old_bits = self.conjunction_bits(old_set, pool, ids, pool_key)
        new_bits = self.conjunction_bits(new_set, pool, ids, pool_key)
        diff = np.flatnonzero(old_bits != new_bits)
        counterexample = pool[int(diff[0])] if len(diff) else None
        return Certificate(rule, counterexample is None, len(pool), counterexample, len(old_set), len(new_set))


def sat_equivalent_sets(old_set, new_set, config=None):
    """
    Window-level SAT equivalence of two conjunctions. None when some member is
    not alignable or the query exceeds the variable budget.
    """
    engine = RuleEngine(config)
    if not all(engine._alignable(a) for a in list(old_set) + list(new_set)):
        return None
    try:
        return equivalent(
            make_and(engine.window(a) for a in old_set),
            make_and(engine.window(a) for a in new_set),
            engine.config.sat_var_budget,
        )
    except SatBudgetError:
        return None


def apply_rule1(s, config=None):
    return RuleEngine(config).apply(RuleId.R1, s)


def apply_rule2(s, config=None):
    return RuleEngine(config).apply(RuleId.R2, s)


def apply_rule3(s, config=None):
    return RuleEngine(config).apply(RuleId.R3, s)


def apply_rule4(s, config=None):
    return RuleEngine(config).apply(RuleId.R4, s)


def apply_rule5(s, config=None):
    return RuleEngine(config).apply(RuleId.R5, s)


def certify(old_set, new_set, samples=500, seed=0):
    return RuleEngine(RuleConfig(certify_samples=samples, seed=seed)).certify(old_set, new_set)
