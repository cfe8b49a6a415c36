#!/usr/bin/env python3
"""
synthesizer.py
--------------
Synthetic corpora with planted redundancy.

generate_synthetic(n, r, seed) draws n base assertions over a small signal
vocabulary (at most 4 atoms, delays of at most 2 cycles) and plants r
redundant variants of every base. Each variant is the inverse of one
reduction step, so a correct reducer can remove it:

  duplicate          same text, new id
  idempotent         last consequent item c becomes c && c
  absorption         c becomes c && (c || x)
  consequent_split   one conjunct of an AND consequent on its own
  antecedent_split   one disjunct of an OR antecedent, or the antecedent
                     strengthened with a fresh signal
  weakening          c becomes c || x

The ground truth maps every planted id to the id of its base.
"""

import logging

import numpy as np

from .assertion import (
    Assertion, AssertionKind, Delay, Sequence, atomic_propositions, fixed, print_assertion,
)
from .corpus import CorpusEntry, build_corpus
from .expr import And, Atom, Not, Or, TRUE, to_infix

logger = logging.getLogger(__name__)

SIGNALS = ("req", "gnt", "valid", "ready", "ack", "busy", "err", "done", "start", "stall", "flush", "irq")

REDUNDANCY_CLASSES = (
    "duplicate",
    "idempotent",
    "absorption",
    "consequent_split",
    "antecedent_split",
    "weakening",
)

DEFAULT_CLOCK = "clk"


def _item_text(e, has_tail):
    text = to_infix(e)
    if isinstance(e, Or) or (has_tail and isinstance(e, And)):
        return f"({text})"
    return text


def _sequence_text(seq):
    """Printer without normalization, so planted inflations stay visible."""
    has_tail = bool(seq.tail)
    parts = []
    if not (has_tail and seq.head == TRUE):
        parts.append(_item_text(seq.head, has_tail))
    for delay, expr in seq.tail:
        parts.append(delay.text())
        parts.append(_item_text(expr, has_tail))
    return " ".join(parts)


def assertion_text(a):
    if a.is_propositional:
        return to_infix(a.consequent.head)
    return f"{_sequence_text(a.antecedent)} |-> {_sequence_text(a.consequent)}"


def _replace_last(seq, expr):
    if not seq.tail:
        return Sequence(expr)
    delay, _ = seq.tail[-1]
    return Sequence(seq.head, seq.tail[:-1] + ((delay, expr),))


class SyntheticGenerator:
    def __init__(self, seed=0, classes=REDUNDANCY_CLASSES, clock=DEFAULT_CLOCK):
        """
        Parameters:
          - seed: seed of the numpy generator
          - classes: redundancy classes to draw planted variants from
          - clock: clock attached to every assertion
        """
        unknown = set(classes) - set(REDUNDANCY_CLASSES)
        if unknown or not classes:
            raise ValueError(f"Unknown redundancy classes: {sorted(unknown) or 'none given'}")
        self.rng = np.random.default_rng(seed)
        self.classes = tuple(classes)
        self.clock = clock

    def _literal(self, name):
        return Not(Atom(name)) if self.rng.random() < 0.25 else Atom(name)

    def _item(self, names):
        if len(names) == 1:
            return self._literal(names[0])
        children = tuple(self._literal(n) for n in names)
        return And(children) if self.rng.random() < 0.6 else Or(children)

    def base(self, assertion_id):
        k = int(self.rng.integers(2, 5))
        names = [str(s) for s in self.rng.choice(SIGNALS, size=k, replace=False)]
        if self.rng.random() < 0.1:
            item = self._item(names[:2])
            return Assertion(assertion_id, self.clock, Sequence(TRUE), Sequence(item), AssertionKind.PROPOSITIONAL)

        split = max(1, k // 2)
        ante_names, cons_names = names[:split], names[split:]
        if len(ante_names) >= 2 and self.rng.random() < 0.4:
            if self.rng.random() < 0.2:
                delay = Delay(1, 2)
            else:
                delay = fixed(int(self.rng.integers(1, 3)))
            antecedent = Sequence(self._literal(ante_names[0]), ((delay, self._literal(ante_names[1])),))
        else:
            antecedent = Sequence(self._item(ante_names))

        consequent_item = self._item(cons_names)
        lead = int(self.rng.integers(0, 3))
        if lead:
            consequent = Sequence(TRUE, ((fixed(lead), consequent_item),))
        else:
            consequent = Sequence(consequent_item)
        return Assertion(assertion_id, self.clock, antecedent, consequent, AssertionKind.IMPLICATION)

    def _fresh(self, a):
        used = atomic_propositions(a)
        free = [s for s in SIGNALS if s not in used]
        return Atom(str(self.rng.choice(free)))

    def plant(self, base, kind, planted_id):
        last = base.consequent.items[-1]
        x = self._fresh(base)
        antecedent, consequent, result_kind = base.antecedent, base.consequent, base.kind

        if kind == "idempotent":
            consequent = _replace_last(consequent, And((last, last)))
        elif kind == "absorption":
            consequent = _replace_last(consequent, And((last, Or((last, x)))))
        elif kind == "weakening":
            consequent = _replace_last(consequent, Or((last, x)))
        elif kind == "consequent_split" and isinstance(last, And):
            part = last.children[int(self.rng.integers(len(last.children)))]
            consequent = _replace_last(consequent, part)
        elif kind == "antecedent_split":
            result_kind = AssertionKind.IMPLICATION
            if base.is_propositional:
                antecedent = Sequence(x)
            else:
                trigger = antecedent.items[-1]
                if isinstance(trigger, Or):
                    trigger = trigger.children[int(self.rng.integers(len(trigger.children)))]
                else:
                    trigger = And((trigger, x))
                antecedent = _replace_last(antecedent, trigger)
        return Assertion(planted_id, base.clock, antecedent, consequent, result_kind)

    def generate(self, n, r):
        if n < 1 or r < 0:
            raise ValueError(f"generate_synthetic needs n >= 1 and r >= 0 (got n={n}, r={r})")
        bases, seen = [], set()
        attempts = 0
        while len(bases) < n:
            attempts += 1
            candidate = self.base(f"b{len(bases):03d}")
            key = print_assertion(candidate)
            if key in seen and attempts < n * 100:
                continue
            seen.add(key)
            bases.append(candidate)

        entries, truth = [], {}
        for base in bases:
            entries.append(CorpusEntry(base.id, base.clock, assertion_text(base)))
            for j in range(r):
                kind = self.classes[int(self.rng.integers(len(self.classes)))]
                planted = self.plant(base, kind, f"{base.id}_p{j}")
                entries.append(CorpusEntry(planted.id, planted.clock, assertion_text(planted)))
                truth[planted.id] = base.id
        logger.info("Generated %d assertions (%d bases, %d planted)", len(entries), n, len(truth))
        return entries, truth


def generate_synthetic(n, r, seed=0, classes=REDUNDANCY_CLASSES):
    """Returns (Corpus, ground truth {planted id: base id})."""
    entries, truth = SyntheticGenerator(seed, classes).generate(n, r)
    metadata = {"generator": "synthetic", "n": n, "r": r, "seed": seed, "classes": list(classes)}
    return build_corpus(f"synthetic_n{n}_r{r}_s{seed}", entries, metadata), truth
