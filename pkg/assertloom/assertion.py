#!/usr/bin/env python3
"""
assertion.py
------------
Assertion AST for the bounded SVA-like language:

    [@(posedge clk)] seq |-> seq      implication
    [@(posedge clk)] boolexpr         propositional

A Sequence is a head BoolExpr followed by (Delay, BoolExpr) steps. The printer
emits the order-preserving normal form, so parse(print(a)) == normalize(a).
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum

from .expr import And, Or, TRUE, atoms, canonical_key, leaf_count, normalize, to_infix

logger = logging.getLogger(__name__)


class AssertionKind(str, Enum):
    IMPLICATION = "implication"
    PROPOSITIONAL = "propositional"


@dataclass(frozen=True)
class Delay:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo < 0 or self.hi < self.lo:
            raise ValueError(f"Invalid delay ##[{self.lo}:{self.hi}]")

    @property
    def is_fixed(self):
        return self.lo == self.hi

    @property
    def width(self):
        return self.hi - self.lo + 1

    def __add__(self, other):
        return Delay(self.lo + other.lo, self.hi + other.hi)

    def text(self):
        if self.is_fixed:
            return f"##{self.lo}"
        return f"##[{self.lo}:{self.hi}]"


def fixed(n):
    return Delay(n, n)


@dataclass(frozen=True)
class Sequence:
    head: object
    tail: tuple = ()

    @property
    def items(self):
        return [self.head] + [expr for _, expr in self.tail]

    @property
    def delays(self):
        return [delay for delay, _ in self.tail]

    @property
    def is_fixed(self):
        return all(d.is_fixed for d in self.delays)

    @property
    def length(self):
        """Cycles spanned by a fixed sequence (offset of its last item)."""
        return sum(d.lo for d in self.delays)

    def concat(self, delay, other):
        """self ##delay other"""
        tail = self.tail + ((delay, other.head),) + other.tail
        return Sequence(self.head, tail)


@dataclass(frozen=True)
class Assertion:
    id: str
    clock: object
    antecedent: Sequence
    consequent: Sequence
    kind: AssertionKind = AssertionKind.IMPLICATION

    @property
    def is_propositional(self):
        return self.kind == AssertionKind.PROPOSITIONAL

    def with_id(self, new_id):
        return replace(self, id=new_id)


def propositional(assertion_id, expr, clock=None):
    return Assertion(assertion_id, clock, Sequence(TRUE), Sequence(expr), AssertionKind.PROPOSITIONAL)


def normalize_sequence(seq, ordered=False):
    """
    Normalizes every item and fuses interior always-true items into the
    surrounding delays (x ##m 1 ##n y == x ##(m+n) y). A true head and a true
    last item are kept: they carry timing.
    """
    head = normalize(seq.head, ordered)
    tail = []
    pending = None
    last = len(seq.tail) - 1
    for i, (delay, expr) in enumerate(seq.tail):
        expr = normalize(expr, ordered)
        if pending is not None:
            delay = pending + delay
            pending = None
        if expr == TRUE and i != last:
            pending = delay
            continue
        tail.append((delay, expr))
    return Sequence(head, tuple(tail))


def normalize_assertion(a):
    if a.is_propositional:
        return replace(a, consequent=Sequence(normalize(a.consequent.head)))
    return replace(
        a,
        antecedent=normalize_sequence(a.antecedent),
        consequent=normalize_sequence(a.consequent),
    )


def _item_text(expr, has_tail):
    if isinstance(expr, Or) or (has_tail and isinstance(expr, And)):
        return f"({to_infix(expr)})"
    return to_infix(expr)


def print_sequence(seq):
    seq = normalize_sequence(seq)
    has_tail = bool(seq.tail)
    parts = []
    if not (has_tail and seq.head == TRUE):
        parts.append(_item_text(seq.head, has_tail))
    for delay, expr in seq.tail:
        parts.append(delay.text())
        parts.append(_item_text(expr, has_tail))
    return " ".join(parts)


def print_assertion(a):
    prefix = f"@(posedge {a.clock}) " if a.clock else ""
    if a.is_propositional:
        return prefix + to_infix(normalize(a.consequent.head))
    return f"{prefix}{print_sequence(a.antecedent)} |-> {print_sequence(a.consequent)}"


def sequence_key(seq):
    """Canonical key of a whole sequence: item keys interleaved with delays."""
    seq = normalize_sequence(seq)
    parts = [canonical_key(seq.head).key]
    for delay, expr in seq.tail:
        parts.append(delay.text())
        parts.append(canonical_key(expr).key)
    return " ".join(parts)


def sequence_atoms(seq):
    result = frozenset()
    for expr in seq.items:
        result |= atoms(expr)
    return result


def atomic_propositions(a):
    return sequence_atoms(a.antecedent) | sequence_atoms(a.consequent)


def atom_occurrences(a):
    """Atom leaves across both sides after normalization."""
    a = normalize_assertion(a)
    return sum(leaf_count(e) for e in a.antecedent.items + a.consequent.items)


def range_product(a):
    product = 1
    for seq in (a.antecedent, a.consequent):
        for delay in seq.delays:
            product *= delay.width
    return product
