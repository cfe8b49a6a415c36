#!/usr/bin/env python3
"""
expr.py
-------
Boolean expressions over atomic propositions (signals).

BoolExpr is one of Atom, Const, Not, And, Or. All nodes are frozen dataclasses,
so expressions can be shared freely between worker threads and used as dict keys.

Two normal forms are provided:
  - normalize(e): flatten associative operators, fold constants, drop double
    negation and duplicate children. Child order is preserved; this is the
    form the printer emits.
  - normalize(e, ordered=True): the same, with children sorted by a stable
    64-bit structural hash. canonical_key() serializes this form.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .hashing import stable_hash64

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Not:
    child: object


@dataclass(frozen=True)
class And:
    children: tuple


@dataclass(frozen=True)
class Or:
    children: tuple


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class CanonicalKey:
    key: str

    def __str__(self):
        return self.key


@lru_cache(maxsize=65536)
def serialize(e):
    """Prefix serialization used for hashing, dedupe and keys."""
    if isinstance(e, Atom):
        return e.name
    if isinstance(e, Const):
        return "1" if e.value else "0"
    if isinstance(e, Not):
        return f"!({serialize(e.child)})"
    op = "&" if isinstance(e, And) else "|"
    return f"{op}({','.join(serialize(c) for c in e.children)})"


def _order_key(e):
    text = serialize(e)
    return (stable_hash64(text), text)


@lru_cache(maxsize=65536)
def normalize(e, ordered=False):
    if isinstance(e, (Atom, Const)):
        return e
    if isinstance(e, Not):
        child = normalize(e.child, ordered)
        if isinstance(child, Const):
            return Const(not child.value)
        if isinstance(child, Not):
            return child.child
        return Not(child)

    node_type = type(e)
    unit = isinstance(e, And)  # And: TRUE is neutral, FALSE absorbs
    flat = []
    for child in e.children:
        child = normalize(child, ordered)
        if type(child) is node_type:
            flat.extend(child.children)
        else:
            flat.append(child)

    kept = []
    seen = set()
    for child in flat:
        if isinstance(child, Const):
            if child.value != unit:
                return Const(not unit)
            continue
        text = serialize(child)
        if text in seen:
            continue
        seen.add(text)
        kept.append(child)

    if ordered:
        kept.sort(key=_order_key)
    if not kept:
        return Const(unit)
    if len(kept) == 1:
        return kept[0]
    return node_type(tuple(kept))


def canonical_key(e):
    """
    Key invariant under commutativity, associativity, idempotence, double
    negation and constant folding. It does not decide propositional equivalence.
    """
    return CanonicalKey(serialize(normalize(e, ordered=True)))


def make_and(items):
    items = list(items)
    if not items:
        return TRUE
    return normalize(And(tuple(items))) if len(items) > 1 else normalize(items[0])


def make_or(items):
    items = list(items)
    if not items:
        return FALSE
    return normalize(Or(tuple(items))) if len(items) > 1 else normalize(items[0])


@lru_cache(maxsize=65536)
def nnf(e):
    """Negation normal form: negations only on atoms, then normalized."""
    return normalize(_push(e, False))


def _push(e, negate):
    if isinstance(e, Atom):
        return Not(e) if negate else e
    if isinstance(e, Const):
        return Const(e.value != negate)
    if isinstance(e, Not):
        return _push(e.child, not negate)
    children = tuple(_push(c, negate) for c in e.children)
    if isinstance(e, And):
        return Or(children) if negate else And(children)
    return And(children) if negate else Or(children)


def negate(e):
    return nnf(Not(e))


@lru_cache(maxsize=65536)
def atoms(e):
    if isinstance(e, Atom):
        return frozenset((e.name,))
    if isinstance(e, Const):
        return frozenset()
    if isinstance(e, Not):
        return atoms(e.child)
    result = frozenset()
    for c in e.children:
        result |= atoms(c)
    return result


def leaf_count(e):
    """Number of atom occurrences."""
    if isinstance(e, Atom):
        return 1
    if isinstance(e, Const):
        return 0
    if isinstance(e, Not):
        return leaf_count(e.child)
    return sum(leaf_count(c) for c in e.children)


def conjuncts(e):
    if isinstance(e, And):
        return list(e.children)
    if e == TRUE:
        return []
    return [e]


def rename(e, fn):
    """Maps every atom name through fn."""
    if isinstance(e, Atom):
        return Atom(fn(e.name))
    if isinstance(e, Const):
        return e
    if isinstance(e, Not):
        return Not(rename(e.child, fn))
    return type(e)(tuple(rename(c, fn) for c in e.children))


def evaluate(e, valuation):
    """valuation: mapping atom name -> bool; missing atoms read as False."""
    if isinstance(e, Atom):
        return bool(valuation.get(e.name, False))
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Not):
        return not evaluate(e.child, valuation)
    if isinstance(e, And):
        return all(evaluate(c, valuation) for c in e.children)
    return any(evaluate(c, valuation) for c in e.children)


def evaluate_columns(e, columns, size):
    """
    Vectorized evaluation: columns maps atom name -> boolean numpy array of
    length size.
    """
    if isinstance(e, Atom):
        column = columns.get(e.name)
        if column is None:
            return np.zeros(size, dtype=bool)
        return column
    if isinstance(e, Const):
        return np.full(size, e.value, dtype=bool)
    if isinstance(e, Not):
        return ~evaluate_columns(e.child, columns, size)
    parts = [evaluate_columns(c, columns, size) for c in e.children]
    if isinstance(e, And):
        return np.logical_and.reduce(parts)
    return np.logical_or.reduce(parts)


_PRECEDENCE = {Or: 1, And: 2}


def to_infix(e, parent=0):
    """Surface syntax for the printer: ! && || with minimal parentheses."""
    if isinstance(e, Atom):
        return e.name
    if isinstance(e, Const):
        return "1" if e.value else "0"
    if isinstance(e, Not):
        inner = to_infix(e.child, 3)
        return f"!{inner}"
    prec = _PRECEDENCE[type(e)]
    op = " && " if isinstance(e, And) else " || "
    text = op.join(to_infix(c, prec) for c in e.children)
    if prec <= parent:
        return f"({text})"
    return text
