#!/usr/bin/env python3
"""
ltl.py
------
LTL formulas in negation normal form and a direct evaluator on lassos.

Formulas are frozen dataclasses: Bool, Lit (an atom or its negation), LAnd,
LOr, Next, Globally, Finally, Until, Release. Negation is pushed to the
atoms by ltl_not(), so every formula built here is already in NNF.

eval_on_lasso() evaluates over the ultimately periodic word prefix.loop^w.
Position i of the lasso has a single successor (the loop folds back to
the loop head), so temporal operators become fixpoints over a boolean vector.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .expr import And, Atom, Const, Not, Or, nnf

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True)
class Lit:
    name: str
    positive: bool = True


@dataclass(frozen=True)
class LAnd:
    children: tuple


@dataclass(frozen=True)
class LOr:
    children: tuple


@dataclass(frozen=True)
class Next:
    child: object


@dataclass(frozen=True)
class Globally:
    child: object


@dataclass(frozen=True)
class Finally:
    child: object


@dataclass(frozen=True)
class Until:
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Release:
    lhs: object
    rhs: object


LTRUE = Bool(True)
LFALSE = Bool(False)


def land(items):
    flat = []
    for item in items:
        if item == LFALSE:
            return LFALSE
        if item == LTRUE:
            continue
        flat.extend(item.children if isinstance(item, LAnd) else [item])
    unique = list(dict.fromkeys(flat))
    if not unique:
        return LTRUE
    return unique[0] if len(unique) == 1 else LAnd(tuple(unique))


def lor(items):
    flat = []
    for item in items:
        if item == LTRUE:
            return LTRUE
        if item == LFALSE:
            continue
        flat.extend(item.children if isinstance(item, LOr) else [item])
    unique = list(dict.fromkeys(flat))
    if not unique:
        return LFALSE
    return unique[0] if len(unique) == 1 else LOr(tuple(unique))


def next_n(f, k):
    for _ in range(k):
        f = Next(f)
    return f


def from_bool(e):
    """Lifts a BoolExpr to a state formula."""
    e = nnf(e)
    if isinstance(e, Atom):
        return Lit(e.name)
    if isinstance(e, Const):
        return Bool(e.value)
    if isinstance(e, Not):
        return Lit(e.child.name, False)
    if isinstance(e, And):
        return land(from_bool(c) for c in e.children)
    return lor(from_bool(c) for c in e.children)


def ltl_not(f):
    if isinstance(f, Bool):
        return Bool(not f.value)
    if isinstance(f, Lit):
        return Lit(f.name, not f.positive)
    if isinstance(f, LAnd):
        return lor(ltl_not(c) for c in f.children)
    if isinstance(f, LOr):
        return land(ltl_not(c) for c in f.children)
    if isinstance(f, Next):
        return Next(ltl_not(f.child))
    if isinstance(f, Globally):
        return Finally(ltl_not(f.child))
    if isinstance(f, Finally):
        return Globally(ltl_not(f.child))
    if isinstance(f, Until):
        return Release(ltl_not(f.lhs), ltl_not(f.rhs))
    return Until(ltl_not(f.lhs), ltl_not(f.rhs))


def ltl_implies(f, g):
    return lor([ltl_not(f), g])


@lru_cache(maxsize=16384)
def ltl_atoms(f):
    if isinstance(f, Bool):
        return frozenset()
    if isinstance(f, Lit):
        return frozenset((f.name,))
    if isinstance(f, (LAnd, LOr)):
        result = frozenset()
        for c in f.children:
            result |= ltl_atoms(c)
        return result
    if isinstance(f, (Next, Globally, Finally)):
        return ltl_atoms(f.child)
    return ltl_atoms(f.lhs) | ltl_atoms(f.rhs)


def to_text(f):
    if isinstance(f, Bool):
        return "true" if f.value else "false"
    if isinstance(f, Lit):
        return f.name if f.positive else f"!{f.name}"
    if isinstance(f, LAnd):
        return "(" + " & ".join(to_text(c) for c in f.children) + ")"
    if isinstance(f, LOr):
        return "(" + " | ".join(to_text(c) for c in f.children) + ")"
    if isinstance(f, Next):
        return f"X {to_text(f.child)}"
    if isinstance(f, Globally):
        return f"G {to_text(f.child)}"
    if isinstance(f, Finally):
        return f"F {to_text(f.child)}"
    op = "U" if isinstance(f, Until) else "R"
    return f"({to_text(f.lhs)} {op} {to_text(f.rhs)})"


def lasso_letters(lam):
    """Letters of prefix+loop (python ints, any width) and the successor index map."""
    letters = list(lam.prefix) + list(lam.loop)
    n = len(letters)
    successor = np.arange(1, n + 1)
    successor[-1] = len(lam.prefix)
    return letters, successor


def _fixpoint(step, start):
    current = start
    while True:
        updated = step(current)
        if np.array_equal(updated, current):
            return current
        current = updated


def _eval(f, letters, successor, index):
    n = len(letters)
    if isinstance(f, Bool):
        return np.full(n, f.value, dtype=bool)
    if isinstance(f, Lit):
        bit = index.get(f.name)
        column = np.array([(letter >> bit) & 1 if bit is not None else 0 for letter in letters], dtype=bool)
        return column if f.positive else ~column
    if isinstance(f, LAnd):
        return np.logical_and.reduce([_eval(c, letters, successor, index) for c in f.children])
    if isinstance(f, LOr):
        return np.logical_or.reduce([_eval(c, letters, successor, index) for c in f.children])
    if isinstance(f, Next):
        return _eval(f.child, letters, successor, index)[successor]
    if isinstance(f, Globally):
        body = _eval(f.child, letters, successor, index)
        return _fixpoint(lambda v: body & v[successor], np.ones(n, dtype=bool))
    if isinstance(f, Finally):
        body = _eval(f.child, letters, successor, index)
        return _fixpoint(lambda v: body | v[successor], np.zeros(n, dtype=bool))
    lhs = _eval(f.lhs, letters, successor, index)
    rhs = _eval(f.rhs, letters, successor, index)
    if isinstance(f, Until):
        return _fixpoint(lambda v: rhs | (lhs & v[successor]), np.zeros(n, dtype=bool))
    return _fixpoint(lambda v: rhs & (lhs | v[successor]), np.ones(n, dtype=bool))


def eval_on_lasso(f, lam):
    """
    True iff prefix.loop^w satisfies f. Atoms absent from lam.atoms read as 0.
    """
    letters, successor = lasso_letters(lam)
    index = {name: bit for bit, name in enumerate(lam.atoms)}
    return bool(_eval(f, letters, successor, index)[0])
