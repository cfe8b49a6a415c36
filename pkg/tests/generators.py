#!/usr/bin/env python3
"""
tests/generators.py
-------------------
Seeded random builders shared by the randomized test suites: Boolean
expressions, assertions, assertion sets, LTL formulas and lassos.

Trial counts are kept small by default; set ASSERTLOOM_FULL_SUITE=1 to run
the full counts.
"""

import os

import numpy as np

from assertloom.assertion import Assertion, AssertionKind, Delay, Sequence, print_assertion
from assertloom.automata import Lasso
from assertloom.expr import And, Atom, Const, Not, Or, TRUE
from assertloom.ltl import (
    Bool, Finally, Globally, LAnd, LOr, Lit, Next, Release, Until,
)
from assertloom.parser import parse_assertion

FULL_SUITE = os.environ.get("ASSERTLOOM_FULL_SUITE") == "1"

ATOMS = ("a", "b", "c", "d")


def trials(quick, full):
    return full if FULL_SUITE else quick


def rng_for(seed):
    return np.random.default_rng(seed)


def pick(rng, items):
    return items[int(rng.integers(len(items)))]


def random_expr(rng, names=ATOMS, depth=2, consts=True):
    roll = rng.random()
    if depth == 0 or roll < 0.4:
        if consts and rng.random() < 0.05:
            return Const(bool(rng.integers(2)))
        return Atom(pick(rng, names))
    if roll < 0.55:
        return Not(random_expr(rng, names, depth - 1, consts))
    children = tuple(random_expr(rng, names, depth - 1, consts) for _ in range(int(rng.integers(2, 4))))
    return And(children) if rng.random() < 0.5 else Or(children)


def random_delay(rng, max_delay=3, ranges=True):
    lo = int(rng.integers(0, max_delay + 1))
    if ranges and rng.random() < 0.2:
        return Delay(lo, int(rng.integers(lo, max_delay + 1)))
    return Delay(lo, lo)


def random_sequence(rng, names=ATOMS, max_items=2, ranges=True, lead=False, consts=True):
    count = int(rng.integers(1, max_items + 1))
    head = TRUE if lead else random_expr(rng, names, 1, consts)
    tail = tuple((random_delay(rng, 3, ranges), random_expr(rng, names, 1, consts))
                 for _ in range(count - 1 + int(lead)))
    return Sequence(head, tail)


def random_assertion(rng, assertion_id, names=ATOMS, ranges=True, clock=None):
    """A parsed (so normalized) random assertion."""
    if rng.random() < 0.15:
        raw = Assertion(assertion_id, clock, Sequence(TRUE), Sequence(random_expr(rng, names)),
                        AssertionKind.PROPOSITIONAL)
    else:
        antecedent = random_sequence(rng, names, 2, ranges)
        consequent = random_sequence(rng, names, 2, ranges, lead=rng.random() < 0.3)
        raw = Assertion(assertion_id, clock, antecedent, consequent)
    return parse_assertion(print_assertion(raw), assertion_id)


def random_set(rng, max_size=6, names=ATOMS, ranges=True):
    """
    Up to max_size assertions. Some members reuse a side of an earlier member,
    so merge rules get something to work on.
    """
    size = int(rng.integers(1, max_size + 1))
    members = []
    for i in range(size):
        a = random_assertion(rng, f"s{i}", names, ranges)
        if members and not a.is_propositional and rng.random() < 0.4:
            other = pick(rng, members)
            if not other.is_propositional:
                if rng.random() < 0.5:
                    a = Assertion(a.id, a.clock, other.antecedent, a.consequent)
                else:
                    a = Assertion(a.id, a.clock, a.antecedent, other.consequent)
        elif members and rng.random() < 0.1:
            a = pick(rng, members).with_id(f"s{i}")
        members.append(a)
    return members


def random_ltl(rng, names=ATOMS, depth=3):
    roll = rng.random()
    if depth == 0 or roll < 0.25:
        if rng.random() < 0.05:
            return Bool(bool(rng.integers(2)))
        return Lit(pick(rng, names), bool(rng.random() < 0.7))
    kind = int(rng.integers(8))
    if kind == 0:
        return LAnd((random_ltl(rng, names, depth - 1), random_ltl(rng, names, depth - 1)))
    if kind == 1:
        return LOr((random_ltl(rng, names, depth - 1), random_ltl(rng, names, depth - 1)))
    if kind == 2:
        return Next(random_ltl(rng, names, depth - 1))
    if kind == 3:
        return Globally(random_ltl(rng, names, depth - 1))
    if kind == 4:
        return Finally(random_ltl(rng, names, depth - 1))
    if kind == 5:
        return Until(random_ltl(rng, names, depth - 1), random_ltl(rng, names, depth - 1))
    if kind == 6:
        return Release(random_ltl(rng, names, depth - 1), random_ltl(rng, names, depth - 1))
    return Next(Next(random_ltl(rng, names, depth - 1)))


def random_lasso(rng, names=ATOMS, prefix_max=3, loop_max=3):
    names = tuple(names)
    prefix_len = int(rng.integers(0, prefix_max + 1))
    loop_len = int(rng.integers(1, loop_max + 1))
    letters = [int(rng.integers(0, 1 << len(names))) for _ in range(prefix_len + loop_len)]
    return Lasso(names, tuple(letters[:prefix_len]), tuple(letters[prefix_len:]))


def letter(names, **values):
    """Bitmask letter over names: letter(("a", "b"), a=1) == 1."""
    return sum(1 << j for j, name in enumerate(names) if values.get(name))
