#!/usr/bin/env python3
"""
temporal.py
-----------
Temporal endpoint alignment: an implication with (possibly ranged) delays is
rewritten into time-stamped propositional obligations.

Each TimedExpansion fixes one offset per delay. Offsets are absolute from the
antecedent start; the consequent head sits at the antecedent end (the anchor).
Bucket expressions are kept in NNF over plain signal names, the offset being
the bucket key; timed() renames them to `name@k` atoms for SAT queries.

Antecedent ranges are universal (every match obligates) and consequent ranges
existential (some choice must hold), so the window formula of an assertion is

    AND over antecedent choices p of ( pre_p -> OR over consequent choices q of post_pq )

and the assertion itself is G of that formula.
"""

import itertools
import logging
from dataclasses import dataclass, field

from .assertion import Assertion, AssertionKind, Sequence, fixed, range_product
from .errors import ExpansionCapError, LtlConversionError
from .expr import Atom, Not, TRUE, evaluate, make_and, make_or, nnf, rename
from .ltl import Globally, from_bool, land, lor, ltl_implies, next_n

logger = logging.getLogger(__name__)

DEFAULT_EXPANSION_CAP = 64


def timed_name(name, offset):
    return f"{name}@{offset}"


def timed(expr, offset):
    return rename(expr, lambda name: timed_name(name, offset))


@dataclass(frozen=True)
class TimedLiteral:
    atom: str
    offset: int
    positive: bool = True

    def __post_init__(self):
        if self.offset < 0:
            raise ValueError(f"Negative offset for {self.atom}: {self.offset}")

    def to_expr(self):
        var = Atom(timed_name(self.atom, self.offset))
        return var if self.positive else Not(var)


@dataclass(frozen=True)
class TimedExpansion:
    pre_buckets: dict = field(default_factory=dict)
    post_buckets: dict = field(default_factory=dict)
    anchor: int = 0
    pre_choice: tuple = ()
    post_choice: tuple = ()

    @property
    def max_offset(self):
        keys = list(self.pre_buckets) + list(self.post_buckets) + [self.anchor]
        return max(keys)

    def pre_formula(self):
        return make_and(timed(e, k) for k, e in sorted(self.pre_buckets.items()))

    def post_formula(self):
        return make_and(timed(e, k) for k, e in sorted(self.post_buckets.items()))


@dataclass(frozen=True)
class ExpansionSet:
    expansions: tuple

    def __post_init__(self):
        if not self.expansions:
            raise ValueError("ExpansionSet must be non-empty")

    def __len__(self):
        return len(self.expansions)

    def __iter__(self):
        return iter(self.expansions)

    def by_pre_choice(self):
        groups = {}
        for exp in self.expansions:
            groups.setdefault(exp.pre_choice, []).append(exp)
        return groups

    def formula(self):
        """Window formula over timed atoms (see module docstring)."""
        obligations = []
        for group in self.by_pre_choice().values():
            pre = group[0].pre_formula()
            post = make_or(exp.post_formula() for exp in group)
            obligations.append(make_or([nnf(Not(pre)), post]))
        return nnf(make_and(obligations))


def _choices(seq):
    return [range(d.lo, d.hi + 1) for d in seq.delays]


def _bucket(items, start, delays):
    """Conjoins each item into the bucket of its cumulative offset."""
    buckets = {}
    offset = start
    for i, expr in enumerate(items):
        if i > 0:
            offset += delays[i - 1]
        buckets.setdefault(offset, []).append(expr)
    merged = {k: nnf(make_and(v)) for k, v in buckets.items()}
    return merged, offset


def align(a, cap=DEFAULT_EXPANSION_CAP):
    """
    Returns the ExpansionSet of a. Propositional assertions align as `1 |-> expr`.
    Raises ExpansionCapError when the range product exceeds cap.
    """
    size = range_product(a)
    if size > cap:
        logger.debug("Assertion %s expands to %d timelines (cap %d)", a.id, size, cap)
        raise ExpansionCapError(f"{a.id}: {size} expansions exceed cap {cap}")

    ante_items = a.antecedent.items
    cons_items = a.consequent.items
    expansions = []
    for pre_choice in itertools.product(*_choices(a.antecedent)):
        pre, anchor = _bucket(ante_items, 0, pre_choice)
        pre = {k: e for k, e in pre.items() if e != TRUE}
        for post_choice in itertools.product(*_choices(a.consequent)):
            post, _ = _bucket(cons_items, anchor, post_choice)
            post = {k: e for k, e in post.items() if e != TRUE}
            expansions.append(TimedExpansion(pre, post, anchor, tuple(pre_choice), tuple(post_choice)))
    return ExpansionSet(tuple(expansions))


def is_alignable(a, cap=DEFAULT_EXPANSION_CAP):
    return range_product(a) <= cap


def sequence_from_buckets(buckets, start):
    head = buckets.get(start, TRUE)
    tail = []
    previous = start
    for offset in sorted(k for k in buckets if k > start):
        tail.append((fixed(offset - previous), buckets[offset]))
        previous = offset
    return Sequence(head, tuple(tail))


def rebuild(exp, clock, assertion_id, kind=AssertionKind.IMPLICATION):
    """
    Inverse of align for one expansion. The anchor becomes the last non-true
    antecedent bucket; empty antecedents rebuild as `1`.
    """
    pre = {k: e for k, e in exp.pre_buckets.items() if e != TRUE}
    post = {k: e for k, e in exp.post_buckets.items() if e != TRUE}
    anchor = max(pre) if pre else 0
    if any(k < anchor for k in post):
        logger.error("Cannot rebuild %s: consequent bucket before anchor %d", assertion_id, anchor)
        raise ValueError(f"{assertion_id}: consequent offset precedes antecedent end")

    antecedent = sequence_from_buckets(pre, 0)
    consequent = sequence_from_buckets({k - anchor: e for k, e in post.items()}, 0)
    if kind == AssertionKind.PROPOSITIONAL and not pre and set(post) <= {0}:
        return Assertion(assertion_id, clock, Sequence(TRUE), consequent, AssertionKind.PROPOSITIONAL)
    return Assertion(assertion_id, clock, antecedent, consequent, AssertionKind.IMPLICATION)


def window_formula(a, cap=DEFAULT_EXPANSION_CAP):
    return align(a, cap).formula()


def _encode(buckets):
    return land(next_n(from_bool(e), k) for k, e in sorted(buckets.items()))


def to_ltl(a, cap=DEFAULT_EXPANSION_CAP):
    """G( AND_p ( enc(pre_p) -> OR_q enc(post_pq) ) ), with enc(bucket at k) = X^k."""
    try:
        exps = align(a, cap)
    except ExpansionCapError as e:
        raise LtlConversionError(str(e)) from e
    obligations = []
    for group in exps.by_pre_choice().values():
        pre = _encode(group[0].pre_buckets)
        post = lor(_encode(exp.post_buckets) for exp in group)
        obligations.append(ltl_implies(pre, post))
    return Globally(land(obligations))


def _position(i, prefix_len, loop_len):
    if i < prefix_len + loop_len:
        return i
    return prefix_len + (i - prefix_len) % loop_len


def _match_ends(seq, start, holds):
    """Absolute end positions of every match of seq starting at start."""
    if not holds(seq.head, start):
        return set()
    ends = {start}
    for delay, expr in seq.tail:
        ends = {p + d for p in ends for d in range(delay.lo, delay.hi + 1) if holds(expr, p + d)}
        if not ends:
            break
    return ends


def holds_on_lasso(a, lam):
    """
    Cycle-wise evaluation of the assertion on prefix.loop^w, checked from every
    start cycle. Independent of LTL conversion and of the expansion cap.
    """
    prefix_len, loop_len = len(lam.prefix), len(lam.loop)
    letters = list(lam.prefix) + list(lam.loop)
    valuations = [
        {name: bool((letter >> bit) & 1) for bit, name in enumerate(lam.atoms)}
        for letter in letters
    ]

    def holds(expr, i):
        return evaluate(expr, valuations[_position(i, prefix_len, loop_len)])

    for start in range(prefix_len + loop_len):
        for end in _match_ends(a.antecedent, start, holds):
            if not _match_ends(a.consequent, end, holds):
                return False
    return True
