#!/usr/bin/env python3
"""
simplify.py
-----------
Boolean micro-rules applied bucket by bucket before entailment pruning:
constant folding, idempotence, complement folding (x && !x -> 0,
x || !x -> 1) and absorption (c && (c || d) -> c, c || (c && d) -> c).
Rewrites run bottom-up until the NNF term stops changing.
"""

import logging

from .expr import And, Const, Or, nnf, normalize, serialize

logger = logging.getLogger(__name__)


def _complement(text):
    return text[2:-1] if text.startswith("!(") else f"!({text})"


def _step(e):
    if not isinstance(e, (And, Or)):
        return e
    node_type = type(e)
    dual = Or if node_type is And else And
    children = [_step(c) for c in e.children]
    keys = {serialize(c) for c in children}

    # x && !x, x || !x
    for key in keys:
        if _complement(key) in keys:
            return Const(node_type is Or)

    # c && (c || d) -> c
    kept = []
    for child in children:
        if isinstance(child, dual) and any(serialize(g) in keys for g in child.children):
            continue
        kept.append(child)
    return normalize(node_type(tuple(kept))) if kept else Const(node_type is And)


def simplify(e):
    current = nnf(e)
    while True:
        updated = nnf(_step(current))
        if updated == current:
            return current
        current = updated


def is_false(e):
    return simplify(e) == Const(False)

