#!/usr/bin/env python3
"""
tests/test_expr.py
------------------
Unit tests for Boolean expressions: normalization, canonical keys, NNF,
evaluation and the infix printer.
"""

import unittest

import numpy as np

from assertloom.expr import (
    FALSE, TRUE, And, Atom, Const, Not, Or, atoms, canonical_key, conjuncts, evaluate,
    evaluate_columns, leaf_count, make_and, make_or, negate, nnf, normalize, to_infix,
)
from generators import random_expr, rng_for, trials

a, b, c = Atom("a"), Atom("b"), Atom("c")


class TestNormalize(unittest.TestCase):
    def test_flattens_and_keeps_order(self):
        e = normalize(And((a, And((c, b)))))
        self.assertEqual(e, And((a, c, b)))

    def test_constant_folding(self):
        self.assertEqual(normalize(And((a, TRUE))), a)
        self.assertEqual(normalize(And((a, FALSE))), FALSE)
        self.assertEqual(normalize(Or((a, TRUE))), TRUE)
        self.assertEqual(normalize(Or((FALSE, FALSE))), FALSE)

    def test_double_negation_and_idempotence(self):
        self.assertEqual(normalize(Not(Not(a))), a)
        self.assertEqual(normalize(And((a, a))), a)
        self.assertEqual(normalize(Not(TRUE)), FALSE)

    def test_no_singletons_after_normalization(self):
        rng = rng_for(1)
        for _ in range(trials(200, 2000)):
            stack = [normalize(random_expr(rng))]
            while stack:
                e = stack.pop()
                if isinstance(e, (And, Or)):
                    self.assertGreaterEqual(len(e.children), 2)
                    stack.extend(e.children)
                elif isinstance(e, Not):
                    stack.append(e.child)


class TestCanonicalKey(unittest.TestCase):
    def test_commutativity(self):
        self.assertEqual(canonical_key(And((a, b))), canonical_key(And((b, a))))

    def test_idempotence(self):
        self.assertEqual(canonical_key(And((a, a))), canonical_key(a))

    def test_double_negation(self):
        self.assertEqual(canonical_key(Not(Not(a))), canonical_key(a))

    def test_associativity_and_constants(self):
        left = And((And((a, b)), c, TRUE))
        right = And((c, And((b, a))))
        self.assertEqual(canonical_key(left), canonical_key(right))

    def test_distinct_expressions_differ(self):
        self.assertNotEqual(canonical_key(And((a, b))), canonical_key(Or((a, b))))

    def test_congruence_under_subterm_rewrites(self):
        rng = rng_for(2)
        for _ in range(trials(100, 1000)):
            e = random_expr(rng)
            wrapped = And((e, TRUE, Not(Not(e))))
            self.assertEqual(canonical_key(wrapped), canonical_key(e))


class TestNnf(unittest.TestCase):
    def test_de_morgan(self):
        self.assertEqual(nnf(Not(And((a, b)))), Or((Not(a), Not(b))))
        self.assertEqual(negate(Or((a, Not(b)))), And((Not(a), b)))

    def test_nnf_preserves_truth_table(self):
        rng = rng_for(3)
        for _ in range(trials(100, 1000)):
            e = random_expr(rng)
            converted = nnf(e)
            for bits in range(16):
                valuation = {name: bool(bits >> j & 1) for j, name in enumerate("abcd")}
                self.assertEqual(evaluate(e, valuation), evaluate(converted, valuation))


class TestHelpers(unittest.TestCase):
    def test_atoms_and_leaf_count(self):
        e = And((a, Or((Not(b), a))))
        self.assertEqual(atoms(e), frozenset({"a", "b"}))
        self.assertEqual(leaf_count(e), 3)
        self.assertEqual(leaf_count(TRUE), 0)

    def test_conjuncts(self):
        self.assertEqual(conjuncts(TRUE), [])
        self.assertEqual(conjuncts(a), [a])
        self.assertEqual(conjuncts(And((a, b))), [a, b])

    def test_make_and_or(self):
        self.assertEqual(make_and([]), TRUE)
        self.assertEqual(make_or([]), FALSE)
        self.assertEqual(make_and([a]), a)
        self.assertEqual(make_or([a, b]), Or((a, b)))

    def test_evaluate_columns_matches_evaluate(self):
        rng = rng_for(4)
        index = np.arange(16)
        columns = {name: ((index >> j) & 1).astype(bool) for j, name in enumerate("abcd")}
        for _ in range(trials(50, 500)):
            e = random_expr(rng)
            vector = evaluate_columns(e, columns, 16)
            for i in range(16):
                valuation = {name: bool(i >> j & 1) for j, name in enumerate("abcd")}
                self.assertEqual(bool(vector[i]), evaluate(e, valuation))

    def test_to_infix(self):
        self.assertEqual(to_infix(And((a, Or((b, c))))), "a && (b || c)")
        self.assertEqual(to_infix(Not(And((a, b)))), "!(a && b)")
        self.assertEqual(to_infix(Const(False)), "0")


if __name__ == '__main__':
    unittest.main()
