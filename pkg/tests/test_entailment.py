#!/usr/bin/env python3
"""
tests/test_entailment.py
------------------------
Unit tests for the Tseitin encoder, the DPLL solver, entailment and
equivalence queries, and the truth-table fast path.
"""

import itertools
import unittest

import numpy as np

from assertloom.entailment import (
    CnfFormula, DpllSolver, entails, equivalent, implies, is_sat, satisfiable, truth_table_sat_set,
    tseitin,
)
from assertloom.errors import SatBudgetError, TruthTableLimitError
from assertloom.expr import FALSE, TRUE, And, Atom, Not, Or, atoms, evaluate, make_and
from assertloom.parser import parse_assertion, parse_expr
from assertloom.temporal import TimedLiteral, timed, window_formula
from generators import random_expr, rng_for, trials


def brute_force_sat(e):
    names = sorted(atoms(e))
    return any(
        evaluate(e, dict(zip(names, values)))
        for values in itertools.product((False, True), repeat=len(names))
    )


def window(text):
    return window_formula(parse_assertion(text))


class TestSolver(unittest.TestCase):
    def test_contradiction(self):
        f = CnfFormula()
        a = f.var("a")
        f.add_clause((a,))
        f.add_clause((-a,))
        self.assertFalse(is_sat(f))

    def test_disjunction(self):
        f = CnfFormula()
        f.add_clause((f.var("a"), f.var("b")))
        self.assertTrue(is_sat(f))

    def test_empty_clause_list_is_true(self):
        self.assertTrue(is_sat(CnfFormula()))
        self.assertIsNotNone(DpllSolver([]).solve())

    def test_empty_clause_is_unsat(self):
        self.assertFalse(is_sat(tseitin(FALSE)))
        self.assertTrue(is_sat(tseitin(TRUE)))

    def test_fresh_variables_do_not_count_against_budget(self):
        e = parse_expr("(a && b) || (c && d) || (a && !d)")
        f = tseitin(e)
        self.assertEqual(f.original_var_count, 4)
        self.assertTrue(all(name.startswith("_t") for name in f.variables
                            if f.variables[name] in f.fresh_vars))
        self.assertTrue(is_sat(f, budget=4))
        with self.assertRaises(SatBudgetError):
            is_sat(f, budget=3)

    def test_agrees_with_brute_force(self):
        rng = rng_for(31)
        names = tuple("abcdefghijkl")
        for _ in range(trials(500, 5000)):
            e = random_expr(rng, names, depth=3)
            self.assertEqual(satisfiable(e), brute_force_sat(e))

    def test_worked_example_guard(self):
        pre = make_and([timed(parse_expr("A && B"), 0), timed(parse_expr("C"), 1)])
        self.assertFalse(satisfiable(make_and([pre, Not(Atom("C@1"))])))


class TestEntails(unittest.TestCase):
    def test_bucket_pruning(self):
        pre = And((Atom("A@0"), Atom("B@0"), Atom("C@1")))
        self.assertTrue(entails(pre, TimedLiteral("C", 1)))

    def test_independent_atoms(self):
        self.assertFalse(entails(Atom("A@0"), TimedLiteral("B", 0)))

    def test_inconsistent_antecedent(self):
        pre = And((Atom("A@0"), Not(Atom("A@0"))))
        self.assertTrue(entails(pre, TimedLiteral("Z", 0)))

    def test_negative_literal(self):
        pre = Not(Atom("A@0"))
        self.assertTrue(entails(pre, TimedLiteral("A", 0, positive=False)))

    def test_budget_refusal(self):
        wide = make_and(Atom(f"x{i}") for i in range(10))
        with self.assertRaises(SatBudgetError):
            entails(wide, Atom("x0"), budget=5)


class TestEquivalence(unittest.TestCase):
    def test_idempotent_consequent(self):
        self.assertTrue(equivalent(window("a |-> b"), window("a |-> b && b")))

    def test_opposite_consequent(self):
        self.assertFalse(equivalent(window("a |-> b"), window("a |-> !b")))

    def test_shifted_anchor(self):
        self.assertTrue(equivalent(window("a |-> ##1 c"), window("a ##1 1 |-> c")))

    def test_weaker_antecedent_implies(self):
        self.assertTrue(implies(window("a |-> c"), window("a && b |-> c")))
        self.assertFalse(implies(window("a && b |-> c"), window("a |-> c")))

    def test_false_premise(self):
        self.assertTrue(implies(window("1 |-> 0"), window("x |-> y")))

    def test_no_cross_implication(self):
        self.assertFalse(implies(window("a |-> c"), window("a |-> !c")))

    def test_relation_laws(self):
        rng = rng_for(32)
        for _ in range(trials(150, 1500)):
            e1, e2, e3 = (random_expr(rng) for _ in range(3))
            self.assertTrue(equivalent(e1, e1))
            self.assertTrue(implies(e1, e1))
            self.assertEqual(equivalent(e1, e2), equivalent(e2, e1))
            self.assertEqual(equivalent(e1, e2), implies(e1, e2) and implies(e2, e1))
            if implies(e1, e2) and implies(e2, e3):
                self.assertTrue(implies(e1, e3))
            if equivalent(e1, e2) and equivalent(e2, e3):
                self.assertTrue(equivalent(e1, e3))


class TestTruthTable(unittest.TestCase):
    def test_single_atom(self):
        self.assertEqual(np.flatnonzero(truth_table_sat_set(Atom("a"))).tolist(), [1])

    def test_disjunction(self):
        self.assertEqual(np.flatnonzero(truth_table_sat_set(parse_expr("a || b"))).tolist(), [1, 2, 3])

    def test_implication_jaccard(self):
        left = Or((Not(Atom("a")), Atom("b")))
        right = Or((Not(Atom("a")), Not(Atom("b"))))
        names = ("a", "b")
        s1, s2 = truth_table_sat_set(left, names), truth_table_sat_set(right, names)
        self.assertEqual(np.count_nonzero(s1 & s2) / np.count_nonzero(s1 | s2), 0.5)

    def test_limit(self):
        wide = make_and(Atom(f"x{i:02d}") for i in range(21))
        with self.assertRaises(TruthTableLimitError):
            truth_table_sat_set(wide)

    def test_explicit_atom_order(self):
        sat = truth_table_sat_set(Atom("b"), ("a", "b"))
        self.assertEqual(np.flatnonzero(sat).tolist(), [2, 3])

    def test_matches_satisfiable(self):
        rng = rng_for(33)
        for _ in range(trials(100, 1000)):
            e = random_expr(rng)
            self.assertEqual(bool(truth_table_sat_set(e).any()), satisfiable(e))


if __name__ == '__main__':
    unittest.main()
