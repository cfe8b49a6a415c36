#!/usr/bin/env python3
"""
entailment.py
-------------
Propositional decision procedures behind the rewrite rules:
  - CnfFormula and a Tseitin encoder (fresh variables named `_tX`),
  - a complete DPLL solver with unit propagation and pure-literal elimination,
  - entailment, equivalence and implication queries over timed atoms,
  - the 2^N truth-table fast path used by clustering.

Every query counts the original (non-Tseitin) variables against a budget and
refuses with SatBudgetError when it is exceeded. Callers treat a refusal as
"not entailed", which never licenses a rewrite.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import SatBudgetError, TruthTableLimitError
from .expr import And, Atom, Const, Not, Or, atoms, evaluate_columns, make_and, normalize

logger = logging.getLogger(__name__)

DEFAULT_VAR_BUDGET = 64
DEFAULT_TRUTH_TABLE_LIMIT = 20


@dataclass
class CnfFormula:
    clauses: list = field(default_factory=list)
    variables: dict = field(default_factory=dict)
    fresh_vars: set = field(default_factory=set)

    def var(self, name):
        index = self.variables.get(name)
        if index is None:
            index = len(self.variables) + 1
            self.variables[name] = index
        return index

    def fresh(self):
        n = len(self.fresh_vars)
        while f"_t{n}" in self.variables:
            n += 1
        index = self.var(f"_t{n}")
        self.fresh_vars.add(index)
        return index

    def add_clause(self, literals):
        self.clauses.append(tuple(literals))

    @property
    def original_var_count(self):
        return len(self.variables) - len(self.fresh_vars)


def _encode(e, f):
    """Returns a literal equivalent to e, adding its defining clauses to f."""
    if isinstance(e, Atom):
        return f.var(e.name)
    if isinstance(e, Not):
        return -_encode(e.child, f)
    literals = [_encode(c, f) for c in e.children]
    gate = f.fresh()
    if isinstance(e, And):
        for lit in literals:
            f.add_clause((-gate, lit))
        f.add_clause([gate] + [-lit for lit in literals])
    else:
        f.add_clause([-gate] + literals)
        for lit in literals:
            f.add_clause((gate, -lit))
    return gate


def tseitin(e, f=None):
    """Adds clauses asserting e to f (a new CnfFormula by default)."""
    f = f if f is not None else CnfFormula()
    e = normalize(e)
    if isinstance(e, Const):
        if not e.value:
            f.add_clause(())
        return f
    for conjunct in (e.children if isinstance(e, And) else (e,)):
        if isinstance(conjunct, Or) and all(isinstance(c, (Atom, Not)) for c in conjunct.children):
            f.add_clause(_encode(c, f) for c in conjunct.children)
        else:
            f.add_clause((_encode(conjunct, f),))
    return f


class DpllSolver:
    def __init__(self, clauses):
        self.clauses = [frozenset(c) for c in clauses]

    @staticmethod
    def simplify(cnf, lit):
        reduced = []
        for clause in cnf:
            if lit in clause:
                continue
            if -lit in clause:
                clause = clause - {-lit}
            reduced.append(clause)
        return reduced

    def _propagate(self, cnf, assignment):
        while True:
            if any(not clause for clause in cnf):
                return None
            unit = next((clause for clause in cnf if len(clause) == 1), None)
            if unit is not None:
                lit = next(iter(unit))
                assignment[abs(lit)] = lit > 0
                cnf = self.simplify(cnf, lit)
                continue
            literals = {lit for clause in cnf for lit in clause}
            pure = [lit for lit in literals if -lit not in literals]
            if not pure:
                return cnf
            for lit in sorted(pure):
                assignment[abs(lit)] = lit > 0
                cnf = self.simplify(cnf, lit)

    def _dpll(self, cnf, assignment):
        cnf = self._propagate(cnf, assignment)
        if cnf is None:
            return None
        if not cnf:
            return assignment
        var = abs(min(cnf[0], key=abs))
        for value in (var, -var):
            trial = dict(assignment)
            trial[var] = value > 0
            result = self._dpll(self.simplify(cnf, value), trial)
            if result is not None:
                return result
        return None

    def solve(self):
        """A satisfying assignment (var index -> bool), or None."""
        return self._dpll(list(self.clauses), {})


def is_sat(f, budget=DEFAULT_VAR_BUDGET):
    if budget is not None and f.original_var_count > budget:
        logger.warning("SAT query refused: %d variables exceed budget %d", f.original_var_count, budget)
        raise SatBudgetError(f"{f.original_var_count} variables exceed budget {budget}")
    return DpllSolver(f.clauses).solve() is not None


def satisfiable(e, budget=DEFAULT_VAR_BUDGET):
    return is_sat(tseitin(e), budget)


def _literal_expr(lit):
    return lit.to_expr() if hasattr(lit, "to_expr") else lit


def entails(pre, lit, budget=DEFAULT_VAR_BUDGET):
    """pre |= lit, decided as Unsat(pre & !lit). lit is a TimedLiteral or a BoolExpr."""
    return not satisfiable(make_and([pre, Not(_literal_expr(lit))]), budget)


def implies(e1, e2, budget=DEFAULT_VAR_BUDGET):
    return not satisfiable(make_and([e1, Not(e2)]), budget)


def equivalent(e1, e2, budget=DEFAULT_VAR_BUDGET):
    return implies(e1, e2, budget) and implies(e2, e1, budget)


def truth_table_sat_set(e, atom_names=None, limit=DEFAULT_TRUTH_TABLE_LIMIT):
    """
    Boolean array of length 2^n: entry i is True iff assignment i satisfies e.
    Atoms are ordered lexicographically; bit j of i is the value of atom j.
    """
    names = sorted(atom_names if atom_names is not None else atoms(e))
    n = len(names)
    if n > limit:
        raise TruthTableLimitError(f"{n} atoms exceed truth-table limit {limit}")
    index = np.arange(1 << n, dtype=np.int64)
    columns = {name: ((index >> j) & 1).astype(bool) for j, name in enumerate(names)}
    return evaluate_columns(e, columns, 1 << n)

