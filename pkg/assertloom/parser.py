#!/usr/bin/env python3
"""
parser.py
---------
AssertionParser reads the assertion grammar with pyparsing:

    assertion := [clock] ( seq "|->" seq | seq "|=>" seq | boolexpr )
    clock     := "@(posedge" IDENT ")"
    seq       := [ "##" delay ] item { "##" delay item }
    item      := boolexpr | "(" seq ")"
    delay     := INT | "[" INT ":" INT "]"
    boolexpr  := and { ("||"|"|") and }
    and       := unary { ("&&"|"&") unary }
    unary     := "!" unary | "(" boolexpr ")" | IDENT | "1" | "0"

`a |=> b` is desugared to `a |-> ##1 b`. Every failure surfaces as an
AssertionSyntaxError carrying line and column.
"""

import logging

import pyparsing as pp

from .assertion import Assertion, AssertionKind, Delay, Sequence, normalize_sequence, propositional
from .errors import AssertionSyntaxError
from .expr import And, Atom, Const, Not, Or, TRUE

logger = logging.getLogger(__name__)

pp.ParserElement.enable_packrat()


def _fold(node_type):
    def action(tokens):
        items = list(tokens)
        if len(items) == 1:
            return items[0]
        return node_type(tuple(items))
    return action


def _make_delay(s, loc, tokens):
    if len(tokens) == 1:
        n = int(tokens[0])
        return Delay(n, n)
    lo, hi = int(tokens[0]), int(tokens[1])
    if hi < lo:
        raise pp.ParseFatalException(s, loc, f"delay range ##[{lo}:{hi}] has hi < lo")
    return Delay(lo, hi)


def _as_sequence(item):
    return item if isinstance(item, Sequence) else Sequence(item)


def _make_sequence(tokens):
    current = None
    pending = None
    for token in tokens:
        if isinstance(token, Delay):
            pending = token
            if current is None:
                current = Sequence(TRUE)
            continue
        part = _as_sequence(token)
        current = part if current is None else current.concat(pending, part)
        pending = None
    return normalize_sequence(current)


def _build_grammar():
    ident = pp.Regex(r"[A-Za-z_][A-Za-z0-9_]*")
    integer = pp.Regex(r"\d+")
    lpar, rpar = pp.Suppress("("), pp.Suppress(")")
    not_op = pp.Suppress("!")
    and_op = pp.Suppress(pp.Regex(r"&&?"))
    or_op = pp.Suppress(pp.Regex(r"\|\|?(?![-=]>)"))

    const = pp.Regex(r"[01](?![0-9A-Za-z_])").set_parse_action(lambda t: Const(t[0] == "1"))
    atom = ident.copy().set_parse_action(lambda t: Atom(t[0]))

    boolexpr = pp.Forward()
    unary = pp.Forward()
    negation = (not_op + unary).set_parse_action(lambda t: Not(t[0]))
    unary <<= negation | (lpar + boolexpr + rpar) | const | atom
    conjunction = (unary + pp.ZeroOrMore(and_op + unary)).set_parse_action(_fold(And))
    disjunction = (conjunction + pp.ZeroOrMore(or_op + conjunction)).set_parse_action(_fold(Or))
    boolexpr <<= disjunction

    range_delay = pp.Suppress("[") + integer + pp.Suppress(":") + integer + pp.Suppress("]")
    delay = (pp.Suppress("##") + (range_delay | integer)).set_parse_action(_make_delay)

    seq = pp.Forward()
    item = boolexpr | (lpar + seq + rpar)
    seq <<= (pp.Optional(delay) + item + pp.ZeroOrMore(delay + item)).set_parse_action(_make_sequence)

    clock = pp.Suppress("@") + lpar + pp.Suppress(pp.Keyword("posedge")) + ident("clock") + rpar
    implication = seq + pp.Regex(r"\|[-=]>")("op") + seq
    assertion = pp.Optional(clock) + (implication | boolexpr)
    return assertion, boolexpr, seq


_ASSERTION, _BOOLEXPR, _SEQUENCE = _build_grammar()


class AssertionParser:
    def __init__(self, text, assertion_id=""):
        """
        Parameters:
          - text: assertion source text
          - assertion_id: id attached to the result and to error messages
        """
        self.text = text
        self.assertion_id = assertion_id

    def _run(self, element):
        if not self.text or not self.text.strip():
            logger.error("Empty assertion text for id %s", self.assertion_id)
            raise AssertionSyntaxError("empty expression", 1, 1, self.assertion_id)
        try:
            return element.parse_string(self.text, parse_all=True)
        except pp.ParseBaseException as e:
            logger.error("Syntax error in %s at %d:%d: %s", self.assertion_id, e.lineno, e.col, e.msg)
            raise AssertionSyntaxError(e.msg, e.lineno, e.col, self.assertion_id) from e

    def parse(self):
        tokens = self._run(_ASSERTION)
        clock = tokens.get("clock")
        op = tokens.get("op")
        nodes = [t for t in tokens if not isinstance(t, str)]
        if op is None:
            return propositional(self.assertion_id, nodes[0], clock)
        antecedent, consequent = nodes
        if op == "|=>":
            consequent = normalize_sequence(Sequence(TRUE).concat(Delay(1, 1), consequent))
        return Assertion(self.assertion_id, clock, antecedent, consequent, AssertionKind.IMPLICATION)

    def parse_expr(self):
        return self._run(_BOOLEXPR)[0]

    def parse_sequence(self):
        return self._run(_SEQUENCE)[0]


def parse_assertion(text, assertion_id=""):
    return AssertionParser(text, assertion_id).parse()


def parse_expr(text):
    return AssertionParser(text).parse_expr()


def parse_sequence(text):
    return AssertionParser(text).parse_sequence()
