#!/usr/bin/env python3
"""
tests/test_corpus.py
--------------------
Unit tests for corpus loading and saving in the JSON and line-based formats.
"""

import json
import os
import shutil
import tempfile
import unittest

from assertloom.assertion import print_assertion
from assertloom.corpus import (
    CorpusEntry, build_corpus, corpus_from_assertions, describe_error, load_corpus, save_corpus,
)
from assertloom.errors import AssertionSyntaxError, CorpusFormatError
from assertloom.parser import parse_assertion


class TestCorpusLoader(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def write(self, name, content):
        path = os.path.join(self.tmp, name)
        with open(path, "w", encoding="utf-8") as f:
            f.write(content if isinstance(content, str) else json.dumps(content))
        return path

    def test_load_json(self):
        path = self.write("demo.json", {
            "name": "demo",
            "assertions": [
                {"id": "a1", "clock": "clk", "text": "req |-> ##1 gnt"},
                {"id": "a2", "text": "@(posedge clk) x || y"},
            ],
        })
        corpus = load_corpus(path)
        self.assertEqual(corpus.name, "demo")
        self.assertEqual(corpus.ids, ["a1", "a2"])
        self.assertEqual(corpus.assertions[0].clock, "clk")
        self.assertTrue(corpus.assertions[1].is_propositional)
        self.assertEqual(corpus.assertions[1].clock, "clk")

    def test_clock_mismatch(self):
        path = self.write("bad.json", {"assertions": [{"id": "a1", "clock": "clk2", "text": "@(posedge clk) a |-> b"}]})
        with self.assertRaises(CorpusFormatError):
            load_corpus(path)

    def test_load_lines(self):
        path = self.write("block.sva", "// handshake\nreq |-> gnt;\n\n  a |-> ##1 b  // next cycle\n")
        corpus = load_corpus(path)
        self.assertEqual(corpus.name, "block")
        self.assertEqual(corpus.ids, ["l2", "l4"])
        self.assertEqual(print_assertion(corpus.assertions[1]), "a |-> ##1 b")

    def test_malformed_json(self):
        with self.assertRaises(CorpusFormatError):
            load_corpus(self.write("broken.json", "{\"assertions\": ["))

    def test_missing_fields(self):
        with self.assertRaises(CorpusFormatError):
            load_corpus(self.write("empty.json", {"name": "x"}))
        with self.assertRaises(CorpusFormatError):
            load_corpus(self.write("noid.json", {"assertions": [{"text": "a |-> b"}]}))

    def test_unsupported_extension(self):
        with self.assertRaises(CorpusFormatError):
            load_corpus(self.write("corpus.csv", "a |-> b"))

    def test_syntax_error_names_assertion(self):
        path = self.write("syntax.json", {"assertions": [{"id": "s9", "text": "a |-> && b"}]})
        with self.assertRaises(AssertionSyntaxError) as ctx:
            load_corpus(path)
        self.assertEqual(ctx.exception.assertion_id, "s9")
        self.assertTrue(describe_error(ctx.exception).startswith("syntax error in s9 at line 1"))

    def test_save_and_reload(self):
        corpus = build_corpus("round", [CorpusEntry("r1", "clk", "a && b |-> c"),
                                        CorpusEntry("r2", None, "x |-> ##[1:2] y")], {"origin": "test"})
        path = save_corpus(corpus, os.path.join(self.tmp, "nested", "round.json"))
        again = load_corpus(path)
        self.assertEqual(again.assertions, corpus.assertions)
        self.assertEqual(again.metadata, {"origin": "test"})

    def test_corpus_from_assertions(self):
        parsed = [parse_assertion("@(posedge clk) a |-> ##1 b", "p1"), parse_assertion("x || y", "p2")]
        corpus = corpus_from_assertions("wrapped", parsed)
        self.assertEqual(corpus.entries[0].text, "a |-> ##1 b")
        self.assertEqual(corpus.entries[0].clock, "clk")
        rebuilt = build_corpus("again", corpus.entries)
        self.assertEqual(rebuilt.assertions, parsed)


if __name__ == '__main__':
    unittest.main()
