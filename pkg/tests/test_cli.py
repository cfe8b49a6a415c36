#!/usr/bin/env python3
"""
tests/test_cli.py
-----------------
Tests for the command-line entry point: generate, reduce and check, and the
exit codes for input errors and counterexamples.
"""

import contextlib
import io
import json
import os
import shutil
import tempfile
import unittest

from cli.main import EXIT_COUNTEREXAMPLE, EXIT_INPUT, EXIT_OK, main


class TestCli(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def path(self, *parts):
        return os.path.join(self.tmp, *parts)

    def run_main(self, *argv):
        with contextlib.redirect_stdout(io.StringIO()) as out:
            code = main(list(argv))
        return code, out.getvalue()

    def write(self, name, text):
        with open(self.path(name), "w", encoding="utf-8") as f:
            f.write(text)
        return self.path(name)

    def test_generate_reduce_check(self):
        corpus = self.path("synthetic.json")
        code, out = self.run_main("generate", "--n", "3", "--r", "2", "--seed", "1", "--out", corpus)
        self.assertEqual(code, EXIT_OK)
        self.assertIn("9 assertions (6 planted)", out)
        with open(corpus, encoding="utf-8") as f:
            data = json.load(f)
        self.assertEqual(len(data["assertions"]), 9)
        self.assertEqual(len(data["metadata"]["ground_truth"]), 6)

        code, out = self.run_main("reduce", "--corpus", corpus, "--out", self.path("out"),
                                  "--lasso-samples", "100", "--workers", "2")
        self.assertEqual(code, EXIT_OK)
        reduced = self.path("out", "synthetic_n3_r2_s1_reduced.json")
        report = self.path("out", "synthetic_n3_r2_s1_report.json")
        self.assertTrue(os.path.exists(reduced))
        with open(report, encoding="utf-8") as f:
            self.assertEqual(json.load(f)["original_count"], 9)

        code, out = self.run_main("check", "--corpus", corpus, "--corpus", reduced, "--lasso-samples", "100")
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(out.startswith("equivalent"))

    def test_text_report(self):
        corpus = self.write("pair.sva", "a |-> b\na |-> b && b\n")
        code, _ = self.run_main("reduce", "--corpus", corpus, "--out", self.path("out"), "--report", "text",
                                "--lasso-samples", "100", "--workers", "2", "--lasso-measure", "jaccard")
        self.assertEqual(code, EXIT_OK)
        with open(self.path("out", "pair_report.txt"), encoding="utf-8") as f:
            self.assertTrue(f.readline().startswith("Design | N Orig."))

    def test_check_counterexample(self):
        first = self.write("first.sva", "a |-> b\n")
        second = self.write("second.sva", "a |-> !b\n")
        code, out = self.run_main("check", "--corpus", first, "--corpus", second, "--lasso-samples", "100")
        self.assertEqual(code, EXIT_COUNTEREXAMPLE)
        self.assertIn("counterexample", out)

    def test_missing_corpus(self):
        code, _ = self.run_main("reduce", "--corpus", self.path("nope.json"), "--out", self.path("out"))
        self.assertEqual(code, EXIT_INPUT)

    def test_syntax_error(self):
        corpus = self.write("broken.sva", "a |-> && b\n")
        code, _ = self.run_main("reduce", "--corpus", corpus, "--out", self.path("out"))
        self.assertEqual(code, EXIT_INPUT)

    def test_bad_weights(self):
        corpus = self.write("ok.sva", "a |-> b\n")
        code, _ = self.run_main("reduce", "--corpus", corpus, "--out", self.path("out"),
                                "--alpha", "0.5", "--beta", "0.6")
        self.assertEqual(code, EXIT_INPUT)

    def test_check_needs_two_corpora(self):
        corpus = self.write("one.sva", "a |-> b\n")
        code, _ = self.run_main("check", "--corpus", corpus)
        self.assertEqual(code, EXIT_INPUT)


if __name__ == '__main__':
    unittest.main()
