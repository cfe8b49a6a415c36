#!/usr/bin/env python3
"""
tests/test_pipeline.py
----------------------
End-to-end tests: classify, reduce and certify a synthetic corpus, plus the
equivalence check between two corpora.
"""

import unittest
from unittest import mock

from assertloom.config import ClusterConfig, PipelineConfig, RuleConfig, SearchConfig
from assertloom.corpus import corpus_from_assertions
from assertloom.errors import EmbeddingError, PipelineStageError
from assertloom.parser import parse_assertion
from assertloom.pipeline import check, run_pipeline
from assertloom.synthesizer import generate_synthetic
from generators import FULL_SUITE


def fast_config(seed=0):
    return PipelineConfig(
        cluster=ClusterConfig(lasso_samples=100, workers=4),
        rules=RuleConfig(certify_samples=100, refutation_samples=100, seed=seed),
        search=SearchConfig(patience=6, seed=seed),
        seed=seed,
    )


def corpus_of(name, *texts):
    return corpus_from_assertions(name, [parse_assertion(t, f"{name}{i + 1}") for i, t in enumerate(texts)])


class TestRunPipeline(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.corpus, cls.truth = generate_synthetic(10, 3, seed=11)
        cls.reduced, cls.report = run_pipeline(cls.corpus, fast_config())

    def test_planted_redundancy_removed(self):
        self.assertEqual(self.report.original_count, 40)
        self.assertGreaterEqual(self.report.reduction_ratio, 0.68)
        self.assertEqual(len(self.reduced.assertions), self.report.reduced_count)

    def test_no_incidents(self):
        self.assertEqual(self.report.incidents, [])
        self.assertEqual(self.report.certificates["failed"], 0)
        self.assertEqual(self.report.certificates["checked"], len(self.report.clusters))

    def test_rule_deltas_account_for_reduction(self):
        removed = self.report.original_count - self.report.reduced_count
        self.assertEqual(sum(self.report.rule_deltas.values()), removed)

    def test_clusters_cover_corpus(self):
        members = sorted(i for c in self.report.clusters for i in c["members"])
        self.assertEqual(members, sorted(self.corpus.ids))

    def test_reduced_corpus_is_equivalent(self):
        result = check(self.corpus, self.reduced, fast_config())
        self.assertTrue(result.equivalent)

    def test_deterministic(self):
        _, again = run_pipeline(self.corpus, fast_config())
        self.assertEqual(again.deterministic_view(), self.report.deterministic_view())

    def test_config_echo(self):
        self.assertEqual(self.report.config["lasso_samples"], 100)
        self.assertEqual(self.report.config["alpha"], 0.4)
        self.assertEqual(self.report.config["lasso_measure"], "overlap")
        config = fast_config()
        sections = {**config.cluster.echo(), **config.rules.echo(), **config.search.echo()}
        self.assertEqual(config.echo(), {"seed": 0, **sections})


@unittest.skipUnless(FULL_SUITE, "set ASSERTLOOM_FULL_SUITE=1 for the multi-seed ratio run")
class TestReductionRatio(unittest.TestCase):
    def test_mean_ratio_over_seeds(self):
        ratios = []
        for seed in range(20):
            corpus, _ = generate_synthetic(20, 3, seed=seed)
            reduced, report = run_pipeline(corpus, fast_config(seed))
            self.assertEqual(report.incidents, [])
            self.assertTrue(check(corpus, reduced, fast_config(seed)).equivalent)
            ratios.append(report.reduction_ratio)
        self.assertGreaterEqual(sum(ratios) / len(ratios), 0.68)


class TestPipelineEdges(unittest.TestCase):
    def test_falsum_reported(self):
        corpus = corpus_of("f", "1 |-> 0", "x |-> y")
        reduced, report = run_pipeline(corpus, fast_config())
        self.assertEqual(report.falsum, ["f1"])
        self.assertEqual(report.reduced_count, 2)

    def test_stage_failure_names_stage(self):
        embedder = mock.Mock()
        embedder.encode.side_effect = EmbeddingError("service down")
        with self.assertRaises(PipelineStageError) as ctx:
            run_pipeline(corpus_of("e", "a |-> b", "c |-> d"), fast_config(), embedder)
        self.assertEqual(ctx.exception.stage, "classify")
        self.assertIsInstance(ctx.exception.cause, EmbeddingError)

    def test_empty_corpus(self):
        reduced, report = run_pipeline(corpus_of("z"), fast_config())
        self.assertEqual(report.original_count, 0)
        self.assertEqual(report.reduction_ratio, 0.0)
        self.assertEqual(len(reduced.assertions), 0)


class TestCheck(unittest.TestCase):
    def test_sat_proof(self):
        result = check(corpus_of("a", "a |-> b", "a |-> c"), corpus_of("b", "a |-> b && c"), fast_config())
        self.assertTrue(result.equivalent)
        self.assertEqual(result.method, "sat")

    def test_counterexample(self):
        result = check(corpus_of("a", "a |-> b", "a |-> c"), corpus_of("b", "a |-> b"), fast_config())
        self.assertFalse(result.equivalent)
        self.assertEqual(result.method, "lasso")
        self.assertIsNotNone(result.counterexample)

    def test_opaque_sets_use_lassos(self):
        config = fast_config()
        config.rules.expansion_cap = 1
        result = check(corpus_of("a", "a ##[1:2] b |-> c"), corpus_of("b", "a ##[1:2] b |-> c"), config)
        self.assertTrue(result.equivalent)
        self.assertEqual(result.method, "lasso")


if __name__ == '__main__':
    unittest.main()
