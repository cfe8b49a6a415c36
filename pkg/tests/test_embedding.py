#!/usr/bin/env python3
"""
tests/test_embedding.py
-----------------------
Unit tests for sentence rendering and the embedding backends. The remote
backend is exercised against a mocked HTTP layer.
"""

import os
import re
import sys
import types
import unittest
from unittest import mock

import numpy as np
import requests
from sklearn.utils import murmurhash3_32

from assertloom.assertion import print_assertion
from assertloom.embedding import (
    DEFAULT_ST_MODEL, EMBED_URL_ENV, HashEmbedder, NlSentence, RemoteEmbedder, SentenceTransformerEmbedder,
    clamp, cosine, embed, make_embedder, render_nl, similarity_matrix,
)
from assertloom.errors import EmbeddingError
from assertloom.parser import parse_assertion
from assertloom.synthesizer import generate_synthetic
from generators import trials


def sentence(text):
    return render_nl(parse_assertion(text, "s")).text


def signed_buckets(text, dim):
    """Unigrams and bigrams hashed with 32-bit murmur3: bucket |h| mod dim, sign of h."""
    tokens = re.findall(r"(?u)\b\w+\b", text)
    v = np.zeros(dim)
    for feature in tokens + [f"{x} {y}" for x, y in zip(tokens, tokens[1:])]:
        h = murmurhash3_32(feature, seed=0)
        v[abs(h) % dim] += 1.0 if h >= 0 else -1.0
    return v / np.linalg.norm(v)


def fake_response(vectors, status=200):
    response = mock.Mock()
    response.status_code = status
    response.json.return_value = {"vectors": vectors}
    return response


class TestRenderNl(unittest.TestCase):
    def test_same_cycle(self):
        self.assertEqual(sentence("a && b |-> c"), "if a and b hold, then c must also hold in the same cycle.")

    def test_delayed_consequent(self):
        self.assertEqual(sentence("a |-> ##2 c"), "if a holds, then c must also hold after 2 cycles.")

    def test_antecedent_steps(self):
        self.assertEqual(sentence("a ##1 b |-> c"),
                         "if a holds, and after 1 cycle b holds, then c must also hold in the same cycle.")

    def test_propositional(self):
        self.assertEqual(sentence("x && !x"), "x and not x must always hold.")

    def test_clock_prefix(self):
        self.assertTrue(sentence("@(posedge clk) a |-> b").startswith("at every rising edge of clk, if a holds"))

    def test_source_id(self):
        self.assertEqual(render_nl(parse_assertion("a |-> b", "q7")).source_id, "q7")

    def test_normal_form_rendered(self):
        self.assertEqual(sentence("(a)&&(b)|->c"), sentence("a && b |-> c"))

    def test_injective_on_generated_corpora(self):
        for seed in range(trials(3, 20)):
            generated, _ = generate_synthetic(20, 3, seed=seed)
            printed_by_text = {}
            for a in generated.assertions:
                text = render_nl(a).text
                key = print_assertion(a)
                self.assertEqual(printed_by_text.setdefault(text, key), key, f"seed {seed}: {text}")


class TestHashEmbedder(unittest.TestCase):
    def test_deterministic_unit_rows(self):
        batch = [NlSentence("if a holds, then b must also hold in the same cycle.", "1"),
                 NlSentence("x and not x must always hold.", "2")]
        first = embed(batch, HashEmbedder(64))
        second = embed(batch, HashEmbedder(64))
        np.testing.assert_array_equal(first, second)
        self.assertEqual(first.shape, (2, 64))
        np.testing.assert_allclose(np.linalg.norm(first, axis=1), [1.0, 1.0])

    def test_matches_signed_murmur_buckets(self):
        text = "at every rising edge of clk, if req holds, then gnt must also hold after 2 cycles."
        v = embed([NlSentence(text, "g")], HashEmbedder(256))[0]
        np.testing.assert_allclose(v, signed_buckets(text, 256), atol=1e-12)

    def test_single_token_is_one_signed_bucket(self):
        h = murmurhash3_32("ready", seed=0)
        v = embed([NlSentence("ready", "g")], HashEmbedder(256))[0]
        expected = np.zeros(256)
        expected[abs(h) % 256] = 1.0 if h >= 0 else -1.0
        np.testing.assert_array_equal(v, expected)

    def test_identical_sentences_match(self):
        text = sentence("a |-> b")
        v = embed([NlSentence(text, "1"), NlSentence(text, "2")])
        self.assertAlmostEqual(cosine(v[0], v[1]), 1.0)

    def test_empty_batch(self):
        with self.assertRaises(ValueError):
            embed([])


class TestCosine(unittest.TestCase):
    def test_values(self):
        v = np.array([0.6, 0.8])
        self.assertAlmostEqual(cosine(v, v), 1.0)
        self.assertAlmostEqual(cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])), 0.0)
        self.assertEqual(clamp(cosine(v, -v)), 0.0)

    def test_dimension_mismatch(self):
        with self.assertRaises(ValueError):
            cosine(np.zeros(2), np.zeros(3))

    def test_similarity_matrix(self):
        vectors = np.array([[1.0, 0.0], [-1.0, 0.0], [0.6, 0.8]])
        s = similarity_matrix(vectors)
        np.testing.assert_allclose(np.diag(s), 1.0)
        self.assertEqual(s[0, 1], 0.0)
        self.assertAlmostEqual(s[0, 2], 0.6)


class TestRemoteEmbedder(unittest.TestCase):
    def setUp(self):
        self.batch = [NlSentence("alpha", "1"), NlSentence("beta", "2"), NlSentence("gamma", "3")]

    @mock.patch("assertloom.embedding.requests.post")
    def test_batches_and_normalizes(self, post):
        post.side_effect = lambda url, json, timeout: fake_response([[3.0, 4.0]] * len(json["texts"]))
        v = embed(self.batch, RemoteEmbedder("http://embed.local/", batch_size=2))
        self.assertEqual(post.call_count, 2)
        self.assertEqual(post.call_args[0][0], "http://embed.local/embed")
        np.testing.assert_allclose(v, [[0.6, 0.8]] * 3)

    @mock.patch("assertloom.embedding.requests.post")
    def test_length_mismatch(self, post):
        post.return_value = fake_response([[1.0, 0.0]])
        with self.assertRaises(EmbeddingError):
            embed(self.batch, RemoteEmbedder("http://embed.local", retries=1))

    @mock.patch("assertloom.embedding.requests.post")
    def test_http_error(self, post):
        post.return_value = fake_response([], status=503)
        with self.assertRaises(EmbeddingError):
            embed(self.batch, RemoteEmbedder("http://embed.local", retries=2))
        self.assertEqual(post.call_count, 2)

    @mock.patch("assertloom.embedding.requests.post")
    def test_connection_error_is_retried(self, post):
        post.side_effect = requests.ConnectionError("refused")
        with self.assertRaises(EmbeddingError):
            embed(self.batch, RemoteEmbedder("http://embed.local", retries=3))
        self.assertEqual(post.call_count, 3)

    @mock.patch("assertloom.embedding.requests.post")
    def test_dimension_change_between_batches(self, post):
        post.side_effect = lambda url, json, timeout: fake_response(
            [[1.0] * (len(json["texts"]) + 1)] * len(json["texts"]))
        with self.assertRaises(EmbeddingError):
            embed(self.batch, RemoteEmbedder("http://embed.local", batch_size=2))


class TestMakeEmbedder(unittest.TestCase):
    def test_hash(self):
        self.assertIsInstance(make_embedder("hash", 32), HashEmbedder)

    def test_remote_needs_environment(self):
        with mock.patch.dict(os.environ, {}, clear=False):
            os.environ.pop(EMBED_URL_ENV, None)
            with self.assertRaises(EmbeddingError):
                make_embedder("remote")

    def test_remote_from_environment(self):
        with mock.patch.dict(os.environ, {EMBED_URL_ENV: "http://svc:9000"}):
            self.assertEqual(make_embedder("remote").url, "http://svc:9000/embed")

    def test_explicit_url(self):
        self.assertEqual(make_embedder("https://svc").url, "https://svc/embed")

    def test_sentence_transformers_missing(self):
        with mock.patch.dict(sys.modules, {"sentence_transformers": None}):
            with self.assertRaises(EmbeddingError):
                make_embedder("st")

    def test_sentence_transformers_model(self):
        fake = types.ModuleType("sentence_transformers")
        fake.SentenceTransformer = mock.Mock()
        fake.SentenceTransformer.return_value.encode.return_value = np.array([[3.0, 4.0]])
        with mock.patch.dict(sys.modules, {"sentence_transformers": fake}):
            embedder = make_embedder("st:paraphrase-MiniLM-L3-v2")
            vectors = embed([NlSentence("a must always hold.", "x")], embedder)
        self.assertIsInstance(embedder, SentenceTransformerEmbedder)
        fake.SentenceTransformer.assert_called_once_with("paraphrase-MiniLM-L3-v2")
        kwargs = fake.SentenceTransformer.return_value.encode.call_args.kwargs
        self.assertTrue(kwargs["normalize_embeddings"])
        np.testing.assert_allclose(vectors, [[0.6, 0.8]])

    def test_sentence_transformers_default_model(self):
        fake = types.ModuleType("sentence_transformers")
        fake.SentenceTransformer = mock.Mock()
        with mock.patch.dict(sys.modules, {"sentence_transformers": fake}):
            self.assertEqual(make_embedder("st").model_name, DEFAULT_ST_MODEL)

    def test_unknown(self):
        with self.assertRaises(ValueError):
            make_embedder("word2vec")


if __name__ == '__main__':
    unittest.main()
