#!/usr/bin/env python3
"""
embedding.py
------------
Natural-language rendering of assertions and pluggable sentence embedders.

  - render_nl() turns a normalized assertion into a fixed-template sentence,
    e.g. "if a and b hold, then c must also hold in the same cycle."
  - HashEmbedder hashes unigrams and bigrams into signed buckets with
    scikit-learn's HashingVectorizer (deterministic, no model download).
  - SentenceTransformerEmbedder runs a local sentence-transformers model
    (optional extra).
  - RemoteEmbedder posts batches to an embedding service:
        POST <url>/embed  {"texts": [...]}  ->  {"vectors": [[...], ...]}
    with at most `max_in_flight` concurrent batches.

Every backend's output is L2-normalized by embed(), so cosine is a dot product.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import requests
from sklearn.feature_extraction.text import HashingVectorizer

from .assertion import normalize_assertion
from .errors import EmbeddingError
from .expr import And, Atom, Const, Not, TRUE

logger = logging.getLogger(__name__)

EMBED_URL_ENV = "ARCANE_EMBED_URL"
DEFAULT_ST_MODEL = "all-MiniLM-L6-v2"


@dataclass(frozen=True)
class NlSentence:
    text: str
    source_id: str


def _expr_text(e, nested=False):
    if isinstance(e, Atom):
        return e.name
    if isinstance(e, Const):
        return "true" if e.value else "false"
    if isinstance(e, Not):
        return f"not {_expr_text(e.child, True)}"
    joiner = " and " if isinstance(e, And) else " or "
    text = joiner.join(_expr_text(c, True) for c in e.children)
    return f"({text})" if nested else text


def _cycles(delay):
    if delay.is_fixed:
        unit = "cycle" if delay.lo == 1 else "cycles"
        return f"after {delay.lo} {unit}"
    return f"after {delay.lo} to {delay.hi} cycles"


def _verb(e):
    return "hold" if isinstance(e, And) else "holds"


def _antecedent_text(seq):
    parts = []
    if not (seq.head == TRUE and seq.tail):
        parts.append(f"{_expr_text(seq.head)} {_verb(seq.head)}")
    for delay, expr in seq.tail:
        lead = "" if not parts else "and "
        parts.append(f"{lead}{_cycles(delay)} {_expr_text(expr)} {_verb(expr)}")
    return ", ".join(parts)


def _consequent_text(seq):
    steps = list(seq.tail)
    if seq.head == TRUE and steps:
        delay, first = steps.pop(0)
        timing = _cycles(delay)
    else:
        first, timing = seq.head, "in the same cycle"
    text = f"{_expr_text(first)} must also hold {timing}"
    for delay, expr in steps:
        text += f", then {_expr_text(expr)} {_cycles(delay)}"
    return text


def render_nl(a):
    """Fixed-template sentence for a (rendered from its normal form)."""
    a = normalize_assertion(a)
    clock = f"at every rising edge of {a.clock}, " if a.clock else ""
    if a.is_propositional:
        text = f"{clock}{_expr_text(a.consequent.head)} must always hold."
    else:
        text = f"{clock}if {_antecedent_text(a.antecedent)}, then {_consequent_text(a.consequent)}."
    return NlSentence(text, a.id)


class HashEmbedder:
    def __init__(self, dim=256):
        self.dim = dim
        self.vectorizer = HashingVectorizer(
            n_features=dim,
            ngram_range=(1, 2),
            token_pattern=r"(?u)\b\w+\b",
            lowercase=False,
            alternate_sign=True,
            norm="l2",
        )

    def encode(self, texts):
        return self.vectorizer.transform(texts).toarray()


class RemoteEmbedder:
    def __init__(self, url, batch_size=64, max_in_flight=4, timeout=30.0, retries=3):
        """
        Parameters:
          - url: service root; requests go to <url>/embed
          - batch_size: sentences per request
          - max_in_flight: concurrent requests
          - retries: attempts per batch before giving up
        """
        self.url = url.rstrip("/") + "/embed"
        self.batch_size = batch_size
        self.max_in_flight = max_in_flight
        self.timeout = timeout
        self.retries = retries

    def _post(self, texts):
        last_error = None
        for attempt in range(1, self.retries + 1):
            try:
                response = requests.post(self.url, json={"texts": texts}, timeout=self.timeout)
                if response.status_code != 200:
                    raise EmbeddingError(f"HTTP {response.status_code}")
                vectors = response.json().get("vectors")
                if not isinstance(vectors, list) or len(vectors) != len(texts):
                    raise EmbeddingError("response length does not match request")
                matrix = np.asarray(vectors, dtype=float)
                if matrix.ndim != 2:
                    raise EmbeddingError("vectors have inconsistent dimensions")
                return matrix
            except (requests.RequestException, ValueError, EmbeddingError) as e:
                last_error = e
                logger.warning("Embedding request to %s failed (attempt %d/%d): %s",
                               self.url, attempt, self.retries, e)
        logger.error("Embedding service %s unreachable after %d attempts", self.url, self.retries)
        raise EmbeddingError(f"{self.url} failed after {self.retries} attempts: {last_error}")

    def encode(self, texts):
        batches = [texts[i:i + self.batch_size] for i in range(0, len(texts), self.batch_size)]
        with ThreadPoolExecutor(max_workers=self.max_in_flight) as executor:
            parts = list(executor.map(self._post, batches))
        dims = {part.shape[1] for part in parts}
        if len(dims) != 1:
            raise EmbeddingError(f"Embedding dimension changed between batches: {sorted(dims)}")
        return np.vstack(parts)


class SentenceTransformerEmbedder:
    """Local sentence-transformers model; the package is an optional extra."""

    def __init__(self, model_name=DEFAULT_ST_MODEL, batch_size=64):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as e:
            logger.error("sentence-transformers is not installed")
            raise EmbeddingError("sentence-transformers is not installed; "
                                 "pip install 'CyberXAssertLoom[sentence]'") from e
        self.model_name = model_name
        self.batch_size = batch_size
        self.model = SentenceTransformer(model_name)

    def encode(self, texts):
        return self.model.encode(
            list(texts),
            batch_size=self.batch_size,
            convert_to_numpy=True,
            normalize_embeddings=True,
            show_progress_bar=False,
        )


def make_embedder(choice="hash", dim=256):
    """
    'hash', 'remote' (URL from ARCANE_EMBED_URL), an explicit http(s) URL,
    or 'st[:<model>]' for a local sentence-transformers model.
    """
    if choice == "hash":
        return HashEmbedder(dim)
    if choice == "st" or choice.startswith("st:"):
        return SentenceTransformerEmbedder(choice[3:] or DEFAULT_ST_MODEL)
    if choice == "remote":
        url = os.environ.get(EMBED_URL_ENV)
        if not url:
            logger.error("--embedder remote needs %s to be set", EMBED_URL_ENV)
            raise EmbeddingError(f"{EMBED_URL_ENV} is not set")
        return RemoteEmbedder(url)
    if choice.startswith(("http://", "https://")):
        return RemoteEmbedder(choice)
    raise ValueError(f"Unknown embedder: {choice}")


def embed(batch, embedder=None):
    """One unit-norm row per sentence."""
    if not batch:
        raise ValueError("embed() needs a non-empty batch")
    embedder = embedder or HashEmbedder()
    vectors = np.asarray(embedder.encode([s.text for s in batch]), dtype=float)
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    if np.any(norms == 0):
        logger.warning("Embedder returned %d zero vectors", int(np.count_nonzero(norms == 0)))
    return vectors / np.where(norms == 0, 1.0, norms)


def cosine(v1, v2):
    if v1.shape != v2.shape:
        raise ValueError(f"Dimension mismatch: {v1.shape} vs {v2.shape}")
    return float(np.dot(v1, v2))


def clamp(similarity):
    return max(0.0, similarity)


def similarity_matrix(vectors):
    """Clamped pairwise cosine with a unit diagonal."""
    s = np.clip(vectors @ vectors.T, 0.0, 1.0)
    np.fill_diagonal(s, 1.0)
    return s
