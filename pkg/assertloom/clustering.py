#!/usr/bin/env python3
"""
clustering.py
-------------
Groups assertions by fused linguistic and behavioural similarity.

classify() runs in three tiers:
  1. sentences are embedded and split into coarse groups (connected components
     of the clamped-cosine >= threshold graph),
  2. inside every group, every assertion gets an acceptance vector over one
     shared lasso pool (small propositional assertions are read off their
     truth table letter by letter) and pairs are compared with the overlap
     coefficient |A & B| / min(|A|, |B|) or the Jaccard index,
  3. s = alpha * s_nl + beta * s_lasso is turned into a distance and clustered
     with DBSCAN over the precomputed matrix.
Noise points come back as singleton clusters.
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from sklearn.cluster import DBSCAN

from .assertion import atomic_propositions
from .automata import (
    LASSO_MEASURE_FUNCTIONS, acceptance_vector, ltl_to_buchi, pool_ids, sample_lassos, vector_from,
)
from .config import ClusterConfig
from .entailment import truth_table_sat_set
from .errors import AutomatonBudgetError, LtlConversionError, WeightError
from .embedding import embed, make_embedder, render_nl, similarity_matrix
from .hashing import derive_seed
from .ltl import eval_on_lasso
from .temporal import to_ltl

logger = logging.getLogger(__name__)

_EPS_TOLERANCE = 1e-9


class AcceptanceCounter:
    """Thread-safe count of lasso acceptance checks."""

    def __init__(self):
        self._lock = threading.Lock()
        self.value = 0

    def add(self, n):
        with self._lock:
            self.value += n


@dataclass
class SimilarityMatrix:
    ids: list
    s_nl: np.ndarray
    s_lasso: np.ndarray
    s_fused: np.ndarray
    d: np.ndarray
    flags: list = field(default_factory=list)


@dataclass
class ClusterSet:
    clusters: list = field(default_factory=list)
    noise_as_singletons: bool = True
    stats: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.clusters)


def coarse_partition(vectors, tau):
    """Index groups: connected components of the clamped-cosine >= tau graph."""
    n = len(vectors)
    if n == 0:
        return []
    adjacency = csr_matrix(similarity_matrix(vectors) >= tau)
    _, labels = connected_components(adjacency, directed=False)
    groups = {}
    for i, label in enumerate(labels):
        groups.setdefault(label, []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def fuse(s_nl, s_lasso, alpha=0.4, beta=0.6, ids=None):
    """
    Entries of s_lasso that are NaN (no behaviour score) fall back to s_nl and
    are recorded in flags.
    """
    if abs(alpha + beta - 1.0) > 1e-9:
        logger.error("Fusion weights alpha=%s beta=%s do not sum to 1", alpha, beta)
        raise WeightError(f"alpha + beta must equal 1 (got {alpha} + {beta})")
    s_nl = np.asarray(s_nl, dtype=float)
    s_lasso = np.asarray(s_lasso, dtype=float)
    missing = np.isnan(s_lasso)
    fused = np.where(missing, s_nl, alpha * s_nl + beta * np.nan_to_num(s_lasso))
    np.fill_diagonal(fused, 1.0)
    d = np.clip(1.0 - fused, 0.0, 1.0)
    np.fill_diagonal(d, 0.0)
    ids = list(ids) if ids is not None else list(range(len(s_nl)))
    flags = [
        f"embedding-only similarity for ({ids[i]}, {ids[j]})"
        for i, j in zip(*np.nonzero(np.triu(missing, 1)))
    ]
    return SimilarityMatrix(ids, s_nl, s_lasso, fused, d, flags)


def dbscan(m, eps=0.15, min_pts=2):
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    if len(m.ids) == 0:
        return ClusterSet()
    labels = DBSCAN(eps=eps + _EPS_TOLERANCE, min_samples=min_pts, metric="precomputed").fit_predict(m.d)
    clusters = {}
    singletons = []
    for i, label in enumerate(labels):
        if label < 0:
            singletons.append([m.ids[i]])
        else:
            clusters.setdefault(label, []).append(m.ids[i])
    ordered = list(clusters.values()) + singletons
    ordered.sort(key=lambda members: m.ids.index(members[0]))
    return ClusterSet(ordered, noise_as_singletons=True)


def davies_bouldin(d, labels):
    """
    Davies-Bouldin index in medoid form over a precomputed distance matrix.
    Returns None with fewer than two clusters.
    """
    labels = np.asarray(labels)
    names = sorted(set(labels.tolist()))
    if len(names) < 2:
        return None
    medoids, scatter = [], []
    for name in names:
        members = np.flatnonzero(labels == name)
        block = d[np.ix_(members, members)]
        medoid = members[int(np.argmin(block.sum(axis=1)))]
        medoids.append(medoid)
        scatter.append(float(d[members, medoid].mean()))
    worst = []
    for i in range(len(names)):
        ratios = []
        for j in range(len(names)):
            if i != j:
                separation = max(float(d[medoids[i], medoids[j]]), 1e-12)
                ratios.append((scatter[i] + scatter[j]) / separation)
        worst.append(max(ratios))
    return float(np.mean(worst))


def behaviour_vector(a, pool, ids, engine="automaton", cap=64, atom_budget=16, counter=None):
    """Acceptance of a over the pool, or None when a cannot be converted."""
    try:
        formula = to_ltl(a, cap)
        if engine == "automaton":
            vector = acceptance_vector(ltl_to_buchi(formula, atom_budget), pool, ids)
        else:
            vector = vector_from(lambda lam: eval_on_lasso(formula, lam), pool, ids)
    except (LtlConversionError, AutomatonBudgetError) as e:
        logger.warning("No behaviour vector for %s, using embedding only: %s", a.id, e)
        return None
    if counter is not None:
        counter.add(len(pool))
    return vector


def truth_table_vector(a, pool, ids, limit=20, counter=None):
    """
    Acceptance of a propositional assertion over the pool without an
    automaton: G e holds on a lasso iff every letter satisfies e, and each
    letter is looked up in the satisfying set of e.
    """
    names = tuple(sorted(atomic_propositions(a)))
    sat = truth_table_sat_set(a.consequent.head, names, limit)

    def holds(lam):
        letters = lam.project(names)
        return all(sat[x] for x in letters.prefix + letters.loop)

    vector = vector_from(holds, pool, ids)
    if counter is not None:
        counter.add(len(pool))
    return vector


def _fast_path(a, limit):
    return a.is_propositional and len(atomic_propositions(a)) <= limit


def lasso_similarity(group, config, seed, counter=None, executor=None):
    """
    Pairwise behaviour similarity for one group over one shared lasso pool.
    Small propositional assertions are checked against their truth table,
    everything else through the configured engine. NaN marks pairs without a
    score (conversion refused).
    """
    n = len(group)
    ap = sorted(set().union(*(atomic_propositions(a) for a in group)))
    pool = sample_lassos(ap, config.lasso_samples, derive_seed(seed, ap), config.prefix_max, config.loop_max)
    ids = pool_ids(pool)

    def job(a):
        if _fast_path(a, config.truth_table_limit):
            return truth_table_vector(a, pool, ids, config.truth_table_limit, counter)
        return behaviour_vector(a, pool, ids, config.lasso_engine,
                                config.expansion_cap, config.automaton_atom_budget, counter)

    vectors = list(executor.map(job, group) if executor else map(job, group))
    measure = LASSO_MEASURE_FUNCTIONS[config.lasso_measure]
    s = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            if vectors[i] is None or vectors[j] is None:
                value = np.nan
            else:
                value = measure(vectors[i], vectors[j])
            s[i, j] = s[j, i] = value
    return s


def classify(corpus, config=None, embedder=None, seed=0):
    """
    Clusters a parsed corpus. Ids are processed in ascending order, so identical
    inputs give identical ClusterSets.
    """
    config = (config or ClusterConfig()).validate()
    if not corpus:
        return ClusterSet(stats={"groups": 0, "acceptance_calls": 0, "dbi": None, "flags": []})
    ordered = sorted(corpus, key=lambda a: a.id)
    embedder = embedder or make_embedder(config.embedder, config.embed_dim)
    vectors = embed([render_nl(a) for a in ordered], embedder)

    if config.coarse_partition:
        groups = coarse_partition(vectors, config.threshold)
    else:
        groups = [list(range(len(ordered)))]
    logger.info("Classifying %d assertions in %d coarse groups", len(ordered), len(groups))

    counter = AcceptanceCounter()
    clusters, flags, dbis = [], [], []
    with ThreadPoolExecutor(max_workers=config.workers) as executor:
        for index, members in enumerate(groups):
            ids = [ordered[i].id for i in members]
            if len(members) == 1:
                clusters.append(ids)
                continue
            group = [ordered[i] for i in members]
            s_nl = similarity_matrix(vectors[members])
            s_lasso = lasso_similarity(group, config, seed, counter, executor)
            matrix = fuse(s_nl, s_lasso, config.alpha, config.beta, ids)
            flags.extend(matrix.flags)
            found = dbscan(matrix, config.eps, config.min_pts)
            clusters.extend(found.clusters)
            labels = [next(k for k, c in enumerate(found.clusters) if i in c) for i in ids]
            dbi = davies_bouldin(matrix.d, labels)
            if dbi is not None:
                dbis.append(dbi)
            logger.debug("Group %d: %d assertions -> %d clusters", index, len(ids), len(found.clusters))

    position = {a.id: k for k, a in enumerate(ordered)}
    clusters.sort(key=lambda members: position[members[0]])
    stats = {
        "groups": len(groups),
        "acceptance_calls": counter.value,
        "dbi": float(np.mean(dbis)) if dbis else None,
        "flags": flags,
    }
    logger.info("Formed %d clusters (%d lasso acceptance checks)", len(clusters), counter.value)
    return ClusterSet(clusters, noise_as_singletons=True, stats=stats)
