#!/usr/bin/env python3
"""
pipeline.py
-----------
End-to-end reduction flow, chained the same way as any staged processor:

  ClassifyStage   clusters the corpus by fused similarity
  ReduceStage     rule-sequence search inside every cluster
  CertifyStage    per-cluster lasso check of AND(original) vs AND(reduced);
                  a failing cluster is restored and recorded as an incident

Each stage reads and extends a shared context dict. A failing stage aborts
the run with PipelineStageError naming the stage.
"""

import logging
import time
from dataclasses import dataclass

from .clustering import classify
from .config import PipelineConfig
from .corpus import corpus_from_assertions
from .errors import PipelineStageError
from .mcts import SearchResult, reduce_corpus
from .report import ReductionReport, reduction_ratio
from .rules import RULE_ORDER, RuleEngine, atom_count, is_falsum, sat_equivalent_sets

logger = logging.getLogger(__name__)


class ClassifyStage:
    name = "classify"

    def __init__(self, embedder=None):
        self.embedder = embedder

    def process(self, ctx):
        config = ctx["config"]
        ctx["clusters"] = classify(ctx["assertions"], config.cluster, self.embedder, config.seed)
        return ctx


class ReduceStage:
    name = "reduce"

    def process(self, ctx):
        ctx["reduction"] = reduce_corpus(ctx["clusters"], ctx["assertions"], ctx["config"])
        return ctx


class CertifyStage:
    name = "certify"

    def process(self, ctx):
        config = ctx["config"]
        by_id = {a.id: a for a in ctx["assertions"]}
        reduction = ctx["reduction"]
        checked, failed = 0, 0
        incidents = list(ctx.get("incidents", []))
        for index, (members, result) in enumerate(zip(ctx["clusters"].clusters, reduction.results)):
            original = [by_id[i] for i in members]
            engine = RuleEngine(config.rules, config.search.atom_count_mode, label=str(index))
            certificate = engine.certify(original, result.assertions)
            checked += 1
            if certificate.passed:
                continue
            failed += 1
            logger.error("Cluster %d failed end-to-end certification; restoring its %d assertions",
                         index, len(original))
            incidents.append({"cluster": index, "stage": self.name, **certificate.summary()})
            reduction.results[index] = SearchResult(tuple(original), 0, result.iterations, (), ())
        reduction.assertions = [a for r in reduction.results for a in r.assertions]
        ctx["incidents"] = incidents
        ctx["certificates"] = {
            "checked": checked,
            "failed": failed,
            "samples": config.rules.certify_samples,
            "transitions": sum(r.certificates for r in reduction.results),
        }
        return ctx


class ReductionPipeline:
    def __init__(self, stages):
        self.stages = stages

    def process(self, ctx):
        for stage in self.stages:
            start = time.perf_counter()
            try:
                ctx = stage.process(ctx)
            except PipelineStageError:
                raise
            except Exception as e:
                logger.exception("Stage %s failed", stage.name)
                raise PipelineStageError(stage.name, e) from e
            ctx.setdefault("timings", {})[stage.name] = time.perf_counter() - start
            logger.debug("Stage %s finished in %.3fs", stage.name, ctx["timings"][stage.name])
        return ctx


def _cluster_details(clusters, results):
    details = []
    for index, (members, result) in enumerate(zip(clusters, results)):
        details.append({
            "index": index,
            "members": list(members),
            "size": len(members),
            "reduced": len(result.assertions),
            "reward": result.best_reward,
            "iterations": result.iterations,
            "rules": [rule.value for rule in result.history],
            "elapsed": round(result.elapsed, 6),
        })
    return details


def build_report(corpus, ctx, reduced):
    config = ctx["config"]
    mode = config.search.atom_count_mode
    results = ctx["reduction"].results
    rule_counts = {rule.value: 0 for rule in RULE_ORDER}
    rule_deltas = {rule.value: 0 for rule in RULE_ORDER}
    for result in results:
        for name, n in result.rule_counts.items():
            rule_counts[name] += n
        for name, n in result.rule_deltas.items():
            rule_deltas[name] += n
    incidents = list(ctx.get("incidents", []))
    for index, result in enumerate(results):
        for incident in result.incidents:
            incidents.append({"cluster": index, "stage": "reduce", **incident.certificate.summary()})
    stats = ctx["clusters"].stats
    timings = ctx.get("timings", {})
    return ReductionReport(
        corpus=corpus.name,
        original_count=len(corpus.assertions),
        reduced_count=len(reduced),
        reduction_ratio=reduction_ratio(len(corpus.assertions), len(reduced)),
        rule_counts=rule_counts,
        rule_deltas=rule_deltas,
        clusters=_cluster_details(ctx["clusters"].clusters, results),
        atoms_before=atom_count(corpus.assertions, mode),
        atoms_after=atom_count(reduced, mode),
        processing_time=timings.get("classify", 0.0) + timings.get("reduce", 0.0),
        certificates=ctx.get("certificates", {}),
        config=config.echo(),
        falsum=sorted(a.id for a in reduced if is_falsum(a)),
        incidents=incidents,
        acceptance_calls=stats.get("acceptance_calls", 0),
        coarse_groups=stats.get("groups", 0),
        dbi=stats.get("dbi"),
        similarity_flags=list(stats.get("flags", [])),
    )


def run_pipeline(corpus, config=None, embedder=None):
    """classify -> reduce -> certify -> report. Returns (reduced Corpus, ReductionReport)."""
    config = (config or PipelineConfig()).validate()
    logger.info("Reducing corpus %s (%d assertions)", corpus.name, len(corpus.assertions))
    pipeline = ReductionPipeline([ClassifyStage(embedder), ReduceStage(), CertifyStage()])
    ctx = pipeline.process({"config": config, "assertions": list(corpus.assertions)})
    reduced = ctx["reduction"].assertions
    report = build_report(corpus, ctx, reduced)
    reduced_corpus = corpus_from_assertions(
        f"{corpus.name}_reduced", reduced, {"source": corpus.name, "original_count": len(corpus.assertions)}
    )
    logger.info("Corpus %s: %d -> %d assertions (%s)", corpus.name, report.original_count,
                report.reduced_count, report.ratio_text)
    return reduced_corpus, report


@dataclass
class CheckResult:
    equivalent: bool
    method: str
    counterexample: object = None
    samples: int = 0


def check(corpus_a, corpus_b, config=None):
    """
    Equivalence of AND(A) and AND(B). Window-level SAT equivalence is a proof
    when every assertion is alignable within budget. It is only sufficient, so
    any other outcome goes to a shared lasso pool that looks for a
    counterexample (none found means "equivalent on the pool").
    """
    config = (config or PipelineConfig()).validate()
    a, b = list(corpus_a.assertions), list(corpus_b.assertions)
    if sat_equivalent_sets(a, b, config.rules):
        logger.info("SAT check: equivalent")
        return CheckResult(True, "sat")
    engine = RuleEngine(config.rules, config.search.atom_count_mode, label="check")
    certificate = engine.certify(a, b)
    logger.info("Lasso check over %d samples: %s", certificate.samples,
                "no counterexample" if certificate.passed else "counterexample found")
    return CheckResult(certificate.passed, "lasso", certificate.counterexample, certificate.samples)
