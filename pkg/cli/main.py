#!/usr/bin/env python3
"""
main.py
-------
CLI for CyberXAssertLoom.
Usage:
    python -m cli.main reduce --corpus corpus.json --out out_dir [--report text]
    python -m cli.main generate --n 20 --r 3 --seed 7 --out synthetic.json
    python -m cli.main check --corpus a.json --corpus b.json

Exit codes: 0 success, 1 check found a counterexample, 2 input error,
3 a soundness incident was recorded during the run.
"""

import argparse
import logging
import os
import sys

from assertloom.config import (
    ATOM_COUNT_MODES, LASSO_ENGINES, LASSO_MEASURES, ClusterConfig, PipelineConfig, RuleConfig, SearchConfig,
)
from assertloom.corpus import describe_error, load_corpus, save_corpus
from assertloom.embedding import make_embedder
from assertloom.errors import AssertLoomError, PipelineStageError
from assertloom.pipeline import check, run_pipeline
from assertloom.report import emit_report
from assertloom.synthesizer import REDUNDANCY_CLASSES, generate_synthetic
from assertloom.utils import ensure_dir, sanitize_filename

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_INPUT = 2
EXIT_INCIDENT = 3


def build_parser():
    parser = argparse.ArgumentParser(prog="assertloom", description="CyberXAssertLoom: temporal assertion reduction")
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    sub = parser.add_subparsers(dest="command", required=True)

    reduce_cmd = sub.add_parser("reduce", help="Cluster and reduce a corpus")
    reduce_cmd.add_argument("--corpus", required=True, help="Corpus file (.json, .sva or .txt)")
    reduce_cmd.add_argument("--out", required=True, help="Output directory")
    reduce_cmd.add_argument("--alpha", type=float, default=0.4, help="Weight of embedding similarity")
    reduce_cmd.add_argument("--beta", type=float, default=0.6, help="Weight of lasso similarity")
    reduce_cmd.add_argument("--threshold", type=float, default=0.85, help="Similarity threshold")
    reduce_cmd.add_argument("--lasso-samples", type=int, default=500, help="Lassos per similarity pool and certificate")
    reduce_cmd.add_argument("--seed", type=int, default=0)
    reduce_cmd.add_argument("--workers", type=int, default=64)
    reduce_cmd.add_argument("--mcts-iters", type=int, default=200, help="Iteration cap per cluster")
    reduce_cmd.add_argument("--patience", type=int, default=3)
    reduce_cmd.add_argument("--embedder", default="hash", help="hash, st[:<model>] (sentence-transformers), remote (reads ARCANE_EMBED_URL) or a URL")
    reduce_cmd.add_argument("--report", choices=("json", "text"), default="json")
    reduce_cmd.add_argument("--no-coarse-partition", action="store_true", help="Compare every pair of assertions")
    reduce_cmd.add_argument("--lasso-engine", choices=LASSO_ENGINES, default="automaton")
    reduce_cmd.add_argument("--lasso-measure", choices=LASSO_MEASURES, default="overlap",
                            help="Behaviour similarity of two acceptance vectors")
    reduce_cmd.add_argument("--atom-count", choices=ATOM_COUNT_MODES, default="leaves",
                            help="How atoms are counted in the search reward")

    generate_cmd = sub.add_parser("generate", help="Write a synthetic corpus with planted redundancy")
    generate_cmd.add_argument("--n", type=int, required=True, help="Number of base assertions")
    generate_cmd.add_argument("--r", type=int, required=True, help="Planted variants per base")
    generate_cmd.add_argument("--seed", type=int, default=0)
    generate_cmd.add_argument("--out", required=True, help="Output JSON path")
    generate_cmd.add_argument("--classes", nargs="+", choices=REDUNDANCY_CLASSES, default=list(REDUNDANCY_CLASSES))

    check_cmd = sub.add_parser("check", help="Check two corpora for equivalence")
    check_cmd.add_argument("--corpus", action="append", required=True, help="Give exactly two corpora")
    check_cmd.add_argument("--lasso-samples", type=int, default=500)
    check_cmd.add_argument("--seed", type=int, default=0)
    return parser


def config_from_args(args):
    cluster = ClusterConfig(
        alpha=args.alpha,
        beta=args.beta,
        threshold=args.threshold,
        lasso_samples=args.lasso_samples,
        workers=args.workers,
        coarse_partition=not args.no_coarse_partition,
        lasso_engine=args.lasso_engine,
        lasso_measure=args.lasso_measure,
        embedder=args.embedder,
    )
    rules = RuleConfig(certify_samples=args.lasso_samples, refutation_samples=args.lasso_samples, seed=args.seed)
    search = SearchConfig(iterations=args.mcts_iters, patience=args.patience, seed=args.seed,
                          atom_count_mode=args.atom_count)
    return PipelineConfig(cluster, rules, search, seed=args.seed).validate()


def run_reduce(args):
    config = config_from_args(args)
    corpus = load_corpus(args.corpus)
    embedder = make_embedder(config.cluster.embedder, config.cluster.embed_dim)
    reduced, report = run_pipeline(corpus, config, embedder)

    ensure_dir(args.out)
    stem = sanitize_filename(corpus.name)
    save_corpus(reduced, os.path.join(args.out, f"{stem}_reduced.json"))
    extension = "json" if args.report == "json" else "txt"
    path = emit_report(report, args.report, os.path.join(args.out, f"{stem}_report.{extension}"))
    print(f"{report.original_count} -> {report.reduced_count} assertions ({report.ratio_text}), report: {path}")
    if report.has_incidents:
        logger.error("%d soundness incidents recorded; see %s", len(report.incidents), path)
        return EXIT_INCIDENT
    return EXIT_OK


def run_generate(args):
    corpus, truth = generate_synthetic(args.n, args.r, args.seed, tuple(args.classes))
    corpus.metadata["ground_truth"] = truth
    save_corpus(corpus, args.out)
    print(f"{len(corpus)} assertions ({len(truth)} planted) written to {args.out}")
    return EXIT_OK


def run_check(args):
    if len(args.corpus) != 2:
        logger.error("check needs exactly two --corpus arguments, got %d", len(args.corpus))
        return EXIT_INPUT
    first, second = (load_corpus(path) for path in args.corpus)
    config = PipelineConfig(rules=RuleConfig(certify_samples=args.lasso_samples, seed=args.seed), seed=args.seed)
    result = check(first, second, config)
    if result.equivalent:
        print(f"equivalent ({result.method})")
        return EXIT_OK
    lam = result.counterexample
    if lam is not None:
        print(f"not equivalent: counterexample over {list(lam.atoms)} prefix={list(lam.prefix)} loop={list(lam.loop)}")
    else:
        print("not equivalent")
    return EXIT_COUNTEREXAMPLE


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)]
    )
    commands = {"reduce": run_reduce, "generate": run_generate, "check": run_check}
    try:
        return commands[args.command](args)
    except PipelineStageError as e:
        cause = e.cause
        if isinstance(cause, (AssertLoomError, ValueError)) and not isinstance(cause, PipelineStageError):
            logger.error("Input error in stage %s: %s", e.stage, describe_error(cause))
            return EXIT_INPUT
        raise
    except (AssertLoomError, ValueError, OSError) as e:
        logger.error("%s", describe_error(e))
        return EXIT_INPUT


if __name__ == '__main__':
    sys.exit(main())
