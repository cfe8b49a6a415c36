"""
CyberXAssertLoom Package

Reduces redundant temporal assertions: clusters a corpus by linguistic and
behavioural similarity, searches rule sequences per cluster, and certifies
every rewrite against a lasso oracle.

Modules:
  - expr / assertion / parser: Boolean terms, assertion AST, grammar and printer.
  - temporal: Timeline alignment, window formulas and LTL conversion.
  - entailment: Tseitin encoding, DPLL, entailment and truth tables.
  - ltl / automata: LTL terms, Buchi automata, lasso sampling and acceptance.
  - embedding / clustering: Sentence rendering, embedders, fused DBSCAN clustering.
  - simplify / rules: Boolean micro-rules and the five reduction rules.
  - mcts: Per-cluster UCT search over rule sequences.
  - corpus / sanitizer / synthesizer: Corpus I/O, entry validation, synthetic corpora.
  - pipeline / report: End-to-end flow, equivalence check, report encoders.
  - config / errors / hashing / utils: Shared plumbing.
"""

from .assertion import Assertion, AssertionKind, Delay, Sequence, print_assertion
from .clustering import ClusterSet, classify
from .config import ClusterConfig, PipelineConfig, RuleConfig, SearchConfig
from .corpus import Corpus, load_corpus, save_corpus
from .errors import AssertLoomError
from .mcts import mcts_reduce, reduce_corpus
from .parser import parse_assertion
from .pipeline import check, run_pipeline
from .report import ReductionReport, emit_report
from .rules import RuleEngine, RuleId, certify
from .synthesizer import generate_synthetic

__version__ = "0.1.0"
