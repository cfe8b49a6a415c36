#!/usr/bin/env python3
"""
report.py
---------
The reduction report and its encoders.

JsonReportEncoder writes the schema-stable JSON form (keys listed in
REPORT_KEYS); TextReportEncoder writes a human-readable summary led by the
table

    Design | N Orig. | N Reduced | Ratio | PT(s)
"""

import json
import logging
import os
from dataclasses import asdict, dataclass, field

from .utils import ensure_dir, format_ratio

logger = logging.getLogger(__name__)

REPORT_KEYS = (
    "corpus",
    "original_count",
    "reduced_count",
    "reduction_ratio",
    "rule_counts",
    "rule_deltas",
    "clusters",
    "atoms_before",
    "atoms_after",
    "processing_time",
    "certificates",
    "config",
    "falsum",
    "incidents",
    "acceptance_calls",
    "coarse_groups",
    "dbi",
    "similarity_flags",
)


def reduction_ratio(original, reduced):
    if original == 0:
        return 0.0
    return 1.0 - reduced / original


@dataclass
class ReductionReport:
    corpus: str
    original_count: int
    reduced_count: int
    reduction_ratio: float
    rule_counts: dict = field(default_factory=dict)
    rule_deltas: dict = field(default_factory=dict)
    clusters: list = field(default_factory=list)
    atoms_before: int = 0
    atoms_after: int = 0
    processing_time: float = 0.0
    certificates: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    falsum: list = field(default_factory=list)
    incidents: list = field(default_factory=list)
    acceptance_calls: int = 0
    coarse_groups: int = 0
    dbi: object = None
    similarity_flags: list = field(default_factory=list)

    @property
    def ratio_text(self):
        return format_ratio(self.reduction_ratio)

    @property
    def has_incidents(self):
        return bool(self.incidents)

    def to_dict(self):
        data = asdict(self)
        return {key: data[key] for key in REPORT_KEYS}

    @classmethod
    def from_dict(cls, data):
        return cls(**{key: data[key] for key in REPORT_KEYS if key in data})

    def deterministic_view(self):
        """Everything except wall-clock time."""
        data = self.to_dict()
        data.pop("processing_time")
        for cluster in data["clusters"]:
            cluster.pop("elapsed", None)
        return data


class JsonReportEncoder:
    def __init__(self, indent=2):
        self.indent = indent

    def render(self, report):
        return json.dumps(report.to_dict(), indent=self.indent, sort_keys=False) + "\n"

    def encode(self, report, filename="report.json"):
        with open(filename, "w", encoding="utf-8") as f:
            f.write(self.render(report))
        logger.info("JSON report saved as %s", filename)
        return filename


class TextReportEncoder:
    HEADER = ("Design", "N Orig.", "N Reduced", "Ratio", "PT(s)")

    def table(self, report):
        row = (
            report.corpus,
            str(report.original_count),
            str(report.reduced_count),
            report.ratio_text,
            f"{report.processing_time:.2f}",
        )
        widths = [max(len(h), len(v)) for h, v in zip(self.HEADER, row)]
        lines = [
            " | ".join(h.ljust(w) for h, w in zip(self.HEADER, widths)),
            "-+-".join("-" * w for w in widths),
            " | ".join(v.ljust(w) for v, w in zip(row, widths)),
        ]
        return "\n".join(line.rstrip() for line in lines)

    def render(self, report):
        parts = [self.table(report), ""]
        parts.append(f"Atoms: {report.atoms_before} -> {report.atoms_after}")
        parts.append("Rule applications:")
        for rule, count in report.rule_counts.items():
            parts.append(f"  {rule:<22} {count:>5}  (removed {report.rule_deltas.get(rule, 0)})")
        certificates = report.certificates
        parts.append(
            f"Certificates: {certificates.get('checked', 0)} checked, "
            f"{certificates.get('failed', 0)} failed, {certificates.get('samples', 0)} lassos each"
        )
        parts.append(f"Clusters: {len(report.clusters)} (coarse groups {report.coarse_groups}, "
                     f"acceptance checks {report.acceptance_calls})")
        if report.dbi is not None:
            parts.append(f"Davies-Bouldin index: {report.dbi:.3f}")
        if report.falsum:
            parts.append("Assertions that can never hold: " + ", ".join(report.falsum))
        if report.incidents:
            parts.append(f"Soundness incidents: {len(report.incidents)}")
            for incident in report.incidents:
                parts.append(f"  {incident.get('rule')} in cluster {incident.get('cluster')}")
        return "\n".join(parts) + "\n"

    def encode(self, report, filename="report.txt"):
        with open(filename, "w", encoding="utf-8") as f:
            f.write(self.render(report))
        logger.info("Text report saved as %s", filename)
        return filename


def emit_report(report, fmt="json", path=None):
    """Writes report to path (or <fmt default name> in the cwd) and returns the path."""
    encoders = {"json": JsonReportEncoder(), "text": TextReportEncoder()}
    encoder = encoders.get(fmt.lower())
    if encoder is None:
        logger.error("Unsupported report format requested: %s", fmt)
        raise ValueError(f"Report format {fmt} is not supported.")
    path = path or ("report.json" if fmt.lower() == "json" else "report.txt")
    directory = os.path.dirname(path)
    if directory:
        ensure_dir(directory)
    try:
        return encoder.encode(report, path)
    except OSError as e:
        logger.exception("Failed to write report %s: %s", path, e)
        raise


def load_report(path):
    with open(path, "r", encoding="utf-8") as f:
        return ReductionReport.from_dict(json.load(f))
