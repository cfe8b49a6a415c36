#!/usr/bin/env python3
"""
errors.py
---------
Exception hierarchy for CyberXAssertLoom.
Refusal errors (budgets, caps) are caught by callers and turned into the
conservative "no rewrite" path; the rest surface to the CLI.
"""


class AssertLoomError(Exception):
    """Root of every error raised by the package."""


class AssertionSyntaxError(AssertLoomError, ValueError):
    def __init__(self, message, line=None, column=None, assertion_id=None):
        self.message = message
        self.line = line
        self.column = column
        self.assertion_id = assertion_id
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        prefix = f"[{assertion_id}] " if assertion_id else ""
        super().__init__(f"{prefix}{message}{where}")


class CorpusFormatError(AssertLoomError, ValueError):
    pass


class DuplicateIdError(CorpusFormatError):
    def __init__(self, assertion_id):
        self.assertion_id = assertion_id
        super().__init__(f"Duplicate assertion id: {assertion_id}")


class ExpansionCapError(AssertLoomError):
    """Range delays expand to more concrete timelines than the cap allows."""


class LtlConversionError(AssertLoomError):
    pass


class SatBudgetError(AssertLoomError):
    """Query refused: too many distinct timed atoms."""


class AutomatonBudgetError(AssertLoomError):
    pass


class TruthTableLimitError(AssertLoomError):
    pass


class PoolMismatchError(AssertLoomError, ValueError):
    pass


class EmbeddingError(AssertLoomError):
    pass


class WeightError(AssertLoomError, ValueError):
    pass


class PipelineStageError(AssertLoomError):
    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"Stage '{stage}' failed: {cause}")


class SoundnessIncident(AssertLoomError):
    """A rule produced a set that the lasso oracle tells apart from its input."""

    def __init__(self, rule, certificate):
        self.rule = rule
        self.certificate = certificate
        super().__init__(f"Certificate failed for {rule}: {certificate}")
