#!/usr/bin/env python3
"""
corpus.py
---------
Loads and saves assertion corpora.

Two formats are accepted:
  - JSON: {"name": str, "assertions": [{"id", "clock", "text"}], "metadata": {}}
  - plain text (.sva / .txt): one assertion per line, '//' starts a comment,
    ids are `l<line number>`.
Every assertion is parsed while loading, so syntax errors carry their id.
"""

import json
import logging
import os
from dataclasses import dataclass, field, replace

from .assertion import print_assertion
from .errors import AssertionSyntaxError, CorpusFormatError
from .parser import parse_assertion
from .sanitizer import CorpusSanitizer
from .utils import ensure_dir

logger = logging.getLogger(__name__)


@dataclass
class CorpusEntry:
    id: str
    clock: object
    text: str

    def to_dict(self):
        return {"id": self.id, "clock": self.clock, "text": self.text}


@dataclass
class Corpus:
    name: str
    entries: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    parsed: list = field(default_factory=list)

    def __len__(self):
        return len(self.entries)

    @property
    def assertions(self):
        return self.parsed

    @property
    def ids(self):
        return [e.id for e in self.entries]

    def to_dict(self):
        return {
            "name": self.name,
            "assertions": [e.to_dict() for e in self.entries],
            "metadata": self.metadata,
        }


def parse_entry(entry):
    """Parses one entry; a clock given next to the text must match the text's own clock."""
    a = parse_assertion(entry.text, entry.id)
    if a.clock is None and entry.clock:
        a = replace(a, clock=entry.clock)
    elif a.clock and entry.clock and a.clock != entry.clock:
        logger.error("Clock mismatch for %s: %s vs %s", entry.id, entry.clock, a.clock)
        raise CorpusFormatError(f"{entry.id}: clock field '{entry.clock}' differs from text clock '{a.clock}'")
    return a


def build_corpus(name, entries, metadata=None):
    entries = CorpusSanitizer(entries).validate()
    parsed = [parse_entry(e) for e in entries]
    logger.info("Corpus %s: %d assertions parsed", name, len(parsed))
    return Corpus(name, entries, dict(metadata or {}), parsed)


def corpus_from_assertions(name, assertions, metadata=None):
    """Wraps already-parsed assertions; texts are their printed form without clock."""
    entries = [CorpusEntry(a.id, a.clock, print_assertion(replace(a, clock=None))) for a in assertions]
    return Corpus(name, entries, dict(metadata or {}), list(assertions))


class CorpusLoader:
    def __init__(self, filepath):
        self.filepath = filepath

    def load(self):
        ext = os.path.splitext(self.filepath)[1].lower()
        if ext == ".json":
            return self._load_json()
        if ext in (".sva", ".txt"):
            return self._load_lines()
        logger.error("Unsupported corpus format: %s", ext)
        raise CorpusFormatError(f"Unsupported corpus format: {ext}")

    def _read(self):
        try:
            with open(self.filepath, "r", encoding="utf-8") as f:
                return f.read()
        except OSError as e:
            logger.exception("Failed to read corpus %s: %s", self.filepath, e)
            raise

    def _load_json(self):
        try:
            data = json.loads(self._read())
        except json.JSONDecodeError as e:
            logger.error("Malformed JSON in %s: %s", self.filepath, e)
            raise CorpusFormatError(f"{self.filepath}: malformed JSON ({e.msg} at line {e.lineno})") from e
        if not isinstance(data, dict) or not isinstance(data.get("assertions"), list):
            raise CorpusFormatError(f"{self.filepath}: expected an object with an 'assertions' list")
        entries = []
        for i, item in enumerate(data["assertions"]):
            if not isinstance(item, dict) or "id" not in item or "text" not in item:
                raise CorpusFormatError(f"{self.filepath}: assertion #{i} needs 'id' and 'text'")
            entries.append(CorpusEntry(str(item["id"]), item.get("clock"), item["text"]))
        name = data.get("name") or os.path.splitext(os.path.basename(self.filepath))[0]
        return build_corpus(name, entries, data.get("metadata"))

    def _load_lines(self):
        entries = []
        for number, line in enumerate(self._read().splitlines(), start=1):
            text = line.split("//", 1)[0].strip().rstrip(";")
            if text:
                entries.append(CorpusEntry(f"l{number}", None, text))
        name = os.path.splitext(os.path.basename(self.filepath))[0]
        return build_corpus(name, entries, {"source": os.path.basename(self.filepath)})


def load_corpus(path):
    return CorpusLoader(path).load()


def save_corpus(corpus, path):
    directory = os.path.dirname(path)
    if directory:
        ensure_dir(directory)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(corpus.to_dict(), f, indent=2, ensure_ascii=False)
        f.write("\n")
    logger.info("Corpus %s written to %s (%d assertions)", corpus.name, path, len(corpus))
    return path


def describe_error(error):
    """One-line message for CLI output."""
    if isinstance(error, AssertionSyntaxError):
        return f"syntax error in {error.assertion_id or '?'} at line {error.line}, column {error.column}: {error.message}"
    return str(error)
