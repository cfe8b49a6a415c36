#!/usr/bin/env python3
"""
sanitizer.py
------------
Validates corpus entries before parsing: ids must be non-empty and unique,
texts must be strings, clocks must be identifiers or null.
Logs a warning for entries that only differ in surrounding whitespace.
"""

import logging
import re

from .errors import CorpusFormatError, DuplicateIdError

logger = logging.getLogger(__name__)

_CLOCK = re.compile(r"^[A-Za-z_][A-Za-z0-9_$]*$")


class CorpusSanitizer:
    def __init__(self, entries):
        self.entries = entries

    def validate(self):
        seen = set()
        sanitized = []
        for entry in self.entries:
            if not entry.id or not str(entry.id).strip():
                logger.error("Assertion without id: %r", entry.text)
                raise CorpusFormatError("Every assertion needs a non-empty id")
            if entry.id in seen:
                logger.error("Duplicate assertion id: %s", entry.id)
                raise DuplicateIdError(entry.id)
            if not isinstance(entry.text, str):
                raise CorpusFormatError(f"{entry.id}: text must be a string")
            if entry.clock is not None and not _CLOCK.match(str(entry.clock)):
                raise CorpusFormatError(f"{entry.id}: invalid clock name {entry.clock!r}")
            if entry.text != entry.text.strip():
                logger.warning("Stripping whitespace around assertion %s", entry.id)
                entry.text = entry.text.strip()
            seen.add(entry.id)
            sanitized.append(entry)
        logger.debug("Sanitized corpus entries: %d validated.", len(sanitized))
        return sanitized
