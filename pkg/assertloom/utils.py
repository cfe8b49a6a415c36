#!/usr/bin/env python3
"""
utils.py
--------
Small filesystem and formatting helpers shared by the corpus, report and CLI code.
"""

import logging
import os
import re

logger = logging.getLogger(__name__)

_UNSAFE = re.compile(r"[^A-Za-z0-9._-]")


def ensure_dir(path):
    """Creates `path` (and parents) when missing; returns it."""
    if os.path.isdir(path):
        return path
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        logger.error("Cannot create output directory %s: %s", path, e)
        raise
    logger.info("Created output directory %s", path)
    return path


def sanitize_filename(name):
    """Corpus name -> file stem; anything outside [A-Za-z0-9._-] becomes '_'."""
    stem = _UNSAFE.sub("_", name.strip()).strip("._")
    return stem or "corpus"


def format_ratio(ratio):
    """0.7621 -> '76.2%'."""
    return f"{ratio * 100:.1f}%"
