#!/usr/bin/env python3
"""
hashing.py
----------
Stable content hashes. Python's built-in hash() is salted per process, so every
ordering key, content id and derived seed goes through blake2b instead.
"""

import hashlib
import logging

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1


def stable_hash64(text):
    """
    Returns a 64-bit unsigned integer that is identical across runs and platforms.
    """
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def hash16(text):
    """16 hex characters of the blake2b digest, used as content-id suffix."""
    return hashlib.blake2b(text.encode("utf-8"), digest_size=8).hexdigest()


def derive_seed(*parts):
    """
    Folds an arbitrary tuple of seed material (ints, strings, lists) into a
    64-bit seed.
    """
    material = "\x1f".join(repr(p) for p in parts)
    seed = stable_hash64(material) & _MASK64
    logger.debug("Derived seed %d from %d parts", seed, len(parts))
    return seed
