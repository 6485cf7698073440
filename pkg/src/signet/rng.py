"""Named random streams derived from a single root seed."""

import hashlib

import numpy as np


def _stream_key(name):
    return int.from_bytes(hashlib.sha256(name.encode("utf-8")).digest()[:8], "little")


def stream(seed, name, *extra):
    """Return a generator for consumer ``name`` under root ``seed``.

    Each consumer gets an independent stream, so adding a new consumer never
    perturbs the draws of an existing one. ``extra`` integers (fold index,
    tree index, ...) further split a stream.
    """
    key = (_stream_key(name),) + tuple(int(e) for e in extra)
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))
