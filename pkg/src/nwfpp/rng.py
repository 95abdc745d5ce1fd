"""Seed derivation: every consumer gets its own stream from (master seed, tag, indices)."""
import zlib

import numpy as np


def tag_id(tag):
    """Stable 32-bit id for a purpose tag (``hash()`` is salted per process)."""
    return zlib.crc32(str(tag).encode("utf-8"))


def stream(seed, tag="default", *indices):
    """Independent generator for ``(seed, tag, *indices)``.

    The result does not depend on which other streams were created before it,
    so replications can run in any order or on any worker.
    """
    key = (tag_id(tag),) + tuple(int(i) for i in indices)
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))


def exp1(rng, size=None):
    """Exp(1) by inversion, -log(1-U) with U in [0, 1)."""
    return -np.log1p(-rng.random(size))


def derive_seed(seed, tag, *indices):
    """64-bit integer seed for an object (e.g. a graph) that takes a plain seed."""
    key = (tag_id(tag),) + tuple(int(i) for i in indices)
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=key)
    return int(ss.generate_state(1, dtype=np.uint64)[0])
