"""Seeded, splittable random number streams.

All randomness in the package flows through PCG64 generators derived from a
single user seed.  Independent streams are carved out with SeedSequence spawn
keys so that the seed alone reproduces every artifact, bit for bit.
"""

from __future__ import annotations

import zlib

import numpy as np


def _key_part(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    return int(part) & 0xFFFFFFFF


def generator(seed: int, *stream) -> np.random.Generator:
    """Return a PCG64 generator for the given seed and stream path.

    ``stream`` elements (ints or short strings) select independent substreams
    of the same seed; the same (seed, stream) always yields the same draws.
    """
    key = tuple(_key_part(p) for p in stream)
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))
