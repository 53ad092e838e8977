"""Seeded random streams with independent named substreams.

Each consumer pulls from its own substream so that the draw sequence seen by
one consumer never depends on how much another consumer has drawn. Substream
seeds are derived from the run seed by hashing, so the same (seed, name) pair
yields the same sequence in every process.
"""

from __future__ import annotations

import hashlib
import random


class Rng:
    def __init__(self, seed: int):
        self.seed = int(seed)
        self._streams: dict[str, random.Random] = {}

    def stream(self, name: str) -> random.Random:
        if name not in self._streams:
            digest = hashlib.sha256(f"{self.seed}/{name}".encode()).digest()
            self._streams[name] = random.Random(int.from_bytes(digest[:8], "big"))
        return self._streams[name]
