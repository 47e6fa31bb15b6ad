"""Seedable random streams.

Every stream is numpy's PCG64 bit generator seeded through
``SeedSequence(entropy=seed, spawn_key=key)``. Sub-streams extend the key, so
a stream is fully identified by ``(seed, key)`` and never by the order in
which streams were created or by which worker process consumes them.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


class RngStream:
    """A reproducible stream of uniforms identified by ``(seed, stream_id)``.

    ``stream_id`` is an integer or a tuple of integers (a path of derived
    sub-streams).
    """

    def __init__(self, seed: int, stream_id: int | tuple[int, ...] = 0):
        if isinstance(stream_id, int):
            stream_id = (stream_id,)
        self.seed = int(seed) & MASK64
        self.stream_id = tuple(int(s) & MASK64 for s in stream_id)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.stream_id)
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def derive(self, *sub: int) -> "RngStream":
        """Independent child stream; does not advance this one."""
        return RngStream(self.seed, self.stream_id + tuple(sub))

    def uniform(self, size=None):
        """Uniform draws on [0, 1)."""
        return self._gen.random(size)

    def integers(self, low, high, size=None):
        return self._gen.integers(low, high, size=size)

    def bits(self, size=None):
        """Fair coin flips as ``uint8``."""
        return (self._gen.random(size) < 0.5).astype(np.uint8)
