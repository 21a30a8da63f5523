"""Reproducible random streams.

Seed schedule: the stream for (seed, replica, purpose) is a Philox generator
keyed by ``SeedSequence(seed, spawn_key=(replica, crc32(purpose)))``. Philox
is counter-based, so every replica owns an independent stream that can be
produced in any order or on any worker.
"""
from __future__ import annotations

import zlib

import numpy as np


def purpose_code(purpose: str) -> int:
    return zlib.crc32(purpose.encode("utf-8"))


class RngStream:
    """A seeded stream that counts the variates drawn from it."""

    def __init__(self, seed: int, stream: int = 0, purpose: str = "field"):
        if seed < 0 or stream < 0:
            raise ValueError("seed and stream index must be non-negative")
        self.seed = int(seed)
        self.stream = int(stream)
        self.purpose = purpose
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream, purpose_code(purpose)))
        self.generator = np.random.Generator(np.random.Philox(ss))
        self.counter = 0

    def child(self, purpose: str) -> "RngStream":
        """Independent stream for the same replica and a different purpose."""
        return RngStream(self.seed, self.stream, f"{self.purpose}/{purpose}")

    def normal(self, size=None, scale: float = 1.0):
        self.counter += int(np.prod(size)) if size is not None else 1
        return self.generator.normal(0.0, scale, size)

    def standard_normal(self, size=None):
        self.counter += int(np.prod(size)) if size is not None else 1
        return self.generator.standard_normal(size)

    def uniform(self, size=None):
        self.counter += int(np.prod(size)) if size is not None else 1
        return self.generator.random(size)

    def exponential(self, size=None):
        self.counter += int(np.prod(size)) if size is not None else 1
        return self.generator.standard_exponential(size)

    def poisson(self, lam: float) -> int:
        self.counter += 1
        return int(self.generator.poisson(lam))

    def beta(self, a, b, size=None):
        self.counter += int(np.prod(size)) if size is not None else int(np.size(b))
        return self.generator.beta(a, b, size)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream={self.stream}, purpose={self.purpose!r}, counter={self.counter})"
