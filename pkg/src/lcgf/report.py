from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np


@dataclass
class McReport:
    """Monte Carlo estimate with its standard error (sample stdev / sqrt(R))."""

    estimate: float
    se: float
    replicas: int
    seed: int | None = None
    wall_time: float = 0.0

    @classmethod
    def from_samples(cls, x, seed=None, wall_time: float = 0.0) -> "McReport":
        x = np.asarray(x, dtype=float)
        if x.size == 0:
            raise ValueError("no replicas")
        se = float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else math.inf
        return cls(float(np.mean(x)), se, int(x.size), seed, wall_time)

    def to_dict(self) -> dict:
        return asdict(self)
