"""Gaussian random-walk bridges and barrier probabilities at integer times."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .report import McReport
from .rng import RngStream

CHUNK_ROWS = 1 << 17


@dataclass
class BridgePath:
    n: int
    values: np.ndarray   # W_0..W_n with W_0 = W_n = 0


@dataclass(frozen=True)
class BarrierSpec:
    """LOG_CURVE: -gamma log((j ^ (n-j)) v 1); LINE: x1 j/n + x2 (n-j)/n."""

    kind: str
    gamma: float = 0.0
    x1: float = 0.0
    x2: float = 0.0

    def __post_init__(self):
        if self.kind not in ("LOG_CURVE", "LINE"):
            raise ValueError(f"unknown barrier kind {self.kind!r}")

    @classmethod
    def log_curve(cls, gamma: float) -> "BarrierSpec":
        return cls("LOG_CURVE", gamma=gamma)

    @classmethod
    def line(cls, x1: float, x2: float) -> "BarrierSpec":
        return cls("LINE", x1=x1, x2=x2)

    def values(self, n: int) -> np.ndarray:
        j = np.arange(n + 1)
        if self.kind == "LOG_CURVE":
            return -log_curve(n, self.gamma)
        return self.x1 * j / n + self.x2 * (n - j) / n


def log_curve(n: int, gamma: float) -> np.ndarray:
    """L_n(j) = gamma log((j ^ (n - j)) v 1) for j = 0..n."""
    j = np.arange(n + 1)
    return gamma * np.log(np.maximum(np.minimum(j, n - j), 1))


def _bridges(n: int, rng: RngStream, rows: int) -> np.ndarray:
    steps = rng.standard_normal((rows, n))
    S = np.zeros((rows, n + 1))
    np.cumsum(steps, axis=1, out=S[:, 1:])
    frac = np.arange(n + 1) / n
    return S - frac * S[:, -1:]


def sample_bridge(n: int, rng: RngStream) -> BridgePath:
    """W_j = S_j - (j/n) S_n for a standard Gaussian walk S."""
    if n < 1:
        raise ValueError("bridge length must be at least 1")
    return BridgePath(n, _bridges(n, rng, 1)[0])


def sample_bridges(n: int, rng: RngStream, size: int) -> np.ndarray:
    if n < 1:
        raise ValueError("bridge length must be at least 1")
    return _bridges(n, rng, size)


def bridge_to(n: int, y: float, rng: RngStream) -> BridgePath:
    """Walk conditioned on S_n = y: the bridge to 0 plus the line (j/n) y."""
    w = sample_bridge(n, rng).values
    return BridgePath(n, w + (np.arange(n + 1) / n) * y)


def barrier_probability(n: int, barrier: BarrierSpec, offset: float, replicas: int,
                        rng: RngStream) -> McReport:
    """P(W_j <= barrier(j) + offset for j = 0..n), estimated with its standard error."""
    if replicas < 1000:
        raise ValueError("barrier estimates need at least 1000 replicas")
    b = barrier.values(n) + offset
    if b[0] < 0 or b[-1] < 0:
        return McReport(0.0, 0.0, replicas, rng.seed)
    hits = 0
    done = 0
    while done < replicas:
        rows = min(CHUNK_ROWS, replicas - done)
        W = _bridges(n, rng, rows)
        hits += int(np.count_nonzero(np.all(W <= b, axis=1)))
        done += rows
    p = hits / replicas
    return McReport(p, math.sqrt(p * (1 - p) / (replicas - 1)) if replicas > 1 else math.inf,
                    replicas, rng.seed)


def fit_loglog_slope(ns, estimates) -> float:
    """Least-squares slope of log(estimate) against log(n)."""
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.asarray(estimates, dtype=float))
    return float(np.polyfit(x, y, 1)[0])
