"""Extremal statistics of a field sample."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import kernels
from .lattice import ball_offsets, squared_radius
from .samplers import FieldSample


def m_N(N: float, d: int) -> float:
    """sqrt(2d) log N - 3/(2 sqrt(2d)) log log N, defined for N >= 3."""
    if N < 3:
        raise ValueError(f"m_N needs N >= 3 so that log log N > 0, got N = {N}")
    c = math.sqrt(2 * d)
    return c * math.log(N) - 3.0 / (2.0 * c) * math.log(math.log(N))


def _values(field) -> np.ndarray:
    return field.values if isinstance(field, FieldSample) else np.asarray(field, dtype=float).reshape(-1)


def field_max(field: FieldSample) -> tuple[tuple[int, ...], float]:
    """Argmax vertex (lowest linear index on ties) and the maximum."""
    i = int(np.argmax(field.values))
    return field.lattice.vertex(i), float(field.values[i])


@dataclass
class LevelSet:
    t: float
    threshold: float
    members: np.ndarray

    @property
    def cardinality(self) -> int:
        return len(self.members)


def level_set(field: FieldSample, t: float) -> LevelSet:
    """Gamma_N(t) = {v : phi_v >= m_N - t}."""
    thr = m_N(field.N, field.d) - t
    return LevelSet(t, thr, np.flatnonzero(field.values >= thr))


def level_set_sizes(field: FieldSample, ts) -> np.ndarray:
    thr = m_N(field.N, field.d) - np.asarray(ts, dtype=float)
    s = np.sort(field.values)
    return len(s) - np.searchsorted(s, thr, side="left")


def top_sum(values, ell: int) -> float:
    """Sum of the ell largest values; -inf when ell exceeds the number of values."""
    x = _values(values)
    if ell < 1:
        raise ValueError("ell must be at least 1")
    if ell > len(x):
        return -math.inf
    if ell == len(x):
        return float(np.sum(x))
    part = np.partition(x, len(x) - ell)[len(x) - ell:]
    return float(np.sum(part))


def top_sums(values, ells) -> np.ndarray:
    """top_sum for several ell from one sort."""
    x = np.sort(_values(values))[::-1]
    c = np.concatenate([[0.0], np.cumsum(x)])
    return np.array([c[e] if e <= len(x) else -math.inf for e in ells])


@dataclass
class ExtremaSet:
    r: float
    vertices: np.ndarray   # linear indices, ascending

    def __len__(self) -> int:
        return len(self.vertices)


def local_extrema(field: FieldSample, r: float) -> ExtremaSet:
    """C_{N,r}: vertices whose value equals the maximum over their r-ball (ties all kept)."""
    if r <= 0:
        raise ValueError("radius must be positive")
    mask = kernels.local_max_mask(field.grid, ball_offsets(field.d, r))
    return ExtremaSet(r, np.flatnonzero(mask.reshape(-1)))


def mesoscopic_pairs(field: FieldSample, lam: float, r: float) -> list[tuple[int, int]]:
    """Unordered pairs in Gamma_N(lam) at l2 distance within [r, N/r]."""
    if r < 1:
        raise ValueError("r must be at least 1")
    N = field.N
    hi = N / r
    if hi < r:
        return []
    members = level_set(field, lam).members
    if len(members) < 2:
        return []
    pts = field.lattice.coords[members]
    tree = cKDTree(pts)
    cand = tree.query_pairs(hi * (1 + 1e-9) + 1e-9, output_type="ndarray")
    if not len(cand):
        return []
    diff = pts[cand[:, 0]] - pts[cand[:, 1]]
    sq = (diff * diff).sum(axis=1)
    # |x| >= r iff |x|^2 > floor(r^2) - [r^2 integer]; compare exactly on integers
    lo_sq = squared_radius(r)
    lo_ok = sq >= (lo_sq if lo_sq == r * r else lo_sq + 1)
    hi_ok = sq <= squared_radius(hi)
    keep = cand[lo_ok & hi_ok]
    pairs = sorted((int(min(members[a], members[b])), int(max(members[a], members[b]))) for a, b in keep)
    return pairs
