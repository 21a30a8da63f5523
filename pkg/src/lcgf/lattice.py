"""Geometry of the discrete box V_N = {0, ..., N-1}^d.

Vertices are linearized row-major (last coordinate fastest); every module in
the package uses this single flat indexing.
"""
from __future__ import annotations

import itertools
import math
import sys
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

MAX_DIM = 4


@dataclass(frozen=True)
class Lattice:
    N: int
    d: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"side length must be a positive integer, got {self.N!r}")
        if int(self.d) != self.d or not 1 <= self.d <= MAX_DIM:
            raise ValueError(f"dimension must be in 1..{MAX_DIM}, got {self.d!r}")
        if self.N ** self.d > sys.maxsize:
            raise OverflowError(f"N^d = {self.N}^{self.d} exceeds the index range")

    @property
    def size(self) -> int:
        return self.N ** self.d

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def log2_side(self) -> int | None:
        """n with N = 2^n, or None when N is not a power of two."""
        n = self.N.bit_length() - 1
        return n if (1 << n) == self.N else None

    @cached_property
    def coords(self) -> np.ndarray:
        """(N^d, d) integer coordinates of every vertex, in linear order."""
        grids = np.indices(self.shape).reshape(self.d, -1)
        return np.ascontiguousarray(grids.T)

    def index(self, v: Sequence[int]) -> int:
        self.check_vertex(v)
        return int(np.ravel_multi_index(tuple(int(c) for c in v), self.shape))

    def vertex(self, i: int) -> tuple[int, ...]:
        return tuple(int(c) for c in np.unravel_index(int(i), self.shape))

    def check_vertex(self, v: Sequence[int]) -> None:
        if len(v) != self.d:
            raise ValueError(f"vertex {tuple(v)} has dimension {len(v)}, lattice has {self.d}")
        if any(not 0 <= int(c) < self.N for c in v):
            raise ValueError(f"vertex {tuple(v)} lies outside V_{self.N}")


@dataclass(frozen=True)
class DyadicBox:
    level: int
    corner: tuple[int, ...]

    @property
    def size(self) -> int:
        return 1 << self.level

    def contains(self, v: Sequence[int]) -> bool:
        return all(c <= x < c + self.size for c, x in zip(self.corner, v))


def _diff(u: Sequence[int], v: Sequence[int]) -> np.ndarray:
    if len(u) != len(v):
        raise ValueError(f"dimension mismatch: {len(u)} vs {len(v)}")
    return np.asarray(u, dtype=np.int64) - np.asarray(v, dtype=np.int64)


def euclidean_distance(u: Sequence[int], v: Sequence[int]) -> float:
    delta = _diff(u, v)
    return math.sqrt(int(delta @ delta))


def torus_distance(u: Sequence[int], v: Sequence[int], N: int) -> float:
    """Minimum l2 distance between u and the translates v + N Z^d.

    Both points lie in [0, N), so each optimal shift component is in {-N, 0, N}.
    """
    delta = _diff(u, v)
    best = None
    for shift in itertools.product((-N, 0, N), repeat=len(delta)):
        w = delta + np.asarray(shift, dtype=np.int64)
        sq = int(w @ w)
        best = sq if best is None else min(best, sq)
    return math.sqrt(best)


def squared_radius(r: float) -> int:
    """Largest integer D with D <= r^2; |x|^2 <= r^2 iff |x|^2 <= this for integer x."""
    if r < 0:
        raise ValueError(f"radius must be non-negative, got {r}")
    D = int(math.floor(r * r))
    # floor of a float product can be off by one near perfect squares
    while (D + 1) <= r * r:
        D += 1
    while D > r * r:
        D -= 1
    return D


def ball_offsets(d: int, r: float) -> np.ndarray:
    """Integer offsets x with |x| <= r, sorted by squared length then lexicographically."""
    D = squared_radius(r)
    R = math.isqrt(D)
    axis = np.arange(-R, R + 1)
    grid = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    sq = (grid * grid).sum(axis=1)
    keep = sq <= D
    grid, sq = grid[keep], sq[keep]
    order = np.lexsort(tuple(grid[:, k] for k in reversed(range(d))) + (sq,))
    return np.ascontiguousarray(grid[order], dtype=np.int64)


def ball(lattice: Lattice, v: Sequence[int], r: float) -> np.ndarray:
    """Sorted linear indices of B(v, r) = {u in V_N : |u - v| <= r} (no wrap)."""
    lattice.check_vertex(v)
    pts = ball_offsets(lattice.d, r) + np.asarray(v, dtype=np.int64)
    inside = np.all((pts >= 0) & (pts < lattice.N), axis=1)
    idx = np.ravel_multi_index(tuple(pts[inside].T), lattice.shape)
    return np.sort(idx)


def boundary_distance(lattice: Lattice) -> np.ndarray:
    """l-infinity distance from each vertex to the complement of V_N."""
    c = lattice.coords
    return np.minimum(c + 1, lattice.N - c).min(axis=1)


def interior(lattice: Lattice, delta: float) -> np.ndarray:
    """Linear indices of V_N^delta = {v : d_inf(v, complement of V_N) >= delta N}."""
    if not 0 <= delta < 1:
        raise ValueError(f"delta must lie in [0, 1), got {delta}")
    return np.flatnonzero(boundary_distance(lattice) >= delta * lattice.N)


def dyadic_ancestors(v: Sequence[int], n: int, aligned: bool = True) -> list[DyadicBox]:
    """Boxes of size 2^j (j = 0..n-1) containing v, ordered by level then corner.

    aligned=True gives the single box B*_j(v) with corner in 2^j Z^d per level;
    aligned=False gives all 2^{dj} boxes of B_j(v), corners anywhere in Z^d.
    """
    v = tuple(int(c) for c in v)
    out = []
    for j in range(n):
        s = 1 << j
        if aligned:
            out.append(DyadicBox(j, tuple(s * (c // s) for c in v)))
        else:
            ranges = [range(c - s + 1, c + 1) for c in v]
            out.extend(DyadicBox(j, corner) for corner in itertools.product(*ranges))
    return out


def require_power_of_two(N: int) -> int:
    n = int(N).bit_length() - 1
    if N < 1 or (1 << n) != N:
        raise ValueError(f"N = {N} is not a power of two")
    return n
