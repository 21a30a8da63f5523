"""Gaussian field samplers: dense (Cholesky), hierarchical BRW/MBRW, DGFF, OU flow."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache, partial
from typing import Callable

import numpy as np

from . import kernels
from .covariance import MAX_DGFF_SIDE, CovarianceKernel, SizeError, cov_dgff
from .lattice import Lattice, require_power_of_two
from .rng import RngStream

LOG2 = math.log(2.0)
MAX_SITES = 1 << 22


@dataclass
class FieldSample:
    lattice: Lattice
    values: np.ndarray
    model: str
    seed: int | None = None
    stream: int | None = None
    sites: np.ndarray | None = None   # linear indices when the field lives on a subset
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        expected = self.lattice.size if self.sites is None else len(self.sites)
        if len(self.values) != expected:
            raise ValueError(f"field has {len(self.values)} values, expected {expected}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")

    @property
    def grid(self) -> np.ndarray:
        if self.sites is not None:
            raise ValueError("a field on a subset of sites has no grid view")
        return self.values.reshape(self.lattice.shape)

    @property
    def N(self) -> int:
        return self.lattice.N

    @property
    def d(self) -> int:
        return self.lattice.d


def _check_caps(N: int, d: int) -> Lattice:
    lat = Lattice(N, d)
    if lat.size > MAX_SITES:
        raise SizeError(f"{lat.size} sites exceeds the sampler cap {MAX_SITES}")
    return lat


def sample_mvn(k: CovarianceKernel, rng: RngStream, size: int | None = None):
    """Centered Gaussian vector(s) with covariance k via its cached Cholesky factor.

    With `size` given, returns a (size, sites) array instead of a FieldSample.
    """
    L = k.cholesky()
    if size is not None:
        z = rng.standard_normal((size, k.size))
        return z @ L.T
    z = rng.standard_normal(k.size)
    return FieldSample(k.lattice, L @ z, k.model, rng.seed, rng.stream,
                       sites=None if k.full else k.vertices)


def sample_brw(n: int, d: int, rng: RngStream) -> FieldSample:
    """One variance-log 2 Gaussian per aligned dyadic box, summed along ancestor chains."""
    N = 1 << n
    lat = _check_caps(N, d)
    acc = np.zeros(lat.shape)
    sd = math.sqrt(LOG2)
    for j in range(n):
        s = 1 << j
        g = rng.normal((N // s,) * d, sd)
        for axis in range(d):
            g = np.repeat(g, s, axis=axis)
        acc += g
    return FieldSample(lat, acc, "BRW", rng.seed, rng.stream)


def sample_mbrw(n: int, d: int, rng: RngStream) -> FieldSample:
    """One Gaussian per ~_N class of boxes per level, summed over the boxes containing each vertex.

    Classes at level j are box corners reduced mod N, i.e. all of V_N, and the
    boxes containing v have corners in (v - 2^j, v], so each level is a
    circular box sum of an i.i.d. array with variance 2^{-dj} log 2.
    """
    N = 1 << n
    lat = _check_caps(N, d)
    acc = np.zeros(lat.shape)
    for j in range(n):
        g = rng.normal(lat.shape, math.sqrt(LOG2 / float(1 << (d * j))))
        acc += kernels.circular_box_sum(g, 1 << j)
    return FieldSample(lat, acc, "MBRW", rng.seed, rng.stream)


@lru_cache(maxsize=8)
def dgff_kernel(N: int) -> CovarianceKernel:
    return cov_dgff(Lattice(N, 2))


def sample_dgff(lattice: Lattice, rng: RngStream) -> FieldSample:
    if lattice.d != 2:
        raise ValueError("the DGFF sampler is two-dimensional")
    if lattice.N > MAX_DGFF_SIDE:
        raise SizeError(f"DGFF side {lattice.N} exceeds the cap {MAX_DGFF_SIDE}")
    out = sample_mvn(dgff_kernel(lattice.N), rng)
    out.model = "DGFF"
    return out


def _sample_model(model: str, N: int, d: int, rng: RngStream) -> FieldSample:
    if model == "BRW":
        return sample_brw(require_power_of_two(N), d, rng)
    if model == "MBRW":
        return sample_mbrw(require_power_of_two(N), d, rng)
    return sample_dgff(Lattice(N, d), rng)


def sampler_for(model: str, N: int, d: int) -> Callable[[RngStream], FieldSample]:
    """Picklable sampler of a named model, validated up front."""
    model = model.upper()
    if model in ("BRW", "MBRW"):
        require_power_of_two(N)
        _check_caps(N, d)
    elif model == "DGFF":
        if d != 2:
            raise ValueError("the DGFF model is two-dimensional")
        if N > MAX_DGFF_SIDE:
            raise SizeError(f"DGFF side {N} exceeds the cap {MAX_DGFF_SIDE}")
    else:
        raise ValueError(f"unknown model {model!r}; expected brw, mbrw or dgff")
    return partial(_sample_model, model, N, d)


@dataclass
class OuPair:
    t: float
    prime: FieldSample
    second: FieldSample
    combined: FieldSample


def ou_pair(sampler: Callable[[RngStream], FieldSample], t: float, rng: RngStream) -> OuPair:
    """Two independent copies mixed as sqrt(1 - t/log N) phi' + sqrt(t/log N) phi''."""
    prime = sampler(rng.child("ou-prime"))
    logN = math.log(prime.N)
    if not 0 <= t < logN:
        raise ValueError(f"flow time must lie in [0, log N) = [0, {logN:.4g}), got {t}")
    second = sampler(rng.child("ou-second"))
    a, b = math.sqrt(1.0 - t / logN), math.sqrt(t / logN)
    mixed = a * prime.values + b * second.values
    combined = FieldSample(prime.lattice, mixed, prime.model, rng.seed, rng.stream,
                           meta={"ou_t": t})
    return OuPair(t, prime, second, combined)
