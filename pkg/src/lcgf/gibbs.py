"""Gibbs measure, cluster weights, extremal point process, OU transform, PD(s)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from . import kernels
from .extremes import local_extrema, m_N
from .lattice import ball_offsets
from .report import McReport
from .rng import RngStream
from .samplers import FieldSample

MAX_PD_ATOMS = 10_000_000
PD_CHUNK = 1 << 16
NORM_TOL = 1e-12


class OrderedWeightVector:
    """Non-increasing non-negative weights summing to one."""

    def __init__(self, p, check: bool = True):
        self.p = np.asarray(p, dtype=float).reshape(-1)
        if check:
            if np.any(self.p < 0) or np.any(np.diff(self.p) > 0):
                raise ValueError("weights must be non-negative and non-increasing")
            if len(self.p) and abs(self.p.sum() - 1.0) > NORM_TOL:
                raise ValueError(f"weights sum to {self.p.sum()!r}, not 1")

    @classmethod
    def from_masses(cls, masses) -> "OrderedWeightVector":
        m = np.sort(np.asarray(masses, dtype=float))[::-1]
        return cls(m / m.sum())

    @classmethod
    def from_log_masses(cls, logm) -> "OrderedWeightVector":
        logm = np.sort(np.asarray(logm, dtype=float))[::-1]
        w = np.exp(logm - logm[0])
        return cls(w / w.sum())

    def __len__(self) -> int:
        return len(self.p)

    def __getitem__(self, i):
        return self.p[i]

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(max(length, len(self.p)))
        out[: len(self.p)] = self.p
        return out


@dataclass
class GibbsMeasure:
    beta: float
    log_weights: np.ndarray   # beta (phi_v - m_N)
    log_partition: float      # log S, S = sum_v exp(beta (phi_v - m_N))
    probabilities: np.ndarray

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weights)

    @property
    def partition(self) -> float:
        return math.exp(self.log_partition)


def gibbs(field: FieldSample, beta: float) -> GibbsMeasure:
    if beta <= 0:
        raise ValueError("beta must be positive")
    lw = beta * (field.values - m_N(field.N, field.d))
    top = lw.max()
    w = np.exp(lw - top)
    total = w.sum()
    return GibbsMeasure(beta, lw, float(top + math.log(total)), w / total)


@dataclass
class ExtremalPointProcess:
    y: np.ndarray          # phi_v - m_N at the r-local extrema
    z: np.ndarray          # cluster weight S-bar_{v, r/2}
    r: float
    vertices: np.ndarray

    def __len__(self) -> int:
        return len(self.y)


@dataclass
class ClusterWeights:
    process: ExtremalPointProcess
    masses: np.ndarray          # e^{beta y_v} z_v per extremum, full ball
    owned_masses: np.ndarray    # masses over the vertices owned by each extremum
    ordered: OrderedWeightVector


def cluster_weights(field: FieldSample, beta: float, r: float) -> ClusterWeights:
    """Cluster weights over the r-local extrema with balls of radius r/2.

    Vertices shared by several balls (only possible for tied extrema) count
    towards the lexicographically smallest extremum in the ordered vector.
    """
    if r < 2:
        raise ValueError("cluster radius r must be at least 2")
    ext = local_extrema(field, r)
    centers = ext.vertices
    zbar, owned = kernels.ball_cluster_sums(field.grid, centers, ball_offsets(field.d, r / 2), beta)
    y = field.values[centers] - m_N(field.N, field.d)
    process = ExtremalPointProcess(y, zbar, r, centers)
    masses = np.exp(beta * y) * zbar
    # normalization cancels every global factor, so work from logs of relative masses;
    # a tied extremum whose whole ball is owned elsewhere gets weight zero
    with np.errstate(divide="ignore"):
        ordered = OrderedWeightVector.from_log_masses(beta * field.values[centers] + np.log(owned))
    return ClusterWeights(process, masses, np.exp(beta * y) * owned, ordered)


def gibbs_tail_mass(field: FieldSample, beta: float, lam: float) -> float:
    """Sum of exp(beta (phi_v - m_N)) over v outside Gamma_N(lam)."""
    y = field.values - m_N(field.N, field.d)
    out = y < -lam
    return float(np.sum(np.exp(beta * y[out])))


def f_t_transform(f: Callable, t: float, d: int, order: int = 64) -> Callable:
    """f_t(y, z) = -log E exp(-f(y + B_t - sqrt(d/2) t, z)) by Gauss-Hermite quadrature."""
    if order < 8:
        raise ValueError("quadrature order must be at least 8")
    if t < 0:
        raise ValueError("flow time must be non-negative")
    if t == 0:
        return f
    x, w = np.polynomial.hermite.hermgauss(order)
    nodes = math.sqrt(2.0 * t) * x - math.sqrt(d / 2.0) * t
    logw = np.log(w / math.sqrt(math.pi))

    def f_t(y, z):
        y = np.asarray(y, dtype=float)
        z = np.asarray(z, dtype=float)
        yy = y[..., None] + nodes
        vals = -np.asarray(f(yy, z[..., None]), dtype=float)
        return -logsumexp(vals + logw, axis=-1)

    f_t.order = order
    return f_t


def laplace_functional(processes: Sequence[ExtremalPointProcess], f: Callable, seed=None) -> McReport:
    """Mean and SE of exp(-sum over points of f(y, z)) across replicas."""
    if not len(processes):
        raise ValueError("need at least one replica")
    vals = np.array([math.exp(-float(np.sum(f(p.y, p.z)))) if len(p) else 1.0 for p in processes])
    return McReport.from_samples(vals, seed)


@dataclass
class PdSample:
    s: float
    eps: float
    atoms: np.ndarray            # strictly decreasing, all > eps
    ordered: OrderedWeightVector


def pd_expected_atoms(s: float, eps: float) -> float:
    """Integral of x^{-1-s} over (eps, inf)."""
    return eps ** (-s) / s


def sample_pd(s: float, eps: float, rng: RngStream) -> PdSample:
    """Normalized, decreasing atoms of a Poisson process with intensity x^{-1-s} dx on (eps, inf).

    The atoms are generated already ordered: with Gamma_k the arrival times
    of a unit-rate Poisson process, x_k = (s Gamma_k)^{-1/s}; x_k > eps iff
    Gamma_k < eps^{-s}/s, so the count is Poisson(eps^{-s}/s) and, given the
    count, the atoms are the order statistics of i.i.d. draws eps U^{-1/s}.
    Exponentials are drawn in fixed-size chunks, so with a shared stream a
    smaller eps only appends atoms.
    """
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    lam = pd_expected_atoms(s, eps)
    if lam > MAX_PD_ATOMS:
        raise ValueError(f"expected atom count {lam:.3g} exceeds {MAX_PD_ATOMS:.0e}; raise eps")
    chunks, last = [], 0.0
    while True:
        g = last + np.cumsum(rng.exponential(PD_CHUNK))
        last = g[-1]
        if last >= lam:
            chunks.append(g[: np.searchsorted(g, lam, side="left")])
            break
        chunks.append(g)
    arrivals = np.concatenate(chunks)
    atoms = np.exp(-np.log(s * arrivals) / s)
    if len(atoms) == 0:
        return PdSample(s, eps, atoms, OrderedWeightVector(np.zeros(0), check=False))
    return PdSample(s, eps, atoms, OrderedWeightVector(atoms / atoms.sum(), check=False))


def sample_pd_stick(s: float, rng: RngStream, sticks: int = 20000) -> np.ndarray:
    """Independent PD(s) oracle: stick breaking with V_i ~ Beta(1 - s, i s), then sorted.

    Returns the first `sticks` weights in decreasing order; the unbroken
    remainder is dropped, so the weights sum to slightly less than one.
    """
    v = rng.beta(1.0 - s, s * np.arange(1, sticks + 1))
    rest = np.concatenate([[1.0], np.cumprod(1.0 - v)[:-1]])
    return np.sort(v * rest)[::-1]


def ordered_distance(a, b) -> float:
    pa = a.p if isinstance(a, OrderedWeightVector) else np.asarray(a, dtype=float)
    pb = b.p if isinstance(b, OrderedWeightVector) else np.asarray(b, dtype=float)
    n = max(len(pa), len(pb))
    return float(np.abs(np.pad(pa, (0, n - len(pa))) - np.pad(pb, (0, n - len(pb)))).sum())


def participation_ratio(p, k: float = 2) -> float:
    if k < 2:
        raise ValueError("k must be at least 2")
    p = p.p if isinstance(p, OrderedWeightVector) else np.asarray(p, dtype=float)
    return float(np.sum(p ** k))


# fixed library of test functions: smooth compact bumps in y times bounded functions of z


def _bump(y, center, width):
    u = (np.asarray(y, dtype=float) - center) / width
    inside = np.abs(u) < 1
    out = np.zeros_like(u)
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
    return out


def make_test_function(kind: str, height: float = 1.0, center: float = 0.0, width: float = 2.0) -> Callable:
    """A non-negative test function f(y, z) from the fixed library.

    kinds: "bump" (bump in y, constant in z), "bump_z_decay" (bump times
    1/(1+z)), "bump_z_sat" (bump times z/(1+z)).
    """
    if kind == "bump":
        g = lambda z: np.ones_like(np.asarray(z, dtype=float))
    elif kind == "bump_z_decay":
        g = lambda z: 1.0 / (1.0 + np.asarray(z, dtype=float))
    elif kind == "bump_z_sat":
        g = lambda z: np.asarray(z, dtype=float) / (1.0 + np.asarray(z, dtype=float))
    else:
        raise ValueError(f"unknown test function {kind!r}")

    def f(y, z):
        return height * _bump(y, center, width) * g(z)

    f.kind = kind
    return f


TEST_LIBRARY = ("bump", "bump_z_decay", "bump_z_sat")
