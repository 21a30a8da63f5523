"""Exact covariance kernels, assumption witnesses, packed auxiliary fields.

Kernels are deterministic oracles: BRW and MBRW have closed forms evaluated
pairwise or assembled into dense matrices (Kronecker products of per-axis
factors), the DGFF covariance is the inverse of the precision matrix read
off the lattice density, and EXPLICIT kernels wrap any dense PSD matrix.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .lattice import Lattice, interior, require_power_of_two

log = logging.getLogger(__name__)

LOG2 = math.log(2.0)
MAX_DENSE_SITES = 4096
MAX_DGFF_SIDE = 64
MODELS = ("BRW", "MBRW", "DGFF", "EXPLICIT")


class SizeError(ValueError):
    """Requested object exceeds a documented size cap."""


class NotPositiveSemidefinite(ValueError):
    pass


# ---------------------------------------------------------------------------
# closed forms


def cov_brw(u: Sequence[int], v: Sequence[int], n: int, d: int | None = None) -> float:
    """log 2 times the number of levels j < n at which B*_j(u) = B*_j(v)."""
    if d is not None and (len(u) != d or len(v) != d):
        raise ValueError("dimension mismatch")
    if len(u) != len(v):
        raise ValueError("dimension mismatch")
    shared = sum(
        1 for j in range(n) if all((a >> j) == (b >> j) for a, b in zip(u, v))
    )
    return shared * LOG2


def _circular_overlap(a: int, b: int, N: int, width: int) -> int:
    gap = abs(a - b) % N
    gap = min(gap, N - gap)
    return max(0, width - gap)


def cov_mbrw(u: Sequence[int], v: Sequence[int], n: int, d: int | None = None) -> float:
    """Sum over levels of 2^{-dj} log 2 times the number of ~_N-matched box pairs.

    At level j the boxes containing u have corners in (u - 2^j, u]; reducing
    corners mod N, the matched pairs factor over axes into the overlap of two
    circular windows of width 2^j <= N/2.
    """
    if len(u) != len(v) or (d is not None and len(u) != d):
        raise ValueError("dimension mismatch")
    N = 1 << n
    dim = len(u)
    total = 0.0
    for j in range(n):
        s = 1 << j
        count = 1
        for a, b in zip(u, v):
            count *= _circular_overlap(a, b, N, s)
            if count == 0:
                break
        # count / 2^{dj} is exact in binary floating point
        total += (count / float(1 << (dim * j))) * LOG2
    return total


def _brw_axis_factors(N: int, n: int) -> list[np.ndarray]:
    x = np.arange(N)
    return [((x[:, None] >> j) == (x[None, :] >> j)).astype(float) for j in range(n)]


def _mbrw_axis_factors(N: int, n: int) -> list[np.ndarray]:
    x = np.arange(N)
    gap = np.abs(x[:, None] - x[None, :])
    gap = np.minimum(gap, N - gap)
    return [np.maximum(0, (1 << j) - gap).astype(float) for j in range(n)]


def _kron_power(a: np.ndarray, d: int) -> np.ndarray:
    return reduce(np.kron, [a] * d)


def _dense_hierarchical(model: str, lattice: Lattice) -> np.ndarray:
    n = require_power_of_two(lattice.N)
    d = lattice.d
    if lattice.size > MAX_DENSE_SITES:
        raise SizeError(f"{lattice.size} sites exceeds the dense cap {MAX_DENSE_SITES}")
    out = np.zeros((lattice.size, lattice.size))
    if model == "BRW":
        for f in _brw_axis_factors(lattice.N, n):
            out += LOG2 * _kron_power(f, d)
    else:
        for j, f in enumerate(_mbrw_axis_factors(lattice.N, n)):
            out += (LOG2 / float(1 << (d * j))) * _kron_power(f, d)
    return out


# ---------------------------------------------------------------------------
# kernel object


class CovarianceKernel:
    """Covariance of a centered field on a set of lattice sites.

    `vertices` holds linear indices into `lattice` (all of V_N when omitted).
    The dense matrix and its triangular factor are built lazily and cached.
    """

    def __init__(self, model: str, lattice: Lattice, matrix: np.ndarray | None = None,
                 vertices: np.ndarray | None = None, meta: dict | None = None):
        if model not in MODELS:
            raise ValueError(f"unknown model {model!r}")
        self.model = model
        self.lattice = lattice
        if vertices is None:
            self.vertices = np.arange(lattice.size, dtype=np.int64)
            self.full = True
        else:
            self.vertices = np.asarray(vertices, dtype=np.int64)
            self.full = bool(len(self.vertices) == lattice.size
                             and np.array_equal(self.vertices, np.arange(lattice.size)))
        self._matrix = matrix
        self._chol = None
        self._position = None
        self.meta = dict(meta or {})
        if model in ("BRW", "MBRW"):
            self.n = require_power_of_two(lattice.N)

    @property
    def size(self) -> int:
        return len(self.vertices)

    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            if self.model in ("BRW", "MBRW"):
                full = _dense_hierarchical(self.model, self.lattice)
                self._matrix = full if self.full else full[np.ix_(self.vertices, self.vertices)]
            else:
                raise RuntimeError("explicit kernel without a matrix")
        return self._matrix

    def diagonal(self) -> np.ndarray:
        if self._matrix is None and self.model in ("BRW", "MBRW"):
            return np.full(self.size, self.n * LOG2)
        return np.diag(self.matrix()).copy()

    def position(self, v: Sequence[int]) -> int:
        """Row of vertex v in the matrix."""
        i = self.lattice.index(v)
        if self.full:
            return i
        if self._position is None:
            self._position = {int(x): k for k, x in enumerate(self.vertices)}
        try:
            return self._position[i]
        except KeyError:
            raise ValueError(f"vertex {tuple(v)} is not a site of this kernel") from None

    def __call__(self, u: Sequence[int], v: Sequence[int]) -> float:
        if self.model == "BRW":
            self.lattice.check_vertex(u), self.lattice.check_vertex(v)
            return cov_brw(u, v, self.n)
        if self.model == "MBRW":
            self.lattice.check_vertex(u), self.lattice.check_vertex(v)
            return cov_mbrw(u, v, self.n)
        return float(self.matrix()[self.position(u), self.position(v)])

    def restrict(self, vertices: np.ndarray) -> "CovarianceKernel":
        """EXPLICIT kernel on a subset of sites, in the given order."""
        vertices = np.asarray(vertices, dtype=np.int64)
        if self.full:
            rows = vertices
        else:
            pos = {int(x): k for k, x in enumerate(self.vertices)}
            rows = np.array([pos[int(x)] for x in vertices], dtype=np.int64)
        sub = self.matrix()[np.ix_(rows, rows)]
        return CovarianceKernel("EXPLICIT", self.lattice, np.ascontiguousarray(sub), vertices,
                                meta={"restricted_from": self.model})

    def cholesky(self) -> np.ndarray:
        """Lower triangular L with L L^T = K, computed once.

        On a first failure 1e-10 * mean(diagonal) is added to the diagonal;
        a second failure raises.
        """
        if self._chol is not None:
            return self._chol
        K = self.matrix()
        if not np.any(K):
            self._chol = np.zeros_like(K)
            return self._chol
        try:
            L = np.linalg.cholesky(K)
        except np.linalg.LinAlgError:
            jitter = 1e-10 * float(np.mean(np.diag(K)))
            log.debug("cholesky failed, retrying with jitter %.3g", jitter)
            try:
                L = np.linalg.cholesky(K + jitter * np.eye(len(K)))
            except np.linalg.LinAlgError as exc:
                raise NotPositiveSemidefinite(
                    f"{self.model} kernel is not positive semidefinite within tolerance") from exc
        self._chol = L
        return L

    def __repr__(self) -> str:
        return f"CovarianceKernel({self.model}, N={self.lattice.N}, d={self.lattice.d}, sites={self.size})"


def kernel(model: str, N: int, d: int) -> CovarianceKernel:
    """Kernel of a named model on the full box V_N."""
    model = model.upper()
    lat = Lattice(N, d)
    if model in ("BRW", "MBRW"):
        return CovarianceKernel(model, lat)
    if model == "DGFF":
        return cov_dgff(lat)
    raise ValueError(f"no closed-form kernel for model {model!r}")


def explicit_kernel(matrix, lattice: Lattice, vertices=None, *, symmetrize: bool = False,
                    psd_tol: float = 1e-8, meta: dict | None = None) -> CovarianceKernel:
    M = np.array(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("covariance matrix must be square")
    m = len(M)
    expected = lattice.size if vertices is None else len(vertices)
    if m != expected:
        raise ValueError(f"matrix has {m} rows, kernel has {expected} sites")
    if m > MAX_DENSE_SITES:
        raise SizeError(f"{m} sites exceeds the dense cap {MAX_DENSE_SITES}")
    if not np.all(np.isfinite(M)):
        raise ValueError("covariance matrix has non-finite entries")
    if symmetrize:
        M = 0.5 * (M + M.T)
    elif not np.array_equal(M, M.T):
        raise ValueError("covariance matrix is not exactly symmetric")
    if np.any(np.diag(M) < 0):
        raise ValueError("covariance matrix has a negative diagonal entry")
    if m:
        lo = float(np.linalg.eigvalsh(M)[0])
        if lo < -psd_tol * float(np.trace(M)) / m:
            raise NotPositiveSemidefinite(f"smallest eigenvalue {lo:.3g} below tolerance")
    return CovarianceKernel("EXPLICIT", lattice, M, vertices, meta)


def dirichlet_laplacian(N: int) -> np.ndarray:
    """Graph Laplacian of V_N in Z^2 with every vertex of full degree 4."""
    m = N * N
    L = 4.0 * np.eye(m)
    idx = np.arange(m).reshape(N, N)
    for a, b in ((idx[1:, :], idx[:-1, :]), (idx[:, 1:], idx[:, :-1])):
        L[a.ravel(), b.ravel()] = -1.0
        L[b.ravel(), a.ravel()] = -1.0
    return L


def cov_dgff(lattice: Lattice) -> CovarianceKernel:
    """Inverse of the precision Q = L/4 of the density exp(-(1/8) sum_{u~v} (phi_u - phi_v)^2)."""
    if lattice.d != 2:
        raise ValueError("the DGFF kernel is two-dimensional")
    if lattice.N > MAX_DGFF_SIDE:
        raise SizeError(f"DGFF side {lattice.N} exceeds the dense cap {MAX_DGFF_SIDE}")
    Q = dirichlet_laplacian(lattice.N) / 4.0
    Sigma = np.linalg.solve(Q, np.eye(len(Q)))
    k = explicit_kernel(Sigma, lattice, symmetrize=True, meta={"precision": "L/4"})
    k.model = "DGFF"
    return k


def dgff_green_ratio(k: CovarianceKernel) -> float:
    """Mean ratio of the DGFF covariance to the visit-count Green function of SRW killed off V."""
    N = k.lattice.N
    A = 4.0 * np.eye(N * N) - dirichlet_laplacian(N)
    G = np.linalg.solve(np.eye(N * N) - A / 4.0, np.eye(N * N))
    return float(np.mean(k.matrix() / G))


# ---------------------------------------------------------------------------
# assumption witnesses


def _log_plus(x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.where(x > 1.0, np.log(np.maximum(x, 1.0)), 0.0)


def _sites(k: CovarianceKernel) -> np.ndarray:
    return k.lattice.coords[k.vertices].astype(float)


@dataclass
class AssumptionReport:
    delta: float
    alpha0_witness: float
    alpha0_pair: tuple
    alpha_delta_witness: float
    alpha_delta_pair: tuple
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"delta": self.delta, "alpha0_witness": self.alpha0_witness,
                "alpha0_pair": [list(p) for p in self.alpha0_pair],
                "alpha_delta_witness": self.alpha_delta_witness,
                "alpha_delta_pair": [list(p) for p in self.alpha_delta_pair], **self.notes}


def _rowwise_max(k: CovarianceKernel, rows: np.ndarray, fn, block: int = 512):
    """Max of fn(K[rows_i, rows], coords_i, coords) over all pairs, with argmax."""
    K = k.matrix()
    pos = rows
    X = _sites(k)[pos]
    best, arg = -np.inf, (0, 0)
    for s in range(0, len(pos), block):
        sl = slice(s, s + block)
        vals = fn(K[np.ix_(pos[sl], pos)], X[sl], X, pos[sl], pos)
        i = int(np.argmax(vals))
        r, c = divmod(i, vals.shape[1])
        if vals[r, c] > best:
            best, arg = float(vals[r, c]), (int(pos[s + r]), int(pos[c]))
    return best, arg


def check_assumptions(k: CovarianceKernel, delta: float) -> AssumptionReport:
    """Smallest alpha_0 and alpha(delta) for which the two covariance assumptions hold.

    alpha_0 covers Var <= log N + alpha_0 and
    Cov >= max(Var_u, Var_v) - log_+|u-v| - 2 alpha_0; alpha(delta) is the
    largest |Cov - (log N - log_+|u-v|)| over pairs in V_N^delta.
    """
    if not k.full:
        raise ValueError("assumption checks need a kernel on the full box")
    logN = math.log(k.lattice.N)
    var = k.diagonal()

    def lower_gap(Kb, Xa, Xb, ia, ib):
        dist = np.sqrt(((Xa[:, None, :] - Xb[None, :, :]) ** 2).sum(-1))
        return (np.maximum(var[ia][:, None], var[ib][None, :]) - _log_plus(dist) - Kb) / 2.0

    all_rows = np.arange(k.size)
    gap_w, gap_pair = _rowwise_max(k, all_rows, lower_gap)
    i_var = int(np.argmax(var - logN))
    var_w = float(var[i_var] - logN)
    if var_w >= gap_w:
        a0, a0_pair = var_w, (i_var, i_var)
    else:
        a0, a0_pair = gap_w, gap_pair

    def corr_gap(Kb, Xa, Xb, ia, ib):
        dist = np.sqrt(((Xa[:, None, :] - Xb[None, :, :]) ** 2).sum(-1))
        return np.abs(Kb - (logN - _log_plus(dist)))

    rows = interior(k.lattice, delta)
    if len(rows):
        ad, ad_pair = _rowwise_max(k, rows, corr_gap)
    else:
        ad, ad_pair = 0.0, None
    vert = k.lattice.vertex
    return AssumptionReport(
        delta=delta,
        alpha0_witness=a0,
        alpha0_pair=tuple(vert(i) for i in a0_pair),
        alpha_delta_witness=ad,
        alpha_delta_pair=tuple(vert(i) for i in ad_pair) if ad_pair else (),
    )


def alpha0_at(k: CovarianceKernel, u, v) -> float:
    """Re-evaluate the alpha_0 expression at one pair."""
    logN = math.log(k.lattice.N)
    vu, vv, c = k(u, u), k(v, v), k(u, v)
    if tuple(u) == tuple(v):
        return max(vu - logN, 0.0)
    dist = math.dist(u, v)
    return (max(vu, vv) - (math.log(dist) if dist > 1 else 0.0) - c) / 2.0


def alpha_delta_at(k: CovarianceKernel, u, v) -> float:
    logN = math.log(k.lattice.N)
    dist = math.dist(u, v)
    return abs(k(u, v) - (logN - (math.log(dist) if dist > 1 else 0.0)))


def torus_log_witness(k: CovarianceKernel) -> tuple[float, tuple]:
    """max over all pairs of |Cov - (log N - log_+ |u-v|^{(N)})| with the attaining pair."""
    N = k.lattice.N
    logN = math.log(N)

    def gap(Kb, Xa, Xb, ia, ib):
        diff = np.abs(Xa[:, None, :] - Xb[None, :, :])
        diff = np.minimum(diff, N - diff)
        dist = np.sqrt((diff ** 2).sum(-1))
        return np.abs(Kb - (logN - _log_plus(dist)))

    w, pair = _rowwise_max(k, np.arange(k.size), gap)
    return w, tuple(k.lattice.vertex(i) for i in pair)


# ---------------------------------------------------------------------------
# packed auxiliary fields


@dataclass
class PackingLayout:
    N: int
    N_inner: int
    K: int
    d: int
    origins: np.ndarray          # (I, d) grid points x_i
    blocks: np.ndarray           # (I, N_inner^d) linear indices into V_N
    interior_delta: float = 0.1

    @property
    def count(self) -> int:
        return len(self.origins)

    @property
    def vertices(self) -> np.ndarray:
        return self.blocks.reshape(-1)

    def block_of(self, v: int) -> int:
        hits = np.flatnonzero((self.blocks == v).any(axis=1))
        if not len(hits):
            raise KeyError(v)
        return int(hits[0])


def build_packing(N: int, N_inner: int, K: int, d: int, interior_delta: float = 0.1) -> PackingLayout:
    """All blocks D_i = 2 K N' x_i + K V_{N'} contained in V_N^{interior_delta}."""
    if N < 6 * K * N_inner:
        raise ValueError(f"packing needs N >= 6 K N' = {6 * K * N_inner}, got N = {N}")
    lat = Lattice(N, d)
    # the interior is a product of one axis range [lo, hi]
    axis = np.arange(N)
    ok = np.minimum(axis + 1, N - axis) >= interior_delta * N
    lo, hi = int(axis[ok][0]), int(axis[ok][-1])
    step = 2 * K * N_inner
    span = K * (N_inner - 1)
    xs = [x for x in range(-(-lo // step), hi // step + 1) if lo <= step * x and step * x + span <= hi]
    origins = np.array(list(np.ndindex(*([len(xs)] * d))), dtype=np.int64).reshape(-1, d)
    origins = np.asarray(xs, dtype=np.int64)[origins] if len(xs) else np.zeros((0, d), np.int64)
    inner = Lattice(N_inner, d).coords
    blocks = np.array([
        np.ravel_multi_index(tuple((step * x + K * inner).T), lat.shape) for x in origins
    ], dtype=np.int64).reshape(len(origins), N_inner ** d)
    layout = PackingLayout(N, N_inner, K, d, origins, blocks, interior_delta)
    bound = (N // (3 * K * N_inner)) ** d
    if layout.count < bound:
        raise AssertionError(f"packing produced {layout.count} blocks, fewer than {bound}")
    return layout


def build_aux_covariance(base: CovarianceKernel, packing: PackingLayout,
                         block_kernel: CovarianceKernel, mode: str = "THETA_BAR") -> CovarianceKernel:
    """Covariance of X_v = F_{D(v), v} + a_v Y on the packed sites.

    F_{D_i} are i.i.d. copies of the block field placed on D_i by the dilation
    v = 2 K N' x_i + K v'; Y is a shared standard Gaussian and
    a_v^2 = Var base(v) - Var block(v').
    """
    mode = mode.upper()
    if mode not in ("THETA_BAR", "PSI"):
        raise ValueError(f"unknown auxiliary mode {mode!r}")
    if not base.full or base.lattice.N != packing.N or base.lattice.d != packing.d:
        raise ValueError("base kernel must cover the full outer box")
    if block_kernel.lattice.N != packing.N_inner or not block_kernel.full:
        raise ValueError("block kernel must cover the full inner box")
    B = block_kernel.matrix()
    vb = np.diag(B)
    var = base.diagonal()[packing.vertices]
    a2 = var - np.tile(vb, packing.count)
    bad = np.flatnonzero(a2 < 0)
    if len(bad):
        v = base.lattice.vertex(int(packing.vertices[bad[0]]))
        raise ValueError(f"negative a_v^2 = {a2[bad[0]]:.4g} at vertex {v}; dilation K too small")
    a = np.sqrt(a2)
    M = np.kron(np.eye(packing.count), B) + np.outer(a, a)
    # the diagonal must equal the base variance exactly, not up to rounding
    M[np.diag_indices_from(M)] = var
    return CovarianceKernel("EXPLICIT", base.lattice, M, packing.vertices,
                            meta={"aux_mode": mode, "base": base.model, "block": block_kernel.model,
                                  "K": packing.K, "N_inner": packing.N_inner})


@dataclass
class DominationCertificate:
    dominated: bool
    diagonal_discrepancy: float
    margin: float                  # min over u != v of kB - kA
    worst_pair: tuple | None       # pair attaining the margin
    tol: float
    require_equal_diagonal: bool

    @property
    def ok(self) -> bool:
        if self.require_equal_diagonal and self.diagonal_discrepancy > self.tol:
            return False
        return self.dominated

    def to_dict(self) -> dict:
        return {"ok": self.ok, "dominated": self.dominated,
                "diagonal_discrepancy": self.diagonal_discrepancy, "margin": self.margin,
                "worst_pair": [list(p) for p in self.worst_pair] if self.worst_pair else None,
                "tol": self.tol, "require_equal_diagonal": self.require_equal_diagonal}


def check_domination(kA: CovarianceKernel, kB: CovarianceKernel, require_equal_diagonal: bool = True,
                     tol: float = 1e-9) -> DominationCertificate:
    """Exhaustive check that kA(u, v) <= kB(u, v) off the diagonal."""
    if kA.size != kB.size or not np.array_equal(kA.vertices, kB.vertices):
        raise ValueError("kernels live on different site sets")
    A, B = kA.matrix(), kB.matrix()
    diag = float(np.max(np.abs(np.diag(A) - np.diag(B)))) if len(A) else 0.0
    slack = B - A
    np.fill_diagonal(slack, np.inf)
    if len(A) < 2:
        return DominationCertificate(True, diag, math.inf, None, tol, require_equal_diagonal)
    i = int(np.argmin(slack))
    r, c = divmod(i, len(A))
    margin = float(slack[r, c])
    vert = kA.lattice.vertex
    pair = (vert(int(kA.vertices[r])), vert(int(kA.vertices[c])))
    return DominationCertificate(margin >= -tol, diag, margin, pair, tol, require_equal_diagonal)
