"""Module-level acceptance suites run by `lcgf verify`.

Each check returns a CheckResult; a suite passes when every check that is not
marked expected-fail passes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from . import bridge as _bridge
from .covariance import (build_aux_covariance, build_packing, check_domination, cov_brw, cov_dgff,
                         cov_mbrw, dgff_green_ratio, explicit_kernel, kernel, torus_log_witness)
from .gibbs import sample_pd, sample_pd_stick
from .harness import rv_ordering_counterexample, verify_kahane_top_sum, verify_slepian
from .lattice import Lattice
from .rng import RngStream


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    expected_fail: bool = False

    @property
    def label(self) -> str:
        if self.expected_fail:
            return "EXPECTED-FAIL-OF-RV-ORDERING" if self.passed else "FAIL"
        return "PASS" if self.passed else "FAIL"


def aux_instance(N: int = 16, N_inner: int = 2, K: int = 1, d: int = 2, model: str = "MBRW",
                 mode: str = "THETA_BAR"):
    """(base restricted to the packed sites, aux kernel) for a packed-block instance."""
    if model == "DGFF":
        base = cov_dgff(Lattice(N, d))
        block = cov_dgff(Lattice(N_inner, d))
    else:
        base = kernel(model, N, d)
        block = kernel(model, N_inner, d)
    packing = build_packing(N, N_inner, K, d)
    aux = build_aux_covariance(base, packing, block, mode=mode)
    return base.restrict(packing.vertices), aux


def suite_covariance() -> list[CheckResult]:
    out = []
    worst = 0.0
    for n in range(2, 9):
        N = 1 << n
        for v in [(0, 0), (N - 1, 3 % N), (N // 2, N // 3)]:
            worst = max(worst, abs(cov_brw(v, v, n) - math.log(N)), abs(cov_mbrw(v, v, n) - math.log(N)))
    out.append(CheckResult("variance = log N (BRW, MBRW)", worst <= 1e-12, {"max_error": worst}))

    k = kernel("MBRW", 8, 2)
    M = k.matrix()
    pts = k.lattice.coords
    scalar = max(abs(M[i, j] - cov_mbrw(pts[i], pts[j], 3)) for i in range(0, 64, 7) for j in range(64))
    eig = float(np.linalg.eigvalsh(M).min())
    out.append(CheckResult("MBRW dense matrix agrees with closed form and is PSD",
                           scalar <= 1e-12 and eig >= -1e-10, {"max_error": scalar, "min_eig": eig}))

    w32, _ = torus_log_witness(kernel("MBRW", 32, 2))
    w64, _ = torus_log_witness(kernel("MBRW", 64, 2))
    out.append(CheckResult("MBRW torus-log witness bounded and stable",
                           w32 <= 4.0 and w64 <= 4.0 and abs(w64 - w32) <= 0.1,
                           {"witness_32": w32, "witness_64": w64}))

    ratio = dgff_green_ratio(cov_dgff(Lattice(8, 2)))
    out.append(CheckResult("DGFF visit-count Green function ratio", abs(ratio - 1) <= 1e-9, {"ratio": ratio}))

    kA, kB = aux_instance()
    cert = check_domination(kA, kB)
    out.append(CheckResult("aux kernel dominates base at N=16", cert.ok, cert.to_dict()))
    return out


def suite_comparison(replicas: int = 200_000, seed: int = 0) -> list[CheckResult]:
    lat = Lattice(2, 1)
    iid = explicit_kernel(np.eye(2), lat)
    one = explicit_kernel(np.ones((2, 2)), lat)
    out = []
    ts = [-1.0, 0.0, 1.0, 2.0]
    rep = verify_slepian(iid, one, ts, replicas, RngStream(seed, 0, "verify/slepian"))
    closed = all(abs(r["cdf_A"] - norm.cdf(r["t"]) ** 2) <= 3 * r["se_A"] + 1e-12
                 and abs(r["cdf_B"] - norm.cdf(r["t"])) <= 3 * r["se_B"] + 1e-12 for r in rep.rows)
    out.append(CheckResult("Slepian on iid vs fully correlated pair", rep.passed and closed, rep.to_dict()))

    rep = verify_kahane_top_sum(iid, one, [1, 2], replicas, RngStream(seed, 0, "verify/kahane"))
    r1 = rep.rows[0]
    ok = rep.passed and abs(r1["mean_A"] - 1 / math.sqrt(math.pi)) <= 3 * r1["se_A"]
    out.append(CheckResult("Kahane top sums on iid vs fully correlated pair", ok, rep.to_dict()))

    kA, kB = aux_instance()
    rep = verify_slepian(kA, kB, [1.0, 2.0, 3.0, 4.0], replicas, RngStream(seed, 0, "verify/aux-slepian"))
    out.append(CheckResult("Slepian on packed aux instance N=16", rep.passed, rep.to_dict()))
    rep = verify_kahane_top_sum(kA, kB, [1, 2, 4], replicas, RngStream(seed, 0, "verify/aux-kahane"))
    out.append(CheckResult("Kahane top sums on packed aux instance N=16", rep.passed, rep.to_dict()))

    ce = rv_ordering_counterexample(replicas, RngStream(seed, 0, "verify/counterexample"))
    out.append(CheckResult("top sums are not comparable as random variables", ce["demonstrated"], ce,
                           expected_fail=True))
    return out


def suite_bridge(replicas: int = 100_000, seed: int = 0) -> list[CheckResult]:
    ns = [8, 16, 32, 64]
    barrier = _bridge.BarrierSpec.log_curve(3 * 2 ** -1.5)
    reps = [_bridge.barrier_probability(n, barrier, 1.0, replicas, RngStream(seed, k, "verify/bridge"))
            for k, n in enumerate(ns)]
    slope = _bridge.fit_loglog_slope(ns, [r.estimate for r in reps])
    return [CheckResult("log-curve barrier probability decays like 1/n", -1.5 <= slope <= -0.7,
                        {"slope": slope, "estimates": [r.to_dict() for r in reps]})]


def suite_pd(replicas: int = 2000, seed: int = 0, eps: float = 1e-6) -> list[CheckResult]:
    out = []
    for s in (0.25, 0.5, 0.75):
        a = np.array([np.sum(sample_pd(s, eps, RngStream(seed, i, "verify/pd")).ordered.p ** 2)
                      for i in range(replicas)])
        b = np.array([np.sum(sample_pd_stick(s, RngStream(seed, i, "verify/stick")) ** 2)
                      for i in range(replicas)])
        se = math.hypot(a.std(ddof=1), b.std(ddof=1)) / math.sqrt(replicas)
        ok = abs(a.mean() - b.mean()) <= 3 * se and abs(a.mean() - (1 - s)) <= 0.02 + 3 * se
        out.append(CheckResult(f"PD({s}) sampler vs stick-breaking oracle", bool(ok),
                               {"ppp": float(a.mean()), "stick": float(b.mean()), "se": se, "target": 1 - s}))
    return out


SUITES = {"covariance": suite_covariance, "comparison": suite_comparison,
          "bridge": suite_bridge, "pd": suite_pd}
