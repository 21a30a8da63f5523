import math

import numpy as np
import pytest

from conftest import make_field
from lcgf.extremes import m_N
from lcgf.gibbs import (NORM_TOL, OrderedWeightVector, cluster_weights, f_t_transform, gibbs, gibbs_tail_mass,
                        laplace_functional, make_test_function, ordered_distance, participation_ratio,
                        pd_expected_atoms, sample_pd, sample_pd_stick, ExtremalPointProcess)
from lcgf.lattice import ball
from lcgf.rng import RngStream
from lcgf.samplers import FieldSample, sample_mbrw


def test_gibbs_examples():
    g = gibbs(make_field(np.full(8, 3.0)), 2.0)
    assert np.allclose(g.probabilities, 1 / 8)
    beta = 1.7
    g = gibbs(make_field(np.array([0.0, math.log(2) / beta, -50, -50])), beta)
    assert g.probabilities[:2] == pytest.approx([1 / 3, 2 / 3], abs=1e-12)
    f = sample_mbrw(4, 2, RngStream(0))
    shifted = FieldSample(f.lattice, f.values + 3.3, "MBRW")
    assert np.allclose(gibbs(f, 2.0).probabilities, gibbs(shifted, 2.0).probabilities, atol=1e-15)
    with pytest.raises(ValueError):
        gibbs(f, 0)


def test_cluster_weights_identity_and_z():
    f = sample_mbrw(6, 2, RngStream(1))
    beta, r = 4.0, 6.0
    cw = cluster_weights(f, beta, r)
    y = f.values - m_N(64, 2)
    assert np.all(cw.process.z >= 1)
    for k, v in enumerate(cw.process.vertices):
        members = ball(f.lattice, f.lattice.vertex(int(v)), r / 2)
        direct = np.exp(beta * y[members]).sum()
        assert cw.masses[k] == pytest.approx(direct, rel=1e-10)
    assert abs(cw.ordered.p.sum() - 1) <= NORM_TOL
    assert np.all(np.diff(cw.ordered.p) <= 0)


def test_cluster_weights_single_vertex_balls():
    # r = 2 gives balls of radius 1 ... use r just above 2 with a field isolating spikes
    vals = np.full(20, -30.0)
    vals[[3, 12]] = [1.0, 0.5]
    f = make_field(vals)
    cw = cluster_weights(f, 2.0, 2.0)
    spikes = [i for i, v in enumerate(cw.process.vertices) if v in (3, 12)]
    assert len(spikes) == 2
    for i in spikes:
        assert cw.process.z[i] == pytest.approx(1.0, abs=1e-20)
        assert cw.masses[i] == pytest.approx(math.exp(2.0 * cw.process.y[i]))
    with pytest.raises(ValueError):
        cluster_weights(f, 2.0, 1.5)


def test_cluster_weights_one_spike_dominates():
    vals = np.zeros((16, 16))
    vals[5, 5] = 40
    cw = cluster_weights(FieldSample(__import__("lcgf").Lattice(16, 2), vals.reshape(-1), "T"), 4.0, 4.0)
    assert cw.ordered.p[0] == pytest.approx(1.0, abs=1e-12)


def test_ordered_vector_shift_invariance():
    f = sample_mbrw(6, 2, RngStream(2))
    a = cluster_weights(f, 4.0, 6.0).ordered.p
    g = FieldSample(f.lattice, f.values + 0.75, "MBRW")
    b = cluster_weights(g, 4.0, 6.0).ordered.p
    assert np.allclose(a, b, atol=1e-12, rtol=0)


def test_gibbs_tail_mass_examples():
    N, beta, lam = 16, 3.0, 2.0
    c = m_N(N, 2) - lam - 1
    f = FieldSample(__import__("lcgf").Lattice(N, 2), np.full(N * N, c), "T")
    assert gibbs_tail_mass(f, beta, lam) == pytest.approx(N * N * math.exp(-beta * (lam + 1)))
    assert gibbs_tail_mass(f, beta, 10.0) == 0.0


def test_f_t_examples():
    zero = lambda y, z: np.zeros_like(np.asarray(y, dtype=float))
    const = lambda y, z: np.full_like(np.asarray(y, dtype=float), 0.7)
    y = np.linspace(-3, 3, 7)
    z = np.ones(7)
    assert np.allclose(f_t_transform(zero, 1.0, 2)(y, z), 0, atol=1e-14)
    assert np.allclose(f_t_transform(const, 1.0, 2)(y, z), 0.7, atol=1e-12)
    f = make_test_function("bump")
    assert f_t_transform(f, 0.0, 2) is f
    with pytest.raises(ValueError):
        f_t_transform(f, 1.0, 2, order=4)


def test_f_t_matches_monte_carlo():
    f = lambda y, z: np.clip(np.asarray(y, dtype=float), -3, 3) ** 2
    t, d = 1.0, 2
    val = f_t_transform(f, t, d)(np.array([0.0]), np.array([1.0]))[0]
    rng = np.random.default_rng(3)
    B = rng.standard_normal(1_000_000) * math.sqrt(t) - math.sqrt(d / 2) * t
    e = np.exp(-f(B, None))
    mean, se = e.mean(), e.std() / math.sqrt(len(e))
    # delta method for -log
    assert abs(val + math.log(mean)) <= 3 * se / mean


def test_f_t_invariance_on_exact_point_process():
    rng = np.random.default_rng(4)
    f = make_test_function("bump_z_sat")
    ft = f_t_transform(f, 1.0, 2)
    L, c = 6.0, 0.05
    a, b = [], []
    for _ in range(6000):
        n = rng.poisson(c * math.exp(2 * L) / 2)
        y = -L - np.log(rng.uniform(size=n)) / 2   # intensity c e^{-2y} on y > -L
        z = rng.exponential(size=n)
        a.append(math.exp(-f(y, z).sum()))
        b.append(math.exp(-ft(y, z).sum()))
    se = math.hypot(np.std(a), np.std(b)) / math.sqrt(len(a))
    assert abs(np.mean(a) - np.mean(b)) <= 3 * se


def test_laplace_functional():
    empty = ExtremalPointProcess(np.zeros(0), np.zeros(0), 4, np.zeros(0, int))
    one = ExtremalPointProcess(np.array([0.0]), np.array([2.0]), 4, np.array([0]))
    zero = lambda y, z: np.zeros_like(y)
    rep = laplace_functional([empty, one, one], zero)
    assert rep.estimate == 1 and rep.se == 0
    big = lambda y, z: np.full_like(y, 1e6)
    assert laplace_functional([one, one], big).estimate == 0
    assert laplace_functional([empty], big).estimate == 1
    f1, f2 = make_test_function("bump", height=0.5), make_test_function("bump", height=1.0)
    assert laplace_functional([one, one], f2).estimate <= laplace_functional([one, one], f1).estimate
    with pytest.raises(ValueError):
        laplace_functional([], zero)


def test_pd_expected_atoms_and_sample():
    assert pd_expected_atoms(0.5, 1e-6) == pytest.approx(2000)
    s = sample_pd(0.5, 1e-4, RngStream(5))
    assert np.all(s.atoms > 1e-4) and np.all(np.diff(s.atoms) < 0)
    assert s.ordered.p.sum() == pytest.approx(1, abs=1e-12)
    with pytest.raises(ValueError):
        sample_pd(0.5, 1e-20, RngStream(5))
    with pytest.raises(ValueError):
        sample_pd(1.0, 1e-4, RngStream(5))


def test_pd_eps_coupling():
    big = sample_pd(0.5, 1e-3, RngStream(6)).atoms
    small = sample_pd(0.5, 1e-6, RngStream(6)).atoms
    assert np.array_equal(small[:len(big)], big)
    assert np.all(small[len(big):] <= 1e-3)


def test_pd_cross_oracle_small():
    s, R = 0.5, 1500
    a = np.array([participation_ratio(sample_pd(s, 1e-6, RngStream(7, i)).ordered) for i in range(R)])
    b = np.array([np.sum(sample_pd_stick(s, RngStream(8, i)) ** 2) for i in range(R)])
    se = math.hypot(a.std(ddof=1), b.std(ddof=1)) / math.sqrt(R)
    assert abs(a.mean() - b.mean()) <= 3 * se
    assert abs(a.mean() - 0.5) <= 0.02 + 3 * a.std(ddof=1) / math.sqrt(R)


def test_ordered_distance_and_participation():
    one = OrderedWeightVector([1.0])
    half = OrderedWeightVector([0.5, 0.5])
    assert ordered_distance(one, one) == 0
    assert ordered_distance(one, half) == pytest.approx(1.0)
    rng = np.random.default_rng(9)
    for _ in range(20):
        a, b, c = (OrderedWeightVector.from_masses(rng.exponential(size=rng.integers(1, 6))) for _ in range(3))
        assert ordered_distance(a, c) <= ordered_distance(a, b) + ordered_distance(b, c) + 1e-12
    assert participation_ratio(OrderedWeightVector(np.full(8, 1 / 8))) == pytest.approx(1 / 8)
    assert participation_ratio(one, 5) == 1
    with pytest.raises(ValueError):
        participation_ratio(one, 1)


def test_ordered_vector_validation():
    with pytest.raises(ValueError):
        OrderedWeightVector([0.3, 0.7])
    with pytest.raises(ValueError):
        OrderedWeightVector([0.5, 0.4])
    v = OrderedWeightVector.from_log_masses([0.0, math.log(3)])
    assert v.p.tolist() == pytest.approx([0.75, 0.25])
    assert v.padded(4).tolist() == pytest.approx([0.75, 0.25, 0, 0])


def test_test_function_library():
    y = np.linspace(-3, 3, 61)
    for kind in ("bump", "bump_z_decay", "bump_z_sat"):
        f = make_test_function(kind)
        v = f(y, np.full_like(y, 2.0))
        assert np.all(v >= 0) and np.all(v[np.abs(y) >= 2] == 0) and v.max() > 0
    with pytest.raises(ValueError):
        make_test_function("nope")
