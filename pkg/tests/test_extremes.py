import math

import numpy as np
import pytest

from conftest import make_field
from lcgf.extremes import (field_max, level_set, level_set_sizes, local_extrema, m_N, mesoscopic_pairs,
                           top_sum, top_sums)
from lcgf.lattice import Lattice
from lcgf.rng import RngStream
from lcgf.samplers import FieldSample, sample_mbrw


# closed form evaluated at 30 digits with mpmath
@pytest.mark.parametrize("N,d,value", [
    (1024, 2, 12.4108894818896201705904782068),
    (16, 2, 4.78034136407589275647133815815),
    (512, 2, 11.1036155075130992776766396995),
    (64, 1, 4.36984661169540500238841360468),
    (3, 4, 3.05746840435064939641655289744),
])
def test_m_N_frozen(N, d, value):
    assert m_N(N, d) == pytest.approx(value, abs=1e-12)


def test_m_N_domain_and_increments():
    for bad in (1, 2):
        with pytest.raises(ValueError):
            m_N(bad, 2)
    for d in (1, 2, 3):
        for N in (4, 16, 256, 4096):
            assert m_N(2 * N, d) - m_N(N, d) <= math.sqrt(2 * d) * math.log(2)


def test_field_max_ties_and_spike():
    f = make_field(np.full((4, 4), 2.0), d=2)
    assert field_max(f) == ((0, 0), 2.0)
    vals = np.zeros((4, 4))
    vals[2, 3] = 5
    assert field_max(make_field(vals, d=2)) == ((2, 3), 5.0)


def test_level_set_examples():
    N = 16
    low = make_field(np.full(N, m_N(N, 1) - 5.0))
    assert level_set(low, 1.0).cardinality == 0
    flat = make_field(np.full(N, m_N(N, 1)))
    assert level_set(flat, 0.0).cardinality == N
    assert level_set(flat, 3.0).cardinality == N


def test_level_set_sizes_match_level_set():
    f = sample_mbrw(5, 2, RngStream(0))
    ts = [0.5, 1, 2, 4, 50]
    sizes = level_set_sizes(f, ts)
    assert sizes.tolist() == [level_set(f, t).cardinality for t in ts]
    assert np.all(np.diff(sizes) >= 0) and sizes[-1] == 1024
    t_star = m_N(32, 2) - f.values.max()
    assert level_set(f, t_star).cardinality >= 1


def test_top_sum_examples():
    assert top_sum(np.array([3.0, 1, 2]), 2) == 5
    assert top_sum(np.array([3.0, 1, 2]), 3) == 6
    assert top_sum(np.array([3.0, 1, 2]), 4) == -math.inf
    f = sample_mbrw(4, 2, RngStream(1))
    assert top_sum(f, 1) == field_max(f)[1]
    with pytest.raises(ValueError):
        top_sum(f, 0)
    assert top_sums(np.array([3.0, 1, 2]), [1, 2, 4]).tolist() == [3, 5, -math.inf]


def test_local_extrema_examples():
    dec = make_field(np.arange(10, 0, -1))
    assert local_extrema(dec, 1).vertices.tolist() == [0]
    assert local_extrema(dec, 5).vertices.tolist() == [0]
    const = make_field(np.ones((5, 5)), d=2)
    assert len(local_extrema(const, 2)) == 25
    spikes = np.zeros(30)
    spikes[[5, 20]] = [1.0, 2.0]
    assert {5, 20} <= set(local_extrema(make_field(spikes), 4).vertices.tolist())
    with pytest.raises(ValueError):
        local_extrema(dec, 0)


def test_local_extrema_nested_in_r():
    f = sample_mbrw(5, 2, RngStream(2))
    prev = set(local_extrema(f, 1).vertices.tolist())
    for r in (2, 3, 5, 8):
        cur = set(local_extrema(f, r).vertices.tolist())
        assert cur <= prev
        prev = cur


def _spike_field(N, points, height):
    vals = np.zeros((N, N))
    for p in points:
        vals[p] = height
    return FieldSample(Lattice(N, 2), vals.reshape(-1), "TEST")


def test_mesoscopic_pairs_examples():
    N = 64
    high = m_N(N, 2)
    far = _spike_field(N, [(10, 10), (10, 42)], high)
    assert mesoscopic_pairs(far, 1.0, 4) == []
    near = _spike_field(N, [(10, 10), (10, 18)], high)
    assert mesoscopic_pairs(near, 1.0, 4) == [(10 * 64 + 10, 10 * 64 + 18)]
    assert mesoscopic_pairs(near, 1.0, 9) == []   # window [9, 64/9] is empty


def test_mesoscopic_pairs_brute():
    f = sample_mbrw(5, 2, RngStream(3))
    lam, r = 3.0, 2.0
    members = level_set(f, lam).members
    pts = f.lattice.coords
    want = sorted((int(a), int(b)) for i, a in enumerate(members) for b in members[i + 1:]
                  if r <= math.dist(pts[a], pts[b]) <= 32 / r)
    assert mesoscopic_pairs(f, lam, r) == want
