import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import make_field
from lcgf import _kernels_py, kernels
from lcgf.covariance import cov_brw, cov_mbrw
from lcgf.extremes import level_set_sizes, local_extrema, top_sum, top_sums
from lcgf.gibbs import OrderedWeightVector, gibbs
from lcgf.lattice import Lattice, ball, ball_offsets, euclidean_distance, squared_radius, torus_distance

finite = st.floats(-20, 20, allow_nan=False, allow_infinity=False)


@st.composite
def vertex_pair(draw, max_d=3, max_n=5):
    d = draw(st.integers(1, max_d))
    n = draw(st.integers(1, max_n))
    N = 1 << n
    coord = st.lists(st.integers(0, N - 1), min_size=d, max_size=d)
    return n, tuple(draw(coord)), tuple(draw(coord))


@given(vertex_pair())
def test_distance_relations(p):
    n, u, v = p
    N = 1 << n
    e = euclidean_distance(u, v)
    linf = max(abs(a - b) for a, b in zip(u, v))
    assert torus_distance(u, v, N) <= e + 1e-12
    assert linf <= e + 1e-12 and e <= math.sqrt(len(u)) * linf + 1e-12


@given(vertex_pair())
def test_covariances_symmetric_and_bounded(p):
    n, u, v = p
    logN = n * math.log(2)
    for fn in (cov_brw, cov_mbrw):
        c = fn(u, v, n)
        assert c == fn(v, u, n)
        assert -1e-12 <= c <= logN + 1e-12


@given(st.floats(0, 30, allow_nan=False))
def test_squared_radius_exact(r):
    D = squared_radius(r)
    assert D <= r * r < D + 1


@given(st.integers(1, 3), st.floats(0, 4), st.floats(0, 4))
def test_ball_monotone(d, r1, r2):
    lat = Lattice(7, d)
    v = (3,) * d
    a, b = sorted((r1, r2))
    assert set(ball(lat, v, a)) <= set(ball(lat, v, b))


@given(arrays(float, st.integers(1, 30), elements=finite), finite, st.integers(1, 30))
def test_top_sum_translation_and_increments(x, c, ell):
    if ell > len(x):
        assert top_sum(x, ell) == -math.inf
        return
    assert math.isclose(top_sum(x + c, ell), top_sum(x, ell) + ell * c, abs_tol=1e-9)
    s = top_sums(x, range(1, len(x) + 1))
    inc = np.diff(np.concatenate([[0.0], s]))
    assert np.allclose(inc, np.sort(x)[::-1], atol=1e-9)
    assert np.all(np.diff(inc) <= 1e-9)   # concave in ell


@given(arrays(float, st.integers(3, 40), elements=finite), finite, st.floats(0.1, 5))
def test_gibbs_shift_invariant(x, c, beta):
    f, g = make_field(x), make_field(x + c)
    assert np.allclose(gibbs(f, beta).probabilities, gibbs(g, beta).probabilities, atol=1e-12)
    assert math.isclose(gibbs(f, beta).probabilities.sum(), 1.0, abs_tol=1e-12)


@given(arrays(float, (6, 6), elements=finite), st.lists(st.floats(-30, 30), min_size=1, max_size=6))
def test_level_sets_nested(x, ts):
    f = make_field(x, d=2)
    ts = sorted(ts)
    assert np.all(np.diff(level_set_sizes(f, ts)) >= 0)


@settings(deadline=None)
@given(arrays(float, (9, 9), elements=st.integers(-3, 3).map(float)), st.floats(1, 3), st.floats(0, 2))
def test_local_extrema_nested(x, r, extra):
    f = make_field(x, d=2)
    big = set(local_extrema(f, r + extra).vertices.tolist())
    assert big <= set(local_extrema(f, r).vertices.tolist())


@given(arrays(float, st.integers(1, 20), elements=st.floats(0, 1e6)))
def test_ordered_vector_from_masses(m):
    if m.sum() <= 0:
        return
    v = OrderedWeightVector.from_masses(m)
    assert np.all(np.diff(v.p) <= 0) and math.isclose(v.p.sum(), 1.0, abs_tol=1e-12)


@settings(deadline=None)
@given(arrays(float, st.sampled_from([(8,), (4, 4), (2, 4, 4)]), elements=finite),
       st.sampled_from([1, 2]), st.floats(0.5, 3))
def test_backend_kernels_agree(a, w, r):
    np.testing.assert_allclose(kernels.circular_box_sum(a, w), _kernels_py.circular_box_sum(a, w), atol=1e-9)
    off = ball_offsets(a.ndim, r)
    assert np.array_equal(kernels.local_max_mask(a, off), _kernels_py.local_max_mask(a, off))
