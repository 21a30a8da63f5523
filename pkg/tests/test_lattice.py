import itertools
import math

import numpy as np
import pytest

from lcgf.lattice import (DyadicBox, Lattice, ball, ball_offsets, dyadic_ancestors, euclidean_distance,
                          interior, require_power_of_two, squared_radius, torus_distance)


def test_lattice_validation_and_linearization():
    lat = Lattice(4, 2)
    assert lat.size == 16 and lat.shape == (4, 4)
    assert lat.index((1, 2)) == 6
    assert lat.vertex(6) == (1, 2)
    assert np.array_equal(lat.coords[6], [1, 2])
    with pytest.raises(ValueError):
        Lattice(0, 1)
    with pytest.raises(ValueError):
        Lattice(4, 5)
    with pytest.raises(OverflowError):
        Lattice(2 ** 20, 4)
    with pytest.raises(ValueError):
        lat.index((4, 0))


def test_euclidean_distance_examples():
    assert euclidean_distance((1, 2), (1, 2)) == 0
    assert euclidean_distance((0, 0), (3, 4)) == 5
    assert euclidean_distance((0,), (7,)) == 7
    with pytest.raises(ValueError):
        euclidean_distance((0, 0), (1,))


def test_torus_distance_examples():
    assert torus_distance((3, 3), (3, 3), 8) == 0
    assert torus_distance((0,), (7,), 8) == 1
    assert torus_distance((0, 0), (7, 7), 8) == pytest.approx(1.41421356, abs=1e-8)
    with pytest.raises(ValueError):
        torus_distance((0, 0), (1,), 8)


def _torus_brute(u, v, N):
    # scan a wider window of shifts than the implementation uses
    best = math.inf
    for s in itertools.product(range(-2, 3), repeat=len(u)):
        best = min(best, math.dist(u, [b + k * N for b, k in zip(v, s)]))
    return best


@pytest.mark.parametrize("N,d", [(5, 1), (6, 2), (4, 3)])
def test_torus_distance_exhaustive(N, d):
    lat = Lattice(N, d)
    for i in range(lat.size):
        for j in range(lat.size):
            u, v = lat.vertex(i), lat.vertex(j)
            t = torus_distance(u, v, N)
            assert t == pytest.approx(_torus_brute(u, v, N), abs=1e-12)
            assert t <= euclidean_distance(u, v) + 1e-12


def test_squared_radius_exact():
    assert squared_radius(0) == 0
    assert squared_radius(1) == 1
    assert squared_radius(math.sqrt(2)) == 2
    assert squared_radius(2.5) == 6
    assert squared_radius(3.0) == 9
    with pytest.raises(ValueError):
        squared_radius(-1)


def test_ball_examples():
    lat = Lattice(10, 1)
    assert list(ball(lat, (5,), 0)) == [5]
    assert list(ball(lat, (5,), 1)) == [4, 5, 6]
    lat2 = Lattice(9, 2)
    assert len(ball(lat2, (4, 4), 1)) == 5
    assert len(ball(lat2, (4, 4), math.sqrt(2))) == 9
    assert len(ball(lat2, (0, 0), 9 * math.sqrt(2))) == 81


def test_ball_offsets_order():
    off = ball_offsets(2, 1)
    assert off.tolist() == [[0, 0], [-1, 0], [0, -1], [0, 1], [1, 0]]


def test_interior_examples():
    lat = Lattice(10, 1)
    assert len(interior(lat, 0.0)) == 10
    assert list(interior(lat, 0.2)) == list(range(1, 9))
    # d_inf(v, outside) >= delta N keeps the central 2x2 block at N=4, delta=1/2
    assert list(interior(Lattice(4, 2), 0.5)) == [5, 6, 9, 10]
    assert len(interior(Lattice(4, 2), 0.6)) == 0


def test_dyadic_ancestors_examples():
    boxes = dyadic_ancestors((1,), 2, aligned=True)
    assert boxes == [DyadicBox(0, (1,)), DyadicBox(1, (0,))]
    level1 = [b for b in dyadic_ancestors((1,), 2, aligned=False) if b.level == 1]
    assert sorted(b.corner for b in level1) == [(0,), (1,)]
    assert dyadic_ancestors((3, 5), 1)[0] == DyadicBox(0, (3, 5))


def test_aligned_ancestors_nested():
    for v in [(0, 0), (5, 3), (7, 7)]:
        boxes = dyadic_ancestors(v, 3)
        assert [b.level for b in boxes] == [0, 1, 2]
        for small, big in zip(boxes, boxes[1:]):
            assert big.contains(small.corner) and big.contains(v)


def test_require_power_of_two():
    assert require_power_of_two(1) == 0
    assert require_power_of_two(64) == 6
    for bad in (0, 3, 100):
        with pytest.raises(ValueError):
            require_power_of_two(bad)
