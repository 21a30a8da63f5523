import numpy as np

from lcgf.rng import RngStream


def test_same_key_same_stream():
    a = RngStream(5, 3, "field").standard_normal(10)
    b = RngStream(5, 3, "field").standard_normal(10)
    assert np.array_equal(a, b)


def test_distinct_keys_differ():
    base = RngStream(5, 3, "field").standard_normal(10)
    for other in (RngStream(6, 3, "field"), RngStream(5, 4, "field"), RngStream(5, 3, "other")):
        assert not np.array_equal(base, other.standard_normal(10))


def test_counter_counts_variates():
    r = RngStream(0)
    r.standard_normal((3, 4))
    r.uniform(5)
    r.exponential()
    assert r.counter == 18


def test_child_streams():
    r = RngStream(1, 2, "ou")
    c = r.child("prime")
    assert c.purpose == "ou/prime" and c.stream == 2
    assert not np.array_equal(c.standard_normal(4), RngStream(1, 2, "ou").standard_normal(4))
