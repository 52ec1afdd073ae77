import numpy as np

from locdisc.rng import derive_seed, stream


def test_streams_repeat_for_equal_keys():
    assert np.array_equal(stream(3, 1, 2).random(5), stream(3, 1, 2).random(5))


def test_streams_differ_across_keys():
    a = stream(3, 1).random(5)
    assert not np.array_equal(a, stream(3, 2).random(5))
    assert not np.array_equal(a, stream(4, 1).random(5))


def test_derived_seeds_are_stable_integers():
    s = derive_seed(0, 5)
    assert isinstance(s, int) and s == derive_seed(0, 5) and s != derive_seed(0, 6)
