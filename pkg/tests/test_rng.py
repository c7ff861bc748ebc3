import numpy as np
import pytest

from fieldloc import RngStream


def test_same_seed_same_values():
    a = RngStream.from_seed(42).generator.uniform(size=100)
    b = RngStream.from_seed(42).generator.uniform(size=100)
    assert np.array_equal(a, b)


def test_different_seeds_differ():
    a = RngStream.from_seed(1).generator.uniform(size=10)
    b = RngStream.from_seed(2).generator.uniform(size=10)
    assert not np.array_equal(a, b)


def test_substream_independent_of_parent_draws():
    s1 = RngStream.from_seed(7)
    s2 = RngStream.from_seed(7)
    s1.generator.uniform(size=1000)  # consume the parent
    a = s1.substream("child").generator.uniform(size=10)
    b = s2.substream("child").generator.uniform(size=10)
    assert np.array_equal(a, b)


def test_substream_label_path_matters():
    root = RngStream.from_seed(7)
    a = root.substream("x").generator.uniform(size=10)
    b = root.substream("y").generator.uniform(size=10)
    c = root.substream("x", 1).generator.uniform(size=10)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_int_and_str_labels_distinct():
    root = RngStream.from_seed(7)
    a = root.substream(1).generator.uniform(size=10)
    b = root.substream("1").generator.uniform(size=10)
    assert not np.array_equal(a, b)


def test_nested_substreams_reproducible():
    a = RngStream.from_seed(3).substream("t", 5).substream("inner").generator.normal(size=5)
    b = RngStream.from_seed(3).substream("t", 5).substream("inner").generator.normal(size=5)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("bad", [-1, 2**64])
def test_seed_range_enforced(bad):
    with pytest.raises(ValueError):
        RngStream.from_seed(bad)


def test_labels_must_be_str_or_int():
    with pytest.raises(TypeError):
        RngStream.from_seed(0).substream(3.5)
