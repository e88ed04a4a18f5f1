"""Counter-based RNG: determinism, ranges, and stream independence."""

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from treegreen import rng


def test_mix64_scalar_array_agree():
    xs = np.arange(100, dtype=np.uint64)
    arr = rng.mix64(xs)
    for i in range(100):
        assert rng.mix64(int(xs[i])) == arr[i]


def test_mix64_is_a_permutation_on_samples():
    xs = np.arange(10_000, dtype=np.uint64)
    out = rng.mix64(xs)
    assert len(np.unique(out)) == xs.size


def test_uniforms_deterministic_and_order_free():
    counters = np.arange(1000, dtype=np.uint64)
    a = rng.uniforms(7, rng.TAG_DISORDER, counters)
    b = rng.uniforms(7, rng.TAG_DISORDER, counters)
    assert np.array_equal(a, b)
    # permuting the counters permutes the values identically
    perm = np.argsort(rng.mix64(counters))
    c = rng.uniforms(7, rng.TAG_DISORDER, counters[perm])
    assert np.array_equal(c, a[perm])


def test_uniforms_ranges():
    counters = np.arange(200_000, dtype=np.uint64)
    u = rng.uniforms(3, rng.TAG_DISORDER, counters)
    assert u.min() >= 0.0 and u.max() < 1.0
    uo = rng.uniforms_open(3, rng.TAG_DISORDER, counters)
    assert uo.min() > 0.0 and uo.max() < 1.0
    # mean of 2e5 uniforms: 5 sigma of 1/sqrt(12 n)
    assert abs(u.mean() - 0.5) < 5.0 / np.sqrt(12.0 * u.size)


def test_streams_differ_by_seed_and_tag():
    counters = np.arange(100, dtype=np.uint64)
    base = rng.uniforms(1, rng.TAG_DISORDER, counters)
    assert not np.array_equal(base, rng.uniforms(2, rng.TAG_DISORDER, counters))
    assert not np.array_equal(base, rng.uniforms(1, rng.TAG_PARENT, counters))


def test_uniform_indices_in_range():
    counters = np.arange(50_000, dtype=np.uint64)
    idx = rng.uniform_indices(0, rng.TAG_PARENT, counters, 17)
    assert idx.min() >= 0 and idx.max() <= 16
    # all 17 cells hit at this sample size
    assert len(np.unique(idx)) == 17


def test_derive_seed_spreads():
    seeds = {rng.derive_seed(5, rng.TAG_REPLICA, i) for i in range(100)}
    assert len(seeds) == 100
    assert rng.derive_seed(5, rng.TAG_REPLICA, 3) == rng.derive_seed(
        5, rng.TAG_REPLICA, 3)
    assert rng.derive_seed(5, rng.TAG_CELL, 3) != rng.derive_seed(
        5, rng.TAG_REPLICA, 3)


def test_path_code_matches_fold():
    code = rng.path_code((0, 1, 2))
    step = np.array([rng.ROOT_CODE], dtype=np.uint64)
    for digit in (0, 1, 2):
        step = rng.fold_path_codes(step, digit)
    assert code == step[0]
    # distinct paths get distinct codes, including prefix/extension pairs
    paths = [(), (0,), (1,), (0, 0), (0, 1), (1, 0), (1, 1), (0, 1, 2)]
    codes = {int(rng.path_code(p)) for p in paths}
    assert len(codes) == len(paths)


def test_path_code_rejects_negative_digit():
    try:
        rng.path_code((0, -1))
    except ValueError:
        pass
    else:
        raise AssertionError("negative child index must be rejected")


@given(st.integers(min_value=0, max_value=2**63 - 1),
       st.integers(min_value=0, max_value=255))
def test_stream_key_deterministic(seed, tag):
    assert rng.stream_key(seed, tag) == rng.stream_key(seed, tag)


@given(st.lists(st.integers(min_value=0, max_value=3), min_size=0, max_size=8))
def test_path_code_pure(path):
    p = tuple(path)
    assert rng.path_code(p) == rng.path_code(p)
