import numpy as np
import pytest
from hypothesis import given, strategies as st

from manhattan_walk import rng


def test_reference_vector():
    g = rng.SplitMix64(rng.REFERENCE_SEED)
    assert tuple(g.next_u64() for _ in range(5)) == rng.REFERENCE_OUTPUTS


def test_block_matches_scalar_streams():
    block = rng.StreamBlock(99, 10, 20)
    draws = np.stack([block.next_u64() for _ in range(7)])
    for j in range(10):
        g = rng.SplitMix64(rng.chain_seed(99, 10 + j))
        assert [int(v) for v in draws[:, j]] == [g.next_u64() for _ in range(7)]


@given(st.integers(0, 2**64 - 1), st.integers(0, 10**6))
def test_chain_seed_deterministic(seed, i):
    assert rng.chain_seed(seed, i) == rng.chain_seed(seed, i)
    assert int(rng.chain_seeds(seed, i, i + 1)[0]) == rng.chain_seed(seed, i)


def test_chain_seed_no_collisions():
    masters = rng.SplitMix64(7)
    seeds = [masters.next_u64() for _ in range(10_000)]
    assert all(rng.chain_seed(s, 0) != rng.chain_seed(s, 1) for s in seeds)


def test_neighbouring_streams_uncorrelated():
    n = 100_000
    a = rng.StreamBlock(12345, 0, 2)
    draws = np.stack([a.next_u64() for _ in range(n)])
    u = (draws >> np.uint64(11)).astype(np.float64) / 2.0**53
    r = np.corrcoef(u[:, 0], u[:, 1])[0, 1]
    # 5 standard deviations of the null sampling distribution of r.
    assert abs(r) < 5 / np.sqrt(n)


@pytest.mark.parametrize("bound", [2, 3, 5, 7, 10])
def test_bounded_array_matches_scalar(bound):
    g = rng.SplitMix64(3)
    words = [g.next_u64() for _ in range(1000)] + [0, 2**64 - 1, 2**63]
    arr = rng.bounded_array(np.array(words, dtype=np.uint64), bound)
    assert arr.tolist() == [rng.bounded(w, bound) for w in words]
    assert arr.min() >= 0 and arr.max() < bound


def test_bounded_roughly_uniform():
    block = rng.StreamBlock(1, 0, 100_000)
    counts = np.bincount(block.next_below(3), minlength=3)
    expected = 100_000 / 3
    chi2 = ((counts - expected) ** 2 / expected).sum()
    assert chi2 < 20  # 2 dof; far beyond the 0.999 quantile (13.8)
