"""
SplitMix64 random streams.

Every random quantity in the package comes from SplitMix64 (Steele, Lea &
Flood, 2014; reference code by S. Vigna). The generator is counter based: the
k-th output (k = 1, 2, ...) of a stream with seed ``s`` is
``mix64(s + k * GAMMA mod 2**64)``, so a stream can be advanced in bulk and
evaluated elementwise on numpy arrays.

Chain ``i`` of a simulation with master seed ``m`` uses the stream seeded by
``chain_seed(m, i) = mix64(m + (i + 1) * GAMMA)``, i.e. the i-th output of the
master stream. ``mix64`` is a bijection on 64-bit words, so distinct chain
indices always get distinct seeds.

Reference vector (seed 1234567, first five outputs)::

    6457827717110365317, 3203168211198807973, 9817491932198370423,
    4593380528125082431, 16408922859458223821
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB

REFERENCE_SEED = 1234567
REFERENCE_OUTPUTS = (
    6457827717110365317,
    3203168211198807973,
    9817491932198370423,
    4593380528125082431,
    16408922859458223821,
)

_GAMMA_U = np.uint64(GAMMA)
_MIX1_U = np.uint64(MIX1)
_MIX2_U = np.uint64(MIX2)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S32 = np.uint64(32)
_LO32 = np.uint64(0xFFFFFFFF)


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int, reduced mod 2**64."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def mix64_array(z: np.ndarray) -> np.ndarray:
    """Elementwise :func:`mix64` on a uint64 array (returns a new array)."""
    z = z ^ (z >> _S30)
    z *= _MIX1_U
    z ^= z >> _S27
    z *= _MIX2_U
    z ^= z >> _S31
    return z


def chain_seed(master_seed: int, chain_index: int) -> int:
    """Seed of the stream driving chain ``chain_index``."""
    if chain_index < 0:
        raise ValueError("chain_index must be non-negative")
    return mix64((master_seed & MASK64) + (chain_index + 1) * GAMMA)


def chain_seeds(master_seed: int, start: int, stop: int) -> np.ndarray:
    """Vectorized :func:`chain_seed` for indices ``start <= i < stop``."""
    idx = np.arange(start + 1, stop + 1, dtype=np.uint64)
    return mix64_array(np.uint64(master_seed & MASK64) + idx * _GAMMA_U)


def bounded(z: int, bound: int) -> int:
    """Map a 64-bit word to ``[0, bound)`` by multiply-shift (high word of z*bound)."""
    return (z * bound) >> 64


def bounded_array(z: np.ndarray, bound: int) -> np.ndarray:
    """Vectorized :func:`bounded`; ``bound`` must be below 2**32.

    The 128-bit product is split over 32-bit halves so it stays in uint64.
    """
    if not 0 < bound < (1 << 32):
        raise ValueError("bound must lie in (0, 2**32)")
    b = np.uint64(bound)
    hi = (z >> _S32) * b
    lo = (z & _LO32) * b
    return ((hi + (lo >> _S32)) >> _S32).astype(np.int64)


class SplitMix64:
    """Scalar SplitMix64 stream.

    >>> rng = SplitMix64(1234567)
    >>> rng.next_u64()
    6457827717110365317
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def next_below(self, bound: int) -> int:
        return bounded(self.next_u64(), bound)

    def next_float(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


class StreamBlock:
    """A block of independent SplitMix64 streams advanced in lockstep.

    Stream ``j`` of the block is the stream for chain ``start + j``.
    """

    def __init__(self, master_seed: int, start: int, stop: int):
        self.state = chain_seeds(master_seed, start, stop)

    def next_u64(self) -> np.ndarray:
        self.state += _GAMMA_U
        return mix64_array(self.state)

    def next_below(self, bound: int) -> np.ndarray:
        return bounded_array(self.next_u64(), bound)
