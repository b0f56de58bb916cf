"""
Seeded Monte Carlo simulation of walks on an oriented lattice.

Chains are simulated in blocks of consecutive chain indices, vectorized with
numpy. Chain ``i`` draws its axis choices from its own SplitMix64 stream
(see :mod:`manhattan_walk.rng`), so the trajectory of a chain depends only on
``(seed, i)`` and never on block size or worker count. Per-block moment sums
are Python integers and are merged in block order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import rng
from .lattice import LocalEnv, Manhattan, OrientationRule, Site, check_dimension

INVARIANT_CHECK_MAX_CHAINS = 10**4
DEFAULT_BLOCK = 1 << 16
MAX_TRAJECTORY_ENTRIES = 10**8
_INT64_SAFE = (1 << 63) - 1


class InvariantViolation(AssertionError):
    """A pathwise identity failed during simulation."""

    def __init__(self, identity: str, chain: int, step: int, state):
        self.identity, self.chain, self.step, self.state = identity, chain, step, state
        super().__init__(f"{identity} violated on chain {chain} at step {step}: {state}")


@dataclass(frozen=True)
class WalkerState:
    position: Site
    env: LocalEnv
    steps_taken: int = 0


def initial_state(rule: OrientationRule) -> WalkerState:
    origin = (0,) * rule.d
    return WalkerState(origin, rule.local_env(origin), 0)


def step(
    state: WalkerState,
    rule: OrientationRule,
    axis_choice: int,
    check: bool = False,
) -> WalkerState:
    """Move along axis ``axis_choice`` (1-based) in the direction cached in ``state.env``.

    With ``check``, verifies ``|x+e|^2 - |x|^2 == 2 x.e + 1`` and, on the
    Manhattan lattice, that the new environment equals ``-env + 2 e``.
    """
    if not 1 <= axis_choice <= rule.d:
        raise ValueError(f"axis_choice {axis_choice} outside 1..{rule.d}")
    i = axis_choice - 1
    s = state.env[i]
    old = state.position
    pos = list(old)
    pos[i] += s
    new_env = rule.local_env(pos)
    if check:
        gain = sum(p * p for p in pos) - sum(p * p for p in old)
        if gain != 2 * s * old[i] + 1:
            raise InvariantViolation("squared-norm increment", 0, state.steps_taken + 1, state)
        if isinstance(rule, Manhattan):
            flipped = tuple(-e + (2 * s if j == i else 0) for j, e in enumerate(state.env))
            if flipped != new_env:
                raise InvariantViolation("environment flip rule", 0, state.steps_taken + 1, state)
    return WalkerState(tuple(pos), new_env, state.steps_taken + 1)


@dataclass(frozen=True)
class SimConfig:
    """Simulation parameters.

    Moments are recorded at ``n = 0, stride, 2*stride, ...`` and always at
    ``n_steps``. ``check_invariants=None`` turns the pathwise checks on for
    runs of at most 10^4 chains.
    """

    d: int
    rule: OrientationRule
    n_steps: int
    n_chains: int
    seed: int
    record_stride: int = 1
    check_invariants: bool | None = None
    workers: int = 1
    block_size: int = DEFAULT_BLOCK
    keep_trajectories: bool = False

    def __post_init__(self):
        check_dimension(self.d)
        if self.rule.d != self.d:
            raise ValueError(f"rule has d={self.rule.d}, config has d={self.d}")
        if self.n_steps < 1:
            raise ValueError("n_steps must be at least 1")
        if self.n_chains < 1:
            raise ValueError("n_chains must be at least 1")
        if self.record_stride < 1:
            raise ValueError("record_stride must be at least 1")
        if self.workers < 1 or self.block_size < 1:
            raise ValueError("workers and block_size must be positive")
        if self.keep_trajectories:
            if self.record_stride != 1:
                raise ValueError("trajectories are only kept with record_stride=1")
            size = self.n_chains * (self.n_steps + 1) * self.d
            if size > MAX_TRAJECTORY_ENTRIES:
                raise ValueError(f"trajectory storage of {size} entries is too large")

    @property
    def invariants_enabled(self) -> bool:
        if self.check_invariants is None:
            return self.n_chains <= INVARIANT_CHECK_MAX_CHAINS
        return self.check_invariants

    @property
    def record_points(self) -> tuple[int, ...]:
        pts = list(range(0, self.n_steps + 1, self.record_stride))
        if pts[-1] != self.n_steps:
            pts.append(self.n_steps)
        return tuple(pts)

    def to_dict(self) -> dict:
        # workers and block_size do not affect results and are left out so
        # that outputs compare byte-for-byte across them.
        return {
            "d": self.d,
            "rule": self.rule.describe(),
            "n_steps": self.n_steps,
            "n_chains": self.n_chains,
            "seed": self.seed,
            "record_stride": self.record_stride,
            "check_invariants": self.invariants_enabled,
        }


@dataclass(frozen=True)
class MomentRecord:
    """Integer accumulators of ``X_n`` over ``n_chains`` chains at one time ``n``."""

    n: int
    n_chains: int
    sum_x: tuple[int, ...]
    sum_x2: tuple[int, ...]
    sum_sq: int
    sum_sq2: int

    def merge(self, other: "MomentRecord") -> "MomentRecord":
        assert self.n == other.n
        return MomentRecord(
            self.n,
            self.n_chains + other.n_chains,
            tuple(a + b for a, b in zip(self.sum_x, other.sum_x)),
            tuple(a + b for a, b in zip(self.sum_x2, other.sum_x2)),
            self.sum_sq + other.sum_sq,
            self.sum_sq2 + other.sum_sq2,
        )

    def mean(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(s, self.n_chains) for s in self.sum_x)

    def msd(self) -> Fraction:
        return Fraction(self.sum_sq, self.n_chains)

    def msd_stderr(self) -> float:
        return _stderr(self.sum_sq, self.sum_sq2, self.n_chains)

    def mean_stderr(self) -> tuple[float, ...]:
        return tuple(_stderr(s, s2, self.n_chains) for s, s2 in zip(self.sum_x, self.sum_x2))


def _stderr(s: int, s2: int, n: int) -> float:
    """Standard error of the sample mean from exact first and second sums."""
    if n < 2:
        return math.nan
    return math.sqrt(Fraction(n * s2 - s * s, n * n * (n - 1)))


def z_score(estimate: Fraction | float, target: Fraction | float, stderr: float) -> float:
    """``(estimate - target) / stderr``; zero-variance samples give 0 or +-inf."""
    diff = estimate - target
    if stderr == 0 or math.isnan(stderr):
        if diff == 0:
            return 0.0
        return math.copysign(math.inf, diff)
    return float(diff) / stderr


@dataclass
class SampleMoments:
    config: SimConfig
    records: tuple[MomentRecord, ...]
    trajectories: np.ndarray | None = field(default=None, repr=False)

    def at(self, n: int) -> MomentRecord:
        for r in self.records:
            if r.n == n:
                return r
        raise KeyError(f"no moments recorded at n={n}")


def _int_sum(arr: np.ndarray, bound: int, axis=None):
    """Exact integer sum of ``arr`` whose entries are at most ``bound`` in magnitude."""
    count = arr.shape[0]
    if bound * count <= _INT64_SAFE:
        s = arr.sum(axis=axis)
    else:
        s = arr.astype(object).sum(axis=axis)
    if axis is None:
        return int(s)
    return tuple(int(v) for v in s)


def _record(pos: np.ndarray, n: int) -> MomentRecord:
    # |x_i| <= n and |x|^2 <= n^2 for a walk started at the origin.
    x2 = pos * pos
    sq = x2.sum(axis=1)
    if n * n * n * n <= _INT64_SAFE:
        sq2 = sq * sq
    else:
        sq2 = sq.astype(object) ** 2
    return MomentRecord(
        n=n,
        n_chains=pos.shape[0],
        sum_x=_int_sum(pos, n, axis=0),
        sum_x2=_int_sum(x2, n * n, axis=0),
        sum_sq=_int_sum(sq, n * n),
        sum_sq2=_int_sum(sq2, n**4),
    )


def _run_block(config: SimConfig, start: int, stop: int):
    d, rule = config.d, config.rule
    m = stop - start
    streams = rng.StreamBlock(config.seed, start, stop)
    pos = np.zeros((m, d), dtype=np.int64)
    rows = np.arange(m)
    check = config.invariants_enabled
    manhattan = isinstance(rule, Manhattan)
    env = rule.env_array(pos) if check else None
    record_at = set(config.record_points)
    records = [_record(pos, 0)]
    traj = None
    if config.keep_trajectories:
        traj = np.zeros((m, config.n_steps + 1, d), dtype=np.int64)

    for t in range(1, config.n_steps + 1):
        axis = streams.next_below(d)
        if check:
            sign = env[rows, axis]
            old_coord = pos[rows, axis].copy()
            old_sq = (pos * pos).sum(axis=1)
        else:
            sign = rule.signs_array(pos, axis)
        pos[rows, axis] += sign

        if check:
            new_sq = (pos * pos).sum(axis=1)
            bad = np.flatnonzero(new_sq - old_sq != 2 * sign * old_coord + 1)
            if bad.size:
                k = int(bad[0])
                raise InvariantViolation(
                    "squared-norm increment", start + k, t, tuple(int(v) for v in pos[k])
                )
            fresh = rule.env_array(pos)
            if manhattan:
                # Cache update by the flip rule, then verify against the lattice.
                env = -env
                env[rows, axis] += 2 * sign
                bad = np.flatnonzero((env != fresh).any(axis=1))
                if bad.size:
                    k = int(bad[0])
                    raise InvariantViolation(
                        "environment flip rule", start + k, t, tuple(int(v) for v in pos[k])
                    )
            else:
                env = fresh
        if traj is not None:
            traj[:, t] = pos
        if t in record_at:
            records.append(_record(pos, t))

    recorded = [r for r in records if r.n in record_at]
    return recorded, traj


def simulate(config: SimConfig) -> SampleMoments:
    """Run ``config.n_chains`` independent walks from the origin."""
    bounds = [
        (s, min(s + config.block_size, config.n_chains))
        for s in range(0, config.n_chains, config.block_size)
    ]
    if config.workers == 1 or len(bounds) == 1:
        results = [_run_block(config, a, b) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda ab: _run_block(config, *ab), bounds))

    merged = list(results[0][0])
    for recs, _ in results[1:]:
        merged = [a.merge(b) for a, b in zip(merged, recs)]
    traj = None
    if config.keep_trajectories:
        traj = np.concatenate([t for _, t in results], axis=0)
    return SampleMoments(config, tuple(merged), traj)


def replay_chain(config: SimConfig, chain_index: int, check: bool = True) -> list[WalkerState]:
    """Re-run one chain with scalar arithmetic and the scalar :func:`step`."""
    if not 0 <= chain_index < config.n_chains:
        raise IndexError(f"chain {chain_index} outside 0..{config.n_chains - 1}")
    stream = rng.SplitMix64(rng.chain_seed(config.seed, chain_index))
    state = initial_state(config.rule)
    states = [state]
    for _ in range(config.n_steps):
        state = step(state, config.rule, stream.next_below(config.d) + 1, check=check)
        states.append(state)
    return states


def seed_collisions(master_seeds: Sequence[int], n_chains: int = 2) -> int:
    """Count master seeds whose first ``n_chains`` chain seeds are not all distinct."""
    return sum(
        len({rng.chain_seed(s, i) for i in range(n_chains)}) != n_chains for s in master_seeds
    )
