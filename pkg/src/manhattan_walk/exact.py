"""
Exact laws of the walk by sparse dynamic programming and by path enumeration.

A :class:`PathDistribution` stores, for every site reachable in ``n`` steps
from the origin, the number of the ``d**n`` equally likely paths that end
there. Probabilities are ``count / d**n``; moments are computed as exact
fractions from the integer counts.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterator, Mapping

from .lattice import (
    Manhattan,
    OrientationRule,
    Site,
    check_coords,
    check_dimension,
)

DEFAULT_MAX_SITES = 5_000_000
DEFAULT_PATH_CAP = 10**8


class BudgetExceeded(RuntimeError):
    """The requested computation does not fit the configured budget."""

    def __init__(self, d: int, n: int, needed: int, limit: int, what: str = "live sites"):
        self.d, self.n, self.needed, self.limit = d, n, needed, limit
        super().__init__(
            f"d={d}, n={n} needs about {needed} {what}, above the limit of {limit}"
        )


@dataclass(frozen=True)
class PathDistribution:
    d: int
    n: int
    counts: Mapping[Site, int]
    rule: str = "manhattan"

    def __post_init__(self):
        if not isinstance(self.counts, MappingProxyType):
            object.__setattr__(self, "counts", MappingProxyType(dict(self.counts)))

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def probability(self, site: Site) -> Fraction:
        return Fraction(self.counts.get(tuple(site), 0), self.d**self.n)

    def sorted_items(self) -> list[tuple[Site, int]]:
        return sorted(self.counts.items())

    def __eq__(self, other):
        if not isinstance(other, PathDistribution):
            return NotImplemented
        return (self.d, self.n, dict(self.counts)) == (other.d, other.n, dict(other.counts))

    def __hash__(self):
        return hash((self.d, self.n, frozenset(self.counts.items())))


def origin_distribution(d: int, rule: OrientationRule | None = None) -> PathDistribution:
    d = check_dimension(d)
    name = rule.describe() if rule is not None else "manhattan"
    return PathDistribution(d, 0, {(0,) * d: 1}, name)


def evolve(
    dist: PathDistribution,
    rule: OrientationRule,
    max_sites: int = DEFAULT_MAX_SITES,
) -> PathDistribution:
    """Push every path one step forward along the ``d`` outgoing edges."""
    if rule.d != dist.d:
        raise ValueError(f"rule has d={rule.d}, distribution has d={dist.d}")
    d = dist.d
    out: defaultdict[Site, int] = defaultdict(int)
    local_env = rule.local_env
    for x, c in dist.counts.items():
        env = local_env(x)
        for i in range(d):
            y = list(x)
            y[i] += env[i]
            out[tuple(y)] += c
        if len(out) > max_sites:
            raise BudgetExceeded(d, dist.n + 1, len(out), max_sites)
    for y in out:
        check_coords(y)
    return PathDistribution(d, dist.n + 1, out, rule.describe())


def l1_ball_size(d: int, r: int) -> int:
    """Number of points of Z^d with L1 norm at most ``r``."""
    return sum(2**k * math.comb(d, k) * math.comb(r, k) for k in range(min(d, r) + 1))


def estimate_sites(d: int, n: int) -> int:
    """Upper estimate of the live-site count at step ``n`` (parity-matching L1 ball)."""
    return l1_ball_size(d, n) // 2 + 1


def iter_distributions(
    d: int,
    n_max: int,
    rule: OrientationRule | None = None,
    max_sites: int = DEFAULT_MAX_SITES,
) -> Iterator[PathDistribution]:
    """Yield the exact laws of ``X_0, X_1, ..., X_{n_max}``."""
    d = check_dimension(d)
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    rule = rule if rule is not None else Manhattan(d)
    est = estimate_sites(d, n_max)
    if est > max_sites:
        raise BudgetExceeded(d, n_max, est, max_sites)
    dist = origin_distribution(d, rule)
    yield dist
    for _ in range(n_max):
        dist = evolve(dist, rule, max_sites)
        yield dist


def exact_distribution(
    d: int,
    n: int,
    rule: OrientationRule | None = None,
    max_sites: int = DEFAULT_MAX_SITES,
) -> PathDistribution:
    """Exact law of ``X_n`` started from the origin."""
    dist = None
    for dist in iter_distributions(d, n, rule, max_sites):
        pass
    return dist


def enumerate_paths(
    d: int,
    n: int,
    rule: OrientationRule | None = None,
    cap: int = DEFAULT_PATH_CAP,
) -> PathDistribution:
    """Law of ``X_n`` by depth-first traversal of all ``d**n`` paths.

    Deliberately naive; serves as an independent check on :func:`evolve`.
    """
    d = check_dimension(d)
    if n < 0:
        raise ValueError("n must be non-negative")
    if d**n > cap:
        raise BudgetExceeded(d, n, d**n, cap, what="paths")
    rule = rule if rule is not None else Manhattan(d)
    if rule.d != d:
        raise ValueError(f"rule has d={rule.d}, requested d={d}")
    counts: defaultdict[Site, int] = defaultdict(int)
    pos = [0] * d
    sign = rule.sign

    def walk(remaining: int) -> None:
        if remaining == 0:
            counts[tuple(pos)] += 1
            return
        for i in range(d):
            s = sign(pos, i)
            pos[i] += s
            walk(remaining - 1)
            pos[i] -= s

    walk(n)
    return PathDistribution(d, n, counts, rule.describe())


def exact_mean(dist: PathDistribution) -> tuple[Fraction, ...]:
    sums = [0] * dist.d
    for x, c in dist.counts.items():
        for i, xi in enumerate(x):
            sums[i] += c * xi
    total = dist.d**dist.n
    return tuple(Fraction(s, total) for s in sums)


def exact_msd(dist: PathDistribution) -> Fraction:
    acc = 0
    for x, c in dist.counts.items():
        acc += c * sum(xi * xi for xi in x)
    return Fraction(acc, dist.d**dist.n)


def return_probability(
    d: int,
    n_even: int,
    rule: OrientationRule | None = None,
    max_sites: int = DEFAULT_MAX_SITES,
) -> Fraction:
    """Exact ``P(X_n = 0)`` for even ``n``."""
    if n_even < 0 or n_even % 2:
        raise ValueError(
            f"n={n_even}: every step changes the coordinate sum by 1, so the walk "
            "can only be back at the origin after an even number of steps"
        )
    dist = exact_distribution(d, n_even, rule, max_sites)
    return dist.probability((0,) * dist.d)


def return_probabilities(
    d: int,
    n_max: int,
    rule: OrientationRule | None = None,
    max_sites: int = DEFAULT_MAX_SITES,
) -> dict[int, Fraction]:
    """``P(X_n = 0)`` for every even ``n <= n_max`` in a single sweep."""
    out = {}
    for dist in iter_distributions(d, n_max, rule, max_sites):
        if dist.n % 2 == 0:
            out[dist.n] = dist.probability((0,) * dist.d)
    return out


def srw_counts(n: int) -> dict[tuple[int, int], int]:
    """Path counts of the n-step simple symmetric random walk on Z^2 (total 4**n)."""
    counts = {(0, 0): 1}
    for _ in range(n):
        nxt: defaultdict[tuple[int, int], int] = defaultdict(int)
        for (a, b), c in counts.items():
            nxt[(a + 1, b)] += c
            nxt[(a - 1, b)] += c
            nxt[(a, b + 1)] += c
            nxt[(a, b - 1)] += c
        counts = dict(nxt)
    return counts


def halved_counts(dist: PathDistribution) -> dict[Site, int]:
    """Push counts through ``x -> floor(x / 2)`` componentwise (floor toward -inf)."""
    out: defaultdict[Site, int] = defaultdict(int)
    for x, c in dist.counts.items():
        out[tuple(xi // 2 for xi in x)] += c
    return dict(out)


def srw_coupling_check(n: int, d: int = 2) -> bool:
    """Compare the law of ``floor(X_{2n} / 2)`` with the n-step simple random walk.

    Both sides are count maps over ``2**(2n) == 4**n`` paths, so equal counts
    means equal laws.
    """
    if d != 2:
        raise ValueError(
            f"the floor-halving coupling is specific to d=2: {d}^(2n) Manhattan "
            f"paths cannot match (2*{d})^n simple-walk paths when d > 2"
        )
    if n < 0:
        raise ValueError("n must be non-negative")
    dist = exact_distribution(2, 2 * n)
    return halved_counts(dist) == srw_counts(n)
