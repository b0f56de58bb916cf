"""
Oriented lattices on Z^d.

An oriented lattice gives every axis-parallel bi-infinite line of Z^d a single
direction. A rule here is anything that maps ``(site, axis)`` to the sign of
the line through ``site`` along ``axis``, where the answer may depend only on
the coordinates perpendicular to ``axis``. Three rules are provided:

* :class:`Manhattan` -- axis ``i`` points in the + direction at ``x`` iff the
  sum of the other coordinates of ``x`` is even.
* :class:`IIDCoin` -- each line gets a sign from a seeded hash of
  ``(axis, perpendicular coordinates)``.
* :class:`CustomTable` -- an explicit finite (optionally periodic) table of
  line signs.

Sites are tuples of ints, local environments are tuples of ``+1``/``-1``.
Axes are numbered ``1..d`` in the public functions, matching the usual
``e_1, ..., e_d`` labelling of basis vectors.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from . import rng

Site = tuple[int, ...]
LocalEnv = tuple[int, ...]

# Coordinates are kept inside the signed 64-bit range so the vectorized
# simulator (int64) and the exact engine agree on which sites are legal.
COORD_MAX = (1 << 63) - 1
COORD_MIN = -(1 << 63)


class DimensionError(ValueError):
    """Dimension below 2, or a site whose length does not match the rule."""


class LatticeDomainError(KeyError):
    """Query outside the domain of a finite orientation table."""


class CoordinateOverflow(OverflowError):
    """A site left the supported signed 64-bit coordinate range."""


def check_dimension(d: int) -> int:
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)):
        raise DimensionError(f"dimension must be an integer, got {d!r}")
    if d < 2:
        raise DimensionError(f"dimension must be at least 2, got {d}")
    return int(d)


class Step(NamedTuple):
    """A unit move ``sign * e_axis`` (axis in ``1..d``)."""

    axis: int
    sign: int

    def vector(self, d: int) -> Site:
        v = [0] * d
        v[self.axis - 1] = self.sign
        return tuple(v)


class OrientationRule:
    """Base class for orientation rules.

    Subclasses implement :meth:`sign` (0-based axis) and may override
    :meth:`signs_array` with a vectorized version.
    """

    name = "rule"

    def __init__(self, d: int):
        self.d = check_dimension(d)

    def sign(self, x: Sequence[int], axis: int) -> int:
        raise NotImplementedError

    def local_env(self, x: Sequence[int]) -> LocalEnv:
        return tuple(self.sign(x, i) for i in range(self.d))

    def signs_array(self, pos: np.ndarray, axis: np.ndarray) -> np.ndarray:
        """Signs of ``axis[k]`` (0-based) at ``pos[k]`` for a batch of sites.

        Generic fallback; loops in Python.
        """
        return np.fromiter(
            (self.sign(tuple(int(c) for c in p), int(a)) for p, a in zip(pos, axis)),
            dtype=np.int64,
            count=len(axis),
        )

    def env_array(self, pos: np.ndarray) -> np.ndarray:
        """Full local environments for a batch of sites, shape ``(m, d)``."""
        m = pos.shape[0]
        out = np.empty((m, self.d), dtype=np.int64)
        for i in range(self.d):
            out[:, i] = self.signs_array(pos, np.full(m, i, dtype=np.int64))
        return out

    def describe(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"{type(self).__name__}(d={self.d})"


class Manhattan(OrientationRule):
    """The Manhattan lattice: neighbouring parallel lines alternate direction."""

    name = "manhattan"

    def sign(self, x: Sequence[int], axis: int) -> int:
        return 1 if (sum(x) - x[axis]) % 2 == 0 else -1

    def local_env(self, x: Sequence[int]) -> LocalEnv:
        s = sum(x)
        return tuple(1 if (s - c) % 2 == 0 else -1 for c in x)

    def signs_array(self, pos, axis):
        perp = pos.sum(axis=1) - pos[np.arange(pos.shape[0]), axis]
        return 1 - 2 * (perp & 1)

    def env_array(self, pos):
        perp = pos.sum(axis=1, keepdims=True) - pos
        return 1 - 2 * (perp & 1)


class IIDCoin(OrientationRule):
    """Independent fair-coin orientation per line, reproducible from a seed.

    The sign of the line along ``axis`` (0-based) through ``x`` is computed as::

        h = mix64(seed + (axis + 1) * GAMMA)
        for j in 0..d-1:
            c = 0 if j == axis else x[j]
            h = mix64(h ^ (c mod 2**64))
        sign = +1 if the top bit of h is 0 else -1

    with ``mix64`` the SplitMix64 finalizer from :mod:`manhattan_walk.rng`.
    Only the perpendicular coordinates enter, so the sign is constant along
    the line.
    """

    name = "iid"

    def __init__(self, d: int, seed: int):
        super().__init__(d)
        self.seed = int(seed) & rng.MASK64
        self._axis_keys = [
            rng.mix64(self.seed + (i + 1) * rng.GAMMA) for i in range(self.d)
        ]

    def sign(self, x, axis):
        h = self._axis_keys[axis]
        for j, c in enumerate(x):
            h = rng.mix64(h ^ ((0 if j == axis else c) & rng.MASK64))
        return -1 if h >> 63 else 1

    def signs_array(self, pos, axis):
        keys = np.array(self._axis_keys, dtype=np.uint64)
        h = keys[axis]
        upos = pos.view(np.uint64)
        zero = np.uint64(0)
        for j in range(self.d):
            c = np.where(axis == j, zero, upos[:, j])
            h = rng.mix64_array(h ^ c)
        return 1 - 2 * (h >> np.uint64(63)).astype(np.int64)

    def describe(self):
        return f"iid:{self.seed}"

    def __repr__(self):
        return f"IIDCoin(d={self.d}, seed={self.seed})"


class CustomTable(OrientationRule):
    """Orientation from an explicit table of line signs.

    ``table`` maps ``(axis, perp)`` to ``+1``/``-1``, where ``axis`` is 1-based
    and ``perp`` is the tuple of the ``d - 1`` coordinates other than ``axis``
    (in increasing axis order). With ``period`` given (one positive int per
    coordinate), perpendicular coordinates are reduced modulo their period
    before lookup, making the table cover all of Z^d. Without it the table is
    a boxed domain and lookups of missing lines raise
    :class:`LatticeDomainError`.
    """

    name = "custom"

    def __init__(
        self,
        d: int,
        table: Mapping[tuple[int, tuple[int, ...]], int],
        period: Sequence[int] | None = None,
    ):
        super().__init__(d)
        if period is not None:
            if len(period) != self.d or any(p < 1 for p in period):
                raise ValueError("period needs one positive entry per coordinate")
            period = tuple(int(p) for p in period)
        self.period = period
        self.table: dict[tuple[int, tuple[int, ...]], int] = {}
        for (axis, perp), s in table.items():
            if s not in (1, -1):
                raise ValueError(f"line sign must be +1 or -1, got {s!r}")
            if not 1 <= axis <= self.d or len(perp) != self.d - 1:
                raise DimensionError(f"bad table key {(axis, perp)!r}")
            self.table[(axis, tuple(perp))] = s

    @classmethod
    def from_function(
        cls,
        d: int,
        func: Callable[[int, tuple[int, ...]], int],
        period: Sequence[int],
    ) -> "CustomTable":
        """Tabulate ``func(axis, perp)`` over one period of every line family."""
        d = check_dimension(d)
        table = {}
        for axis in range(1, d + 1):
            others = [p for j, p in enumerate(period) if j != axis - 1]
            for perp in itertools.product(*(range(p) for p in others)):
                table[(axis, perp)] = func(axis, perp)
        return cls(d, table, period)

    def sign(self, x, axis):
        perp = tuple(c for j, c in enumerate(x) if j != axis)
        if self.period is not None:
            ps = [p for j, p in enumerate(self.period) if j != axis]
            perp = tuple(c % p for c, p in zip(perp, ps))
        try:
            return self.table[(axis + 1, perp)]
        except KeyError:
            raise LatticeDomainError(
                f"no orientation for axis {axis + 1} line through {tuple(x)}"
            ) from None

    def __repr__(self):
        return f"CustomTable(d={self.d}, lines={len(self.table)}, period={self.period})"


def parse_rule(text: str, d: int) -> OrientationRule:
    """Build a rule from ``"manhattan"`` or ``"iid:<seed>"``."""
    text = text.strip().lower()
    if text == "manhattan":
        return Manhattan(d)
    if text.startswith("iid:"):
        try:
            seed = int(text[4:], 0)
        except ValueError:
            raise ValueError(f"bad iid seed in rule {text!r}") from None
        return IIDCoin(d, seed)
    raise ValueError(f"unknown rule {text!r} (expected 'manhattan' or 'iid:<seed>')")


def _check_site(rule: OrientationRule, x: Sequence[int]) -> None:
    if len(x) != rule.d:
        raise DimensionError(f"site {tuple(x)} has length {len(x)}, rule has d={rule.d}")


def check_coords(x: Sequence[int]) -> None:
    for c in x:
        if not COORD_MIN <= c <= COORD_MAX:
            raise CoordinateOverflow(f"coordinate {c} outside the signed 64-bit range")


def local_env(rule: OrientationRule, x: Sequence[int]) -> LocalEnv:
    """Outgoing edge sign on each axis at ``x``."""
    _check_site(rule, x)
    return rule.local_env(x)


def out_steps(rule: OrientationRule, x: Sequence[int]) -> list[Step]:
    """The ``d`` steps available from ``x``, one per axis."""
    env = local_env(rule, x)
    return [Step(i + 1, s) for i, s in enumerate(env)]


def out_neighbours(rule: OrientationRule, x: Sequence[int]) -> list[Site]:
    env = local_env(rule, x)
    return [tuple(c + env[i] if j == i else c for j, c in enumerate(x)) for i in range(rule.d)]


def in_neighbours(rule: OrientationRule, x: Sequence[int]) -> list[Site]:
    """Sites ``y`` with an edge ``y -> x``."""
    _check_site(rule, x)
    out = []
    for i in range(rule.d):
        for s in (1, -1):
            y = list(x)
            y[i] -= s
            if rule.sign(y, i) == s:
                out.append(tuple(y))
    return out


def is_directed_edge(rule: OrientationRule, x: Sequence[int], y: Sequence[int]) -> bool:
    _check_site(rule, x)
    _check_site(rule, y)
    diff = [b - a for a, b in zip(x, y)]
    nonzero = [i for i, v in enumerate(diff) if v != 0]
    if len(nonzero) != 1 or abs(diff[nonzero[0]]) != 1:
        return False
    i = nonzero[0]
    return rule.sign(x, i) == diff[i]


def env_census(rule: OrientationRule, radius: int = 2) -> frozenset[LocalEnv]:
    """Distinct local environments over the box ``[-radius, radius]^d``."""
    if radius < 1:
        raise ValueError("radius must be at least 1")
    rng_ = range(-radius, radius + 1)
    return frozenset(rule.local_env(x) for x in itertools.product(rng_, repeat=rule.d))


def expected_census_count(d: int) -> int:
    """Number of local environments realised on the Manhattan lattice."""
    d = check_dimension(d)
    return 2**d if d % 2 == 0 else 2 ** (d - 1)


def check_line_consistency(
    rule: OrientationRule, x: Sequence[int], axis: int, span: int
) -> bool:
    """True iff the ``axis`` sign is constant on ``x + k e_axis``, ``|k| <= span``."""
    _check_site(rule, x)
    if span < 1:
        raise ValueError("span must be at least 1")
    if not 1 <= axis <= rule.d:
        raise DimensionError(f"axis {axis} outside 1..{rule.d}")
    a = axis - 1
    signs = set()
    for k in range(-span, span + 1):
        y = list(x)
        y[a] += k
        signs.add(rule.sign(y, a))
    return len(signs) == 1


def census_to_json(envs: Iterable[LocalEnv]) -> list[list[int]]:
    return [list(e) for e in sorted(envs)]
