"""
Closed-form moments of the Manhattan-lattice walk, in exact rational arithmetic.

All values are :class:`fractions.Fraction`. Powers at ``n = 0`` follow the
convention ``0**0 == 1`` (which is what Python does), so ``d = 2, n = 0``
gives a zero mean and a zero mean square displacement.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .lattice import check_dimension


def _check_n(n: int) -> int:
    if n < 0:
        raise ValueError(f"step count must be non-negative, got {n}")
    return n


def _ratio(d: int) -> Fraction:
    return Fraction(2 - d, d)


def mean_coefficient(d: int, n: int) -> Fraction:
    """Scalar ``c`` with ``E[X_n] = c * (1, ..., 1)``."""
    d = check_dimension(d)
    _check_n(n)
    return (1 - _ratio(d) ** n) / (2 * (d - 1))


class MsdTerms(NamedTuple):
    """Unreduced pieces of the mean square displacement.

    ``value = numerator / divisor / d**power`` with ``power = n - 1``.
    """

    numerator: int
    divisor: int
    power: int


def msd_terms(d: int, n: int) -> MsdTerms:
    d = check_dimension(d)
    _check_n(n)
    numerator = (2 * (d - 1) * n - 1) * d**n + (2 - d) ** n
    return MsdTerms(numerator, 2 * (d - 1) ** 2, n - 1)


def msd(d: int, n: int) -> Fraction:
    """Mean square displacement ``E|X_n|^2`` after ``n`` steps."""
    t = msd_terms(d, n)
    return Fraction(t.numerator, t.divisor) / Fraction(d) ** t.power


def numerator_divisibility(d: int, n: int) -> tuple[int, bool]:
    """Divide the literal numerator by ``2(d-1)^2``; returns ``(quotient, exact)``."""
    t = msd_terms(d, n)
    q, r = divmod(t.numerator, t.divisor)
    return q, r == 0


@dataclass(frozen=True)
class MomentSeries:
    d: int
    values: tuple[Fraction, ...]

    def __getitem__(self, n: int) -> Fraction:
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)


def msd_series(d: int, n_max: int) -> MomentSeries:
    d = check_dimension(d)
    return MomentSeries(d, tuple(msd(d, n) for n in range(n_max + 1)))


def recurrence_residual(d: int, v: Sequence[Fraction] | MomentSeries, n: int) -> Fraction:
    """``v[n+2] - (2/d) v[n+1] - ((d-2)/d) v[n]``; equals 2 on the true sequence."""
    d = check_dimension(d)
    _check_n(n)
    if n + 2 >= len(v):
        raise IndexError(f"series of length {len(v)} has no entry {n + 2}")
    return (
        Fraction(v[n + 2])
        - Fraction(2, d) * Fraction(v[n + 1])
        - Fraction(d - 2, d) * Fraction(v[n])
    )


def parity_prob_even(d: int, n: int) -> Fraction:
    """P(Binomial(n, (d-1)/d) is even) = 1/2 + ((2-d)/d)^n / 2."""
    d = check_dimension(d)
    _check_n(n)
    return Fraction(1, 2) + _ratio(d) ** n / 2


def increment_mean(d: int, n: int) -> Fraction:
    """Per-coordinate mean of the step ``X_{n+1} - X_n``."""
    d = check_dimension(d)
    _check_n(n)
    return _ratio(d) ** n / d


def diffusive_limit(d: int) -> Fraction:
    """Limit of ``msd(d, n) / n``."""
    d = check_dimension(d)
    return Fraction(d, d - 1)


def diffusive_deviation_bound(d: int) -> Fraction:
    """Bound on ``|msd(d, n) - n d/(d-1)|`` valid for every ``n >= 0``."""
    d = check_dimension(d)
    return Fraction(d, (d - 1) ** 2)
