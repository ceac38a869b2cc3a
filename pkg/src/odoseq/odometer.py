"""Mixed-radix arithmetic on depth-truncated odometers.

A point of the odometer ``prod Z_{k_i}`` is stored as its first ``N`` digits.
Adding one carries to the right; a carry out of the last digit is reported
to the caller instead of being silently dropped.
"""
from __future__ import annotations

import operator
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from typing import Iterable, Sequence


@dataclass(frozen=True)
class CoefficientSequence:
    """Cut counts ``k_0 .. k_{N-1}`` with partial products ``K_0 = 1, K_{n+1} = K_n k_n``."""

    coeffs: tuple[int, ...]
    partials: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        coeffs = tuple(int(k) for k in self.coeffs)
        for i, k in enumerate(coeffs):
            if k < 2:
                raise ValueError(f"coefficient k_{i} = {k} must be at least 2")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "partials", tuple(accumulate(coeffs, operator.mul, initial=1)))

    @property
    def depth(self) -> int:
        return len(self.coeffs)

    def K(self, n: int) -> int:
        return self.partials[n]

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def truncate(self, depth: int) -> "CoefficientSequence":
        return CoefficientSequence(self.coeffs[:depth])


def _as_coeffs(c) -> CoefficientSequence:
    return c if isinstance(c, CoefficientSequence) else CoefficientSequence(tuple(c))


@dataclass(frozen=True)
class OdoPoint:
    coeffs: CoefficientSequence
    digits: tuple[int, ...]

    def __post_init__(self):
        coeffs = _as_coeffs(self.coeffs)
        digits = tuple(int(d) for d in self.digits)
        if len(digits) != coeffs.depth:
            raise ValueError(f"expected {coeffs.depth} digits, got {len(digits)}")
        for i, (d, k) in enumerate(zip(digits, coeffs.coeffs)):
            if not 0 <= d < k:
                raise ValueError(f"digit x({i}) = {d} outside [0, {k})")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "digits", digits)

    @classmethod
    def zero(cls, coeffs) -> "OdoPoint":
        coeffs = _as_coeffs(coeffs)
        return cls(coeffs, (0,) * coeffs.depth)

    @classmethod
    def from_int(cls, coeffs, j: int) -> "OdoPoint":
        """The point ``j`` times ``1`` (mod ``K_N``)."""
        coeffs = _as_coeffs(coeffs)
        digits = []
        for k in coeffs.coeffs:
            j, d = divmod(j, k)
            digits.append(d)
        return cls(coeffs, tuple(digits))

    def to_int(self) -> int:
        return tower_row(self, self.coeffs.depth)


def succ(p: OdoPoint) -> tuple[OdoPoint, bool]:
    """Add one with ripple carry. The flag is true when the carry left the truncation."""
    digits = list(p.digits)
    for i, k in enumerate(p.coeffs.coeffs):
        if digits[i] + 1 < k:
            digits[i] += 1
            return OdoPoint(p.coeffs, tuple(digits)), False
        digits[i] = 0
    return OdoPoint(p.coeffs, tuple(digits)), True


def add(p: OdoPoint, j: int) -> tuple[OdoPoint, int]:
    """Add ``j`` (a nonnegative integer) in mixed radix; returns the point and the number of wraps."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    carry = j
    digits = []
    for d, k in zip(p.digits, p.coeffs.coeffs):
        carry, r = divmod(d + carry, k)
        digits.append(r)
    return OdoPoint(p.coeffs, tuple(digits)), carry


def tower_row(p: OdoPoint, n: int) -> int:
    """Row of the n-tower containing ``p``: the mixed-radix rank of its first n digits."""
    if not 0 <= n <= p.coeffs.depth:
        raise ValueError(f"level {n} outside [0, {p.coeffs.depth}]")
    K = p.coeffs.partials
    return sum(p.digits[m] * K[m] for m in range(n))


def cylinder_measure(coeffs, prefix: Sequence[int]) -> Fraction:
    coeffs = _as_coeffs(coeffs)
    if len(prefix) > coeffs.depth:
        raise ValueError("prefix longer than the coefficient sequence")
    for i, d in enumerate(prefix):
        if not 0 <= d < coeffs.coeffs[i]:
            raise ValueError(f"prefix digit {i} = {d} outside [0, {coeffs.coeffs[i]})")
    return Fraction(1, coeffs.partials[len(prefix)])


def regroup(c, picks: Iterable[int]) -> CoefficientSequence:
    """Coefficients of the same odometer cut only at the levels ``picks``.

    ``k'_0 = K_{n_0}`` and ``k'_j = K_{n_j} / K_{n_{j-1}}``.
    """
    c = _as_coeffs(c)
    picks = list(picks)
    prev = None
    for n in picks:
        if not 0 < n <= c.depth:
            raise ValueError(f"pick {n} outside (0, {c.depth}]")
        if prev is not None and n <= prev:
            raise ValueError(f"picks must be strictly increasing, got {prev} then {n}")
        prev = n
    K = c.partials
    out = []
    last = 0
    for n in picks:
        out.append(K[n] // K[last])
        last = n
    return CoefficientSequence(tuple(out))
