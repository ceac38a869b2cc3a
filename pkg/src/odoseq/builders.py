"""Explicit odometer-based construction sequences and tower bookkeeping.

Each builder returns a :class:`ConstructionSequence` whose ``generator``
records the builder name and parameters, so a JSON round trip can rebuild
lazily addressed levels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .odometer import CoefficientSequence
from .words import ConstructionSequence

TWO_WORD_MIN_K = 10
MAX_TABLE_WIDTH = 10**6


# -- permutation ranking ------------------------------------------------------


def rank_permutation(perm: Sequence[int]) -> int:
    """Lexicographic rank via the Lehmer code."""
    n = len(perm)
    remaining = list(range(n))
    rank = 0
    for i, p in enumerate(perm):
        j = remaining.index(p)
        rank += j * math.factorial(n - 1 - i)
        remaining.pop(j)
    return rank


def unrank_permutation(rank: int, n: int) -> tuple[int, ...]:
    if not 0 <= rank < math.factorial(n):
        raise ValueError(f"rank {rank} outside [0, {n}!)")
    remaining = list(range(n))
    out = []
    for i in range(n - 1, -1, -1):
        j, rank = divmod(rank, math.factorial(i))
        out.append(remaining.pop(j))
    return tuple(out)


# -- generators ----------------------------------------------------------------


class TwoWordGenerator:
    name = "two_word"

    def __init__(self, coeffs: Sequence[int]):
        self.coeffs = tuple(int(k) for k in coeffs)
        for n, k in enumerate(self.coeffs):
            if k < TWO_WORD_MIN_K:
                raise ValueError(f"two-word builder needs k_{n} >= {TWO_WORD_MIN_K}, got {k}")
        self.top_level = len(self.coeffs)
        self.params = {"coeffs": list(self.coeffs)}

    def word_count(self, n):
        return 2

    def constituents(self, n, index):
        k = self.coeffs[n - 1]
        head = (0, 0, 0, 1, 1, 1) if index == 0 else (1, 1, 1, 0, 0, 0)
        return head + tuple(j % 2 for j in range(6, k))

    def shared_block(self, n, j):
        """Level-n word at block j of every level-(n+1) word, or None inside the prefix."""
        return j % 2 if j >= 6 else None


class AlternatingGenerator:
    name = "alternating_complement"

    def __init__(self, levels: int):
        self.top_level = int(levels)
        self.params = {"levels": self.top_level}
        K = [1]
        for _ in range(self.top_level):
            K.append(2 * K[-1] ** 2)
        self.K = K
        self.coeffs = tuple(2 * K[n] for n in range(self.top_level))
        for n, k in enumerate(self.coeffs):
            if k > MAX_TABLE_WIDTH:
                raise ValueError(f"level {n + 1} needs {k} blocks per word, above {MAX_TABLE_WIDTH}")

    def word_count(self, n):
        return 2

    def constituents(self, n, index):
        half = self.K[n - 1]
        first, second = (0, 1) if index == 0 else (1, 0)
        return (first,) * half + (second,) * half


class SmallFingersGenerator:
    """Words ``(w_sigma)^3 t`` over non-identity permutations ``sigma``.

    Level ``n+1`` word ``i`` uses the permutation of lexicographic rank ``i+1``
    (rank 0 is the identity), so the table stays in lexicographic order.
    """

    name = "small_fingers"

    def __init__(self, coeffs: Sequence[int], enumerate_cap: int = 1000):
        self.coeffs = tuple(int(k) for k in coeffs)
        self.enumerate_cap = int(enumerate_cap)
        self.top_level = len(self.coeffs)
        self.params = {"coeffs": [str(k) if k >= 2**53 else k for k in self.coeffs],
                       "enumerate_cap": self.enumerate_cap}
        s = [3]
        for n in range(self.top_level):
            if s[-1] > 5000:
                raise ValueError(f"level {n + 1} word count {s[-1]}! - 1 is not computable")
            s.append(math.factorial(s[-1]) - 1)
        self.s = s
        self.c = []
        self.d = []
        for n, k in enumerate(self.coeffs):
            c, d = divmod(k, s[n])
            if c < 3:
                raise ValueError(f"k_{n} = {k} < 3 s_{n} = {3 * s[n]}")
            self.c.append(c - 3)
            self.d.append(d)
        for n in range(self.top_level - 1):
            bound = 3 * s[n] * (2**n + 1) * self.coeffs[n]
            if not self.coeffs[n + 1] > bound:
                raise ValueError(f"growth condition fails at index {n + 1}: "
                                 f"k_{n + 1} = {self.coeffs[n + 1]} <= {bound}")

    def word_count(self, n):
        return self.s[n]

    def constituents(self, n, index):
        m = n - 1
        sigma = unrank_permutation(index + 1, self.s[m])
        tail = tuple(range(self.s[m])) * self.c[m] + tuple(range(self.d[m]))
        return sigma * 3 + tail

    def multiplicities(self, n):
        """Blocks of each level-n word inside any level-(n+1) word (permutation independent)."""
        return {i: 3 + self.c[n] + (1 if i < self.d[n] else 0) for i in range(self.s[n])}

    def prefix_blocks(self, n):
        return 3 * self.s[n]

    def shared_block(self, n, j):
        return (j - 3 * self.s[n]) % self.s[n] if j >= 3 * self.s[n] else None


@dataclass
class Descriptor:
    """Generator record with no lazy levels (e.g. augmentation output)."""

    name: str
    params: dict
    top_level: int = 0


def generator_from_descriptor(desc: dict):
    try:
        name = desc["name"]
        params = desc.get("params", {})
        if name == "two_word":
            return TwoWordGenerator([int(k) for k in params["coeffs"]])
        if name == "small_fingers":
            return SmallFingersGenerator([int(k) for k in params["coeffs"]],
                                         params.get("enumerate_cap", 1000))
        if name == "alternating_complement":
            return AlternatingGenerator(params["levels"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed generator descriptor: {exc}") from exc
    return Descriptor(name, params)


def _materialize(alphabet, gen, coeffs, levels) -> ConstructionSequence:
    tables = tuple(tuple(gen.constituents(n, i) for i in range(gen.word_count(n)))
                   for n in range(1, levels + 1))
    return ConstructionSequence(tuple(alphabet), CoefficientSequence(tuple(coeffs)), tables, gen)


# -- builders -------------------------------------------------------------------


def build_two_word(coeffs: Sequence[int], levels: int | None = None) -> ConstructionSequence:
    """Two words per level; ``a`` opens with ``aaabbb``, ``b`` with ``bbbaaa``,
    both continue with the same alternating tail ``abab...``."""
    coeffs = tuple(coeffs)
    levels = len(coeffs) if levels is None else levels
    if levels > len(coeffs):
        raise ValueError(f"{levels} levels need {levels} coefficients, got {len(coeffs)}")
    gen = TwoWordGenerator(coeffs[:levels])
    return _materialize("ab", gen, coeffs[:levels], levels)


def build_alternating_complement(levels: int) -> ConstructionSequence:
    gen = AlternatingGenerator(levels)
    return _materialize("01", gen, gen.coeffs, levels)


def build_small_fingers(coeffs: Sequence[int], enumerate_cap: int = 1000) -> ConstructionSequence:
    gen = SmallFingersGenerator(coeffs, enumerate_cap)
    materialized = 0
    for n in range(1, gen.top_level + 1):
        if gen.s[n] > enumerate_cap:
            break
        materialized = n
    return _materialize("abc", gen, gen.coeffs, materialized)


def small_fingers_coeffs(k0: int, levels: int) -> list[int]:
    """Smallest coefficients above ``k0`` meeting the growth condition and ``k_n >= 3 s_n``."""
    s = [3]
    for _ in range(levels):
        s.append(math.factorial(s[-1]) - 1)
    ks = [k0]
    for n in range(levels - 1):
        ks.append(max(3 * s[n] * (2**n + 1) * ks[-1] + 1, 3 * s[n + 1]))
    return ks


# -- tower bookkeeping ----------------------------------------------------------


@dataclass(frozen=True)
class PowerCoefficient:
    """``k_n = mult * a**K_n + offset``, kept symbolic when ``a**K_n`` is too large."""

    mult: int
    offset: int = 0


@dataclass
class BudgetLevel:
    n: int
    d: int | None
    # exact value when a**K_{n-1} is computable, otherwise only the bounds
    measure: Fraction | None
    lower: Fraction
    upper: Fraction | None
    stated_hypothesis: bool   # k_{n-1} > 4 a^{K_{n-1}} 10^n
    chain_hypothesis: bool    # k_{n-1} > 4 a^{K_{n-1}} 10^{n+1}
    bound_ok: bool            # measure < 10^{-(n+1)}
    weak_bound_ok: bool       # measure < 10^{-n}


@dataclass
class TowerBudget:
    a: int
    levels: list[BudgetLevel]
    total_upper: Fraction | None
    total_ok: bool
    first_failure: int | None

    @property
    def ok(self) -> bool:
        return self.first_failure is None and self.total_ok


def _compare(mult_gap: int, offset: int, power: int | None) -> bool:
    """Decide ``mult_gap * power + offset > 0`` with ``power = a**K >= 2``; None means astronomically large."""
    if power is not None:
        return mult_gap * power + offset > 0
    if mult_gap > 0:
        return True
    if mult_gap == 0:
        return offset > 0
    return False  # a negative multiple of a huge power beats any stored offset


def check_tower_budget(a: int, coeffs: Sequence, n_max: int, bit_limit: int = 1 << 20) -> TowerBudget:
    """Exact check of ``mu(D_n) = d_n / K_n = 4 a^{K_{n-1}} / k_{n-1}`` for n = 1..n_max."""
    if a < 2:
        raise ValueError("alphabet size must be at least 2")
    if len(coeffs) < n_max:
        raise ValueError(f"need {n_max} coefficients, got {len(coeffs)}")
    K = 1  # None once astronomically large
    levels = []
    first_failure = None
    total = Fraction(0)
    for n in range(1, n_max + 1):
        k = coeffs[n - 1]
        power = a**K if K is not None and K * a.bit_length() <= bit_limit else None
        if isinstance(k, PowerCoefficient):
            mult, offset = k.mult, k.offset
            value = mult * power + offset if power is not None else None
        else:
            value = int(k)
            mult, offset = 0, value
            if power is None and value.bit_length() >= bit_limit:
                raise ValueError(f"k_{n - 1} too large to compare symbolically")
        stated = _compare(mult - 4 * 10**n, offset, power)
        chain = _compare(mult - 4 * 10 ** (n + 1), offset, power)
        bound_ok = _compare(mult - 4 * 10 ** (n + 1), offset, power)
        weak_ok = _compare(mult - 4 * 10**n, offset, power)
        if power is not None:
            measure = Fraction(4 * power, value)
            lower = upper = measure
            d = 4 * K * power
        else:
            measure, d = None, None
            if mult > 0:
                # offset / a^K lies in [0, 1) for any offset we can store
                upper = Fraction(4, mult) if offset >= 0 else None
                lower = Fraction(4, mult + 1) if offset >= 0 else Fraction(4, mult)
            else:
                upper, lower = None, Fraction(1)
        levels.append(BudgetLevel(n, d, measure, lower, upper, stated, chain, bound_ok, weak_ok))
        if not bound_ok and first_failure is None:
            first_failure = n
        total = None if total is None or upper is None else total + upper
        K = K * value if K is not None and value is not None else None
    total_ok = total is not None and total < Fraction(1, 4)
    return TowerBudget(a, levels, total, total_ok, first_failure)


def minimal_admissible(n_max: int, strength: str = "chain") -> list[PowerCoefficient]:
    """Least coefficients with ``k_m > 4 a^{K_m} 10^{m+2}`` (chain) or ``10^{m+1}`` (stated)."""
    shift = {"chain": 2, "stated": 1}[strength]
    return [PowerCoefficient(4 * 10 ** (m + shift), 1) for m in range(n_max)]


# -- painting ---------------------------------------------------------------------


@dataclass
class PaintingPlan:
    level: int
    inventory: tuple[str, ...]
    block_length: int
    capacity: int          # aligned blocks available, d_{n+1} / K_n
    explicit: tuple[int, ...] = field(repr=False)
    filler: int = 0
    strict: bool = True

    @property
    def d(self) -> int:
        return self.capacity * self.block_length

    def block(self, j: int) -> int:
        if not 0 <= j < self.capacity:
            raise IndexError(j)
        return self.explicit[j] if j < len(self.explicit) else self.filler

    def symbol_at(self, row: int) -> str:
        return self.inventory[self.block(row // self.block_length)][row % self.block_length]

    def rows(self, limit: int = 10**7) -> str:
        if self.d > limit:
            raise ValueError(f"{self.d} painted rows exceed limit {limit}")
        return "".join(self.inventory[self.block(j)] for j in range(self.capacity))

    def block_counts(self) -> dict[int, int]:
        counts = {i: 0 for i in range(len(self.inventory))}
        for j in self.explicit:
            counts[j] += 1
        counts[self.filler] += self.capacity - len(self.explicit)
        return counts


def paint_levels(inventory: Sequence[str], n: int, a: int, k_n: int,
                 capacity: int | None = None) -> PaintingPlan:
    """Place every inventory word in two aligned blocks, then fill with the first word.

    Without ``capacity`` the tower capacity ``4 a^{K_n}`` blocks is used and the
    inventory bound ``2 a^{K_n}`` is enforced. A smaller ``capacity`` runs the same
    allocator at desk scale.
    """
    inventory = tuple(inventory)
    if not inventory:
        raise ValueError("inventory is empty")
    length = len(inventory[0])
    if any(len(w) != length for w in inventory):
        raise ValueError("inventory words must share one length")
    if len(set(inventory)) != len(inventory):
        raise ValueError("inventory words must be distinct")
    if len(set("".join(inventory))) > a:
        raise ValueError(f"inventory uses more than {a} symbols")
    strict = capacity is None
    if strict:
        capacity = 4 * a**length
        if len(inventory) > 2 * a**length:
            raise ValueError(f"inventory of {len(inventory)} words exceeds 2 a^K_n = {2 * a**length}")
    needed = 2 * len(inventory)
    if capacity < needed:
        raise ValueError(f"painting needs {needed} blocks, only {capacity} available")
    if capacity > k_n:
        raise ValueError(f"{capacity} painted blocks do not fit in k_n = {k_n} columns")
    explicit = tuple(range(len(inventory))) * 2
    return PaintingPlan(n, inventory, length, capacity, explicit, 0, strict)
