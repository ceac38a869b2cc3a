"""Word-frequency statistics, the small word property, and thinning of levels."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .odometer import CoefficientSequence, regroup
from .words import (ConstructionSequence, WordId, block_counts, fraction_str)

MAX_PAIRS = 200_000  # full table scans above this many (w', block) visits are sampled
MAX_THINNED_WIDTH = 10**6


@dataclass
class LevelFrequency:
    level: int
    f: Fraction  # max Freq(w, w') over w in level n, w' in level n+1
    f_min: Fraction
    status: str  # exact | closed-form | sampled
    argmax: tuple[int, int] | None = None

    def to_dict(self) -> dict:
        return {"level": self.level, "f": fraction_str(self.f), "f_min": fraction_str(self.f_min),
                "status": self.status,
                "argmax": list(self.argmax) if self.argmax else None}


@dataclass
class FrequencyProfile:
    levels: list[LevelFrequency]
    notes: list[str] = field(default_factory=list)

    @property
    def f(self) -> list[Fraction]:
        return [lv.f for lv in self.levels]

    @property
    def exact(self) -> bool:
        return all(lv.status != "sampled" for lv in self.levels)

    def to_dict(self) -> dict:
        return {"levels": [lv.to_dict() for lv in self.levels], "notes": self.notes}


def _pair_freqs(seq, n, m, rng, sample):
    """Yield (w', Counter of level-n blocks) for level-m words, sampled if huge."""
    count = seq.word_count(m)
    if seq.is_materialized(m) or count <= sample:
        ids = range(count)
        status = "exact"
    else:
        ids = sorted({0, count - 1} | {rng.randrange(count) for _ in range(sample)})
        status = "sampled"
    return status, ((j, block_counts(seq, n, WordId(m, j))) for j in ids)


def level_frequency(seq: ConstructionSequence, n: int, m: int | None = None, *,
                    sample: int = 64, seed: int = 0) -> LevelFrequency:
    """Max and min of ``Freq(w, w')`` over level-n ``w`` and level-m ``w'`` (default m = n+1)."""
    m = n + 1 if m is None else m
    gen = seq.generator
    if (m == n + 1 and not seq.is_materialized(m) and gen is not None
            and hasattr(gen, "multiplicities")):
        mult = gen.multiplicities(n)
        k = seq.coeffs[n]
        hi = max(mult, key=lambda i: (mult[i], -i))
        lo = min(mult.values())
        if len(mult) < seq.word_count(n):
            lo = 0
        return LevelFrequency(n, Fraction(mult[hi], k), Fraction(lo, k), "closed-form", (hi, 0))
    rng = random.Random(seed)
    blocks = seq.K(m) // seq.K(n)
    words_n = seq.word_count(n)
    status, rows = _pair_freqs(seq, n, m, rng, sample)
    best, best_at, worst = -1, None, None
    for j, counts in rows:
        for i, c in counts.items():
            if c > best:
                best, best_at = c, (i, j)
        low = min(counts.values()) if len(counts) == words_n else 0
        worst = low if worst is None else min(worst, low)
    return LevelFrequency(n, Fraction(best, blocks), Fraction(worst, blocks), status, best_at)


def frequency_profile(seq: ConstructionSequence, level_cap: int | None = None, *,
                      sample: int = 64, seed: int = 0) -> FrequencyProfile:
    top = seq.top_level if level_cap is None else min(level_cap, seq.top_level)
    levels = [level_frequency(seq, n, sample=sample, seed=seed) for n in range(top)]
    notes = []
    if any(lv.status == "closed-form" for lv in levels):
        notes.append("closed-form levels: each level-(n+1) word is sigma^3 t with sigma a "
                     "permutation of level n and t = (0..s-1)^c (0..d-1), so word i occurs "
                     "3 + c + [i < d] times regardless of sigma")
    if any(lv.status == "sampled" for lv in levels):
        notes.append("sampled levels report the maximum over a sample only")
    return FrequencyProfile(levels, notes)


@dataclass
class SWPResult:
    ok: bool
    checked: int
    first_violation: int | None = None
    detail: str | None = None

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checked": self.checked,
                "first_violation": self.first_violation, "detail": self.detail}


def check_swp(profile: FrequencyProfile, deltas: Sequence) -> SWPResult:
    """``f_n < delta_n`` for every level with both a profile entry and a delta."""
    n_max = min(len(profile.levels), len(deltas))
    for n in range(n_max):
        f, d = profile.levels[n].f, Fraction(deltas[n])
        if not f < d:
            return SWPResult(False, n + 1, n, f"f_{n} = {fraction_str(f)} >= {fraction_str(d)}")
    return SWPResult(True, n_max)


# -- measure bounds ------------------------------------------------------------


@dataclass
class BoundReport:
    n: int
    M: int
    lower: Fraction  # 1 / K_{n+1}
    upper: Fraction  # f_n / K_n
    checked: int
    violations: list[dict]
    separation: list[dict] | None = None  # None when no deltas were given
    sampled: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations and not self.separation

    def to_dict(self) -> dict:
        return {"n": self.n, "M": self.M, "lower": fraction_str(self.lower),
                "upper": fraction_str(self.upper), "checked": self.checked, "ok": self.ok,
                "violations": self.violations, "separation": self.separation,
                "sampled": self.sampled}


def measure_bound_check(seq: ConstructionSequence, n: int, M: int, deltas: Sequence | None = None,
                        *, sample: int = 64, seed: int = 0) -> BoundReport:
    """Per-position rate ``count(w, w') / K_M`` of each level-n word in level-M words.

    Checks ``1/K_{n+1} <= rate <= f_n/K_n``. With ``deltas`` and ``M >= n+2`` also
    checks ``rate(v) < delta_{n+1}/K_{n+1} < rate(w)`` for level-(n+1) ``v``.
    """
    if not M > n:
        raise ValueError(f"M = {M} must exceed n = {n}")
    f_n = level_frequency(seq, n, sample=sample, seed=seed).f
    lower, upper = Fraction(1, seq.K(n + 1)), f_n / seq.K(n)
    rng = random.Random(seed)
    status, rows = _pair_freqs(seq, n, M, rng, sample)
    rows = list(rows)
    violations = []
    for j, counts in rows:
        for i in range(seq.word_count(n)):
            rate = Fraction(counts.get(i, 0), seq.K(M))
            if not lower <= rate <= upper:
                violations.append({"w": str(WordId(n, i)), "in": str(WordId(M, j)),
                                   "rate": fraction_str(rate),
                                   "bound": "lower" if rate < lower else "upper"})
    separation = None
    if deltas is not None and M >= n + 2 and len(deltas) > n + 1:
        cut = Fraction(deltas[n + 1]) / seq.K(n + 1)
        separation = []
        for j, counts in rows:
            up = block_counts(seq, n + 1, WordId(M, j))
            for v in range(seq.word_count(n + 1)):
                rate = Fraction(up.get(v, 0), seq.K(M))
                if not rate < cut:
                    separation.append({"v": str(WordId(n + 1, v)), "in": str(WordId(M, j)),
                                       "rate": fraction_str(rate), "cut": fraction_str(cut)})
            for i in range(seq.word_count(n)):
                rate = Fraction(counts.get(i, 0), seq.K(M))
                if not cut < rate:
                    separation.append({"w": str(WordId(n, i)), "in": str(WordId(M, j)),
                                       "rate": fraction_str(rate), "cut": fraction_str(cut)})
    return BoundReport(n, M, lower, upper, len(rows), violations, separation, status == "sampled")


# -- thinning ------------------------------------------------------------------


def greedy_picks(bounds: Sequence, deltas: Sequence) -> tuple[list[int], str | None]:
    """``n_0 = 0``, ``n_{k+1}`` = least ``n > n_k`` with ``b_n < delta_k``."""
    picks = [0]
    for k, d in enumerate(deltas):
        d = Fraction(d)
        nxt = next((n for n in range(picks[-1] + 1, len(bounds)) if Fraction(bounds[n]) < d), None)
        if nxt is None:
            return picks, (f"round {k}: no level n in ({picks[-1]}, {len(bounds) - 1}] has "
                           f"b_n < {fraction_str(d)}; more levels are required")
        picks.append(nxt)
    return picks, None


@dataclass
class ThinningResult:
    picks: list[int]
    deltas: list[Fraction]
    bounds: list[Fraction]
    achieved: list[Fraction]  # achieved[k] = f'_{k+1}, the round-k target is deltas[k]
    base: Fraction | None  # f'_0: level n_0 words inside level n_1 words
    coeffs: CoefficientSequence | None
    thinned: ConstructionSequence | None
    diagnostic: str | None = None

    @property
    def ok(self) -> bool:
        return (self.diagnostic is None
                and all(a < d for a, d in zip(self.achieved, self.deltas)))

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "picks": self.picks,
            "deltas": [fraction_str(d) for d in self.deltas],
            "bounds": [fraction_str(b) for b in self.bounds],
            "achieved": [fraction_str(a) for a in self.achieved],
            "base": fraction_str(self.base) if self.base is not None else None,
            "coeffs": [str(k) for k in self.coeffs.coeffs] if self.coeffs else None,
            "diagnostic": self.diagnostic,
        }


def _recompose(seq, lo, hi, index):
    """Constituents of level-``hi`` word ``index`` written as level-``lo`` indices."""
    vec = (index,)
    for level in range(hi, lo, -1):
        vec = tuple(c for i in vec for c in seq.constituents(level, i))
    return vec


def thin_sequence(seq: ConstructionSequence, picks: Sequence[int]) -> ConstructionSequence:
    """Keep only the levels in ``picks`` (which must start at 0)."""
    if not picks or picks[0] != 0:
        raise ValueError("picks must start at level 0")
    coeffs = regroup(seq.coeffs, picks[1:]) if len(picks) > 1 else CoefficientSequence(())
    levels = []
    for lo, hi in zip(picks, picks[1:]):
        width = seq.K(hi) // seq.K(lo)
        if width > MAX_THINNED_WIDTH or not seq.is_materialized(hi):
            raise ValueError(f"level {hi} over {lo} is too wide or not materialized")
        levels.append(tuple(_recompose(seq, lo, hi, i) for i in range(seq.word_count(hi))))
    return ConstructionSequence(seq.alphabet, coeffs, tuple(levels))


def thin(seq: ConstructionSequence, deltas: Sequence, bounds: Sequence | None = None, *,
         sample: int = 64, seed: int = 0) -> ThinningResult:
    """Winning strategy for the selection game: greedy level picks, then recomputed frequencies.

    ``bounds`` defaults to the frequency profile ``f_n``.
    """
    deltas = [Fraction(d) for d in deltas]
    if bounds is None:
        bounds = frequency_profile(seq, sample=sample, seed=seed).f
    bounds = [Fraction(b) for b in bounds]
    picks, diagnostic = greedy_picks(bounds, deltas)
    freqs = [level_frequency(seq, lo, hi, sample=sample, seed=seed).f
             for lo, hi in zip(picks, picks[1:]) if hi <= seq.top_level]
    base, achieved = (freqs[0], freqs[1:]) if freqs else (None, [])
    coeffs = regroup(seq.coeffs, picks[1:]) if len(picks) > 1 else None
    try:
        thinned = thin_sequence(seq, picks)
    except ValueError:
        thinned = None
    return ThinningResult(picks, deltas[:len(picks) - 1], bounds, achieved, base, coeffs,
                          thinned, diagnostic)


# -- inheritance ---------------------------------------------------------------


@dataclass
class InheritanceRow:
    level: int
    f_aug: Fraction
    f_base: Fraction

    @property
    def ok(self) -> bool:
        return self.f_aug <= self.f_base


def inheritance_check(aug: ConstructionSequence, base: ConstructionSequence,
                      levels: int | None = None) -> list[InheritanceRow]:
    """Frequencies of a paired sequence never exceed those of the sequence it pairs with."""
    top = min(aug.top_level, base.top_level) if levels is None else levels
    return [InheritanceRow(n, level_frequency(aug, n).f, level_frequency(base, n).f)
            for n in range(top)]
