"""Toeplitz sequences given by staged periodic fills, and their augmentation."""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .odometer import CoefficientSequence
from .words import ConstructionSequence, fraction_str


class UnfilledPosition(ValueError):
    def __init__(self, position: int, stages: int):
        super().__init__(f"position {position} is not filled by any of the {stages} stages")
        self.position = position


@dataclass(frozen=True)
class Stage:
    period: int
    fill: Mapping[int, str]


@dataclass(frozen=True)
class ToeplitzSpec:
    """Stage ``m`` assigns symbols to residues mod ``P_m``; later stages only add.

    A residue may be repeated at a later stage (lifted) as long as the symbol agrees.
    """

    alphabet: tuple[str, ...]
    stages: tuple[Stage, ...]

    def __post_init__(self):
        alphabet = tuple(self.alphabet)
        stages = tuple(Stage(int(s.period), {int(r): str(v) for r, v in s.fill.items()})
                       for s in self.stages)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "stages", stages)
        prev = 1
        for m, st in enumerate(stages):
            if st.period < 1:
                raise ValueError(f"stage {m}: period {st.period} must be positive")
            if st.period % prev:
                raise ValueError(f"stage {m}: period {st.period} is not a multiple of {prev}")
            prev = st.period
            for r, sym in st.fill.items():
                if not 0 <= r < st.period:
                    raise ValueError(f"stage {m}: residue {r} outside [0, {st.period})")
                if sym not in alphabet:
                    raise ValueError(f"stage {m}: symbol {sym!r} not in the alphabet")
                earlier = self._lookup(r, m)
                if earlier is not None and earlier[1] != sym:
                    raise ValueError(f"stage {m}: residue {r} refills {earlier[1]!r} with {sym!r}")

    def _lookup(self, k: int, stop: int | None = None) -> tuple[int, str] | None:
        """(stage, symbol) of the first stage filling position ``k``."""
        for m, st in enumerate(self.stages[:stop]):
            sym = st.fill.get(k % st.period)
            if sym is not None:
                return m, sym
        return None

    def stage_of(self, k: int) -> int | None:
        hit = self._lookup(k)
        return None if hit is None else hit[0]

    @property
    def periods(self) -> tuple[int, ...]:
        return tuple(st.period for st in self.stages)

    def to_dict(self) -> dict:
        return {
            "alphabet": list(self.alphabet),
            "stages": [{"period": st.period, "fill": {str(r): st.fill[r] for r in sorted(st.fill)}}
                       for st in self.stages],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ToeplitzSpec":
        try:
            stages = []
            for st in data["stages"]:
                fill = {}
                for r, v in st["fill"].items():
                    if not str(r).isdigit():
                        raise ValueError(f"residue key {r!r} is not a decimal string")
                    fill[int(r)] = v
                stages.append(Stage(int(st["period"]), fill))
            return cls(tuple(data["alphabet"]), tuple(stages))
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValueError(f"malformed Toeplitz spec: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "ToeplitzSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ValueError("top-level JSON value must be an object")
        return cls.from_dict(data)


def dyadic_spec(stages: int = 16, symbols: tuple[str, str] = ("a", "b")) -> ToeplitzSpec:
    """Stage ``m`` (from 1) fills residue ``2^(m-1) - 1`` mod ``2^m``, alternating symbols."""
    out = []
    for m in range(1, stages + 1):
        out.append(Stage(2 ** m, {2 ** (m - 1) - 1: symbols[(m - 1) % 2]}))
    return ToeplitzSpec(symbols, tuple(out))


def _stage_array(spec: ToeplitzSpec, lo: int, hi: int) -> np.ndarray:
    """Index of the filling stage for each position in [lo, hi), -1 where unfilled."""
    stage = np.full(hi - lo, -1, dtype=np.int64)
    pos = np.arange(lo, hi, dtype=np.int64)
    for m, st in enumerate(spec.stages):
        todo = stage < 0
        if not todo.any():
            break
        res = pos % st.period
        hit = todo & np.isin(res, np.fromiter(st.fill, dtype=np.int64, count=len(st.fill)))
        stage[hit] = m
    return stage


def toeplitz_window(spec: ToeplitzSpec, lo: int, hi: int) -> str:
    if hi < lo:
        raise ValueError("empty or reversed range")
    stage = _stage_array(spec, lo, hi)
    missing = np.flatnonzero(stage < 0)
    if missing.size:
        raise UnfilledPosition(lo + int(missing[0]), len(spec.stages))
    out = []
    for k, m in zip(range(lo, hi), stage.tolist()):
        st = spec.stages[m]
        out.append(st.fill[k % st.period])
    return "".join(out)


def per_set(spec: ToeplitzSpec, p: int, lo: int, hi: int, mode: str = "exact") -> set[int]:
    """Positions in [lo, hi) that are p-periodic.

    ``exact``: forced by a stage whose period divides ``p``.
    ``empirical``: ``x(k + mp) = x(k)`` for every ``m`` keeping the index in the window.
    """
    if p < 1:
        raise ValueError("p must be positive")
    if mode == "exact":
        stage = _stage_array(spec, lo, hi)
        ok = [m for m, st in enumerate(spec.stages) if p % st.period == 0]
        mask = np.isin(stage, np.array(ok, dtype=np.int64)) if ok else np.zeros(hi - lo, bool)
        return {lo + int(i) for i in np.flatnonzero(mask)}
    if mode == "empirical":
        x = toeplitz_window(spec, lo, hi)
        out = set()
        for r in range(min(p, hi - lo)):
            chain = x[r::p]
            if chain.count(chain[0]) == len(chain):
                out.update(range(lo + r, hi, p))
        return out
    raise ValueError(f"unknown mode {mode!r}")


# -- essential periods -------------------------------------------------------


def aligned_blocks(x: str, length: int, end: int) -> Counter:
    return Counter(x[i:i + length] for i in range(0, end - length + 1, length))


@dataclass
class PeriodEvidence:
    period: int
    stage: int | None  # None for the implicit period 1
    coverage: Fraction = Fraction(0)  # share of the window in Per_period (condition b)
    distinct_blocks: int | None = None  # aligned blocks of this length in [0, next period)
    c_ok: bool | None = None
    d_ok: bool | None = None

    def to_dict(self) -> dict:
        return {"period": self.period, "stage": self.stage, "coverage": fraction_str(self.coverage),
                "distinct_blocks": self.distinct_blocks, "c": self.c_ok, "d": self.d_ok}


@dataclass
class EssentialPeriodList:
    periods: list[int]
    evidence: list[PeriodEvidence]
    window: int  # conditions c) and d) were verified on [0, window)
    skipped: list[dict] = field(default_factory=list)
    diagnostic: str | None = None

    @property
    def complete(self) -> bool:
        return self.diagnostic is None

    def coefficients(self) -> tuple[int, ...]:
        return tuple(b // a for a, b in zip(self.periods, self.periods[1:]))

    def to_dict(self) -> dict:
        return {"periods": self.periods, "window": self.window,
                "evidence": [e.to_dict() for e in self.evidence],
                "skipped": self.skipped, "diagnostic": self.diagnostic}


def _check_cd(x: str, K: int, K_next: int) -> tuple[bool, bool, int, str | None]:
    inside = aligned_blocks(x, K, K_next)
    everywhere = aligned_blocks(x, K, len(x))
    missing = [b for b in everywhere if b not in inside]
    once = [b for b, c in inside.items() if c < 2]
    reason = None
    if missing:
        reason = f"c) block {missing[0]!r} does not occur aligned in [0, {K_next})"
    elif once:
        reason = f"d) block {once[0]!r} occurs only once in [0, {K_next})"
    return not missing, not once, len(inside), reason


def select_essential_periods(spec: ToeplitzSpec, count: int, bound: int,
                             min_ratio: int = 2) -> EssentialPeriodList:
    """Greedy choice of ``count`` periods ``1 = K_0 | K_1 | ...`` from the stage periods.

    A candidate ``K_{n+1}`` is accepted when it is at least ``min_ratio`` times
    ``K_n`` and conditions c) and d) hold for the ``K_n``-blocks.
    """
    if count <= 0:
        return EssentialPeriodList([], [], bound)
    x = toeplitz_window(spec, 0, bound)

    def evidence(K, stage):
        cov = Fraction(len(per_set(spec, K, 0, bound)), bound) if bound else Fraction(0)
        return PeriodEvidence(K, stage, cov)

    periods = [1]
    ev = [evidence(1, None)]
    skipped = []
    candidates = sorted({(st.period, m) for m, st in enumerate(spec.stages)
                         if not any(st.period == o.period for o in spec.stages[:m])})
    for P, m in candidates:
        if len(periods) >= count:
            break
        K = periods[-1]
        if P % K or P < min_ratio * K:
            continue
        if P > bound:
            break
        c_ok, d_ok, distinct, reason = _check_cd(x, K, P)
        if reason is not None:
            skipped.append({"period": P, "reason": reason})
            continue
        ev[-1].c_ok, ev[-1].d_ok, ev[-1].distinct_blocks = c_ok, d_ok, distinct
        periods.append(P)
        ev.append(evidence(P, m))
    diagnostic = None
    if len(periods) < count:
        diagnostic = (f"found {len(periods)} of {count} periods within [0, {bound}); "
                      f"a longer window or more stages is needed")
    return EssentialPeriodList(periods, ev, bound, skipped, diagnostic)


# -- augmentation -------------------------------------------------------------


def pair_symbol(s: str, t: str) -> str:
    return f"{s}:{t}"


def augment(spec: ToeplitzSpec, periods: EssentialPeriodList,
            odoseq: ConstructionSequence) -> ConstructionSequence:
    """Pair aligned blocks of the Toeplitz sequence with the words of ``odoseq``.

    Level ``n`` consists of every pair (aligned ``K_n``-block occurring in
    ``[0, K_{n+1})``, level-``n`` word of ``odoseq``); symbols are pairs of symbols.
    """
    P = periods.periods
    if len(P) < 2:
        raise ValueError("need at least two essential periods")
    coeffs = periods.coefficients()
    top = len(P) - 2  # highest level n with blocks taken from [0, K_{n+1})
    if odoseq.coeffs.depth < top or tuple(odoseq.coeffs.coeffs[:top]) != coeffs[:top]:
        raise ValueError(f"coefficients {tuple(odoseq.coeffs.coeffs[:top])} of the second "
                         f"sequence do not match the periods' {coeffs[:top]}")
    if odoseq.top_level < top:
        raise ValueError(f"second sequence has {odoseq.top_level} levels, need {top}")
    x = toeplitz_window(spec, 0, P[-1])

    tables = []  # per level: list of (block, word index)
    for n in range(top + 1):
        blocks = sorted(aligned_blocks(x, P[n], P[n + 1]))
        tables.append([(b, j) for b in blocks for j in range(odoseq.word_count(n))])
    alphabet = tuple(pair_symbol(b, odoseq.alphabet[j]) for b, j in tables[0])
    levels = []
    for n in range(1, top + 1):
        lookup = {pair: i for i, pair in enumerate(tables[n - 1])}
        K = P[n - 1]
        words = []
        for block, j in tables[n]:
            cons = odoseq.constituents(n, j)
            vec = []
            for t, c in enumerate(cons):
                key = (block[t * K:(t + 1) * K], c)
                if key not in lookup:
                    raise ValueError(f"level {n}: block {key[0]!r} missing from level {n - 1} "
                                     f"(condition c) fails)")
                vec.append(lookup[key])
            words.append(tuple(vec))
        levels.append(tuple(words))
    return ConstructionSequence(alphabet, CoefficientSequence(coeffs[:max(top, 1)]), tuple(levels))


# -- aperiodicity -------------------------------------------------------------


@dataclass
class ScanResult:
    p_max: int
    positions: tuple[int, int]
    witnesses: dict  # (k, p) -> least |b| with the sign giving x(k) != x(k + bp), as signed b
    failures: list[tuple[int, int]]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {"p_max": self.p_max, "positions": list(self.positions),
                "checked": len(self.witnesses) + len(self.failures),
                "failures": [list(f) for f in self.failures],
                "max_abs_b": max((abs(b) for b in self.witnesses.values()), default=None)}


def aperiodicity_scan(window: str, p_max: int, positions: tuple[int, int] | None = None) -> ScanResult:
    """For each ``k`` in ``positions`` and ``1 <= p <= p_max``, the least ``|b|`` with ``x(k) != x(k+bp)``.

    Ties between ``b`` and ``-b`` go to the positive one. Pairs with no witness
    inside the window are failures.
    """
    x = np.frombuffer(window.encode("utf-32-le"), dtype=np.uint32)
    L = len(x)
    lo, hi = positions if positions is not None else (0, L)
    lo, hi = max(lo, 0), min(hi, L)
    ks = np.arange(lo, hi)
    witnesses = {}
    failures = []
    for p in range(1, p_max + 1):
        if p >= L:
            break
        best = np.zeros(len(ks), dtype=np.int64)
        open_ = np.ones(len(ks), dtype=bool)
        b = 1
        while open_.any() and b * p < L:
            for sign in (1, -1):
                idx = ks + sign * b * p
                valid = (idx >= 0) & (idx < L) & open_
                if valid.any():
                    diff = np.zeros(len(ks), dtype=bool)
                    diff[valid] = x[idx[valid]] != x[ks[valid]]
                    best[diff] = sign * b
                    open_ &= ~diff
            b += 1
        for k, bb, op in zip(ks.tolist(), best.tolist(), open_.tolist()):
            if op:
                failures.append((k, p))
            else:
                witnesses[(k, p)] = bb
    return ScanResult(p_max, (lo, hi), witnesses, failures)
