"""Construction sequences stored compositionally, plus validation and counting.

Level ``n >= 1`` words are index vectors of length ``k_{n-1}`` into the
level ``n-1`` table; level 0 is the alphabet. Symbol strings are only
produced on request and never beyond an explicit length cap.
"""
from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator, Sequence

from .odometer import CoefficientSequence

DEFAULT_CAP = 10**6

Level = tuple[tuple[int, ...], ...]


class ExpansionCapError(ValueError):
    """A requested expansion is longer than the allowed cap."""


@dataclass(frozen=True, order=True)
class WordId:
    level: int
    index: int

    def __str__(self):
        return f"{self.level}:{self.index}"

    @classmethod
    def parse(cls, text: str) -> "WordId":
        """Accepts ``"n:i"`` or ``"a_n"`` (letter = index, ``a`` is 0)."""
        text = text.strip()
        if ":" in text:
            n, i = text.split(":", 1)
            return cls(int(n), int(i))
        if "_" in text:
            letter, n = text.split("_", 1)
            if len(letter) == 1 and letter.isalpha():
                return cls(int(n), ord(letter.lower()) - ord("a"))
        raise ValueError(f"cannot parse word id {text!r}")


@dataclass(frozen=True, eq=False)
class ConstructionSequence:
    alphabet: tuple[str, ...]
    coeffs: CoefficientSequence
    levels: tuple[Level, ...] = ()
    # Lazily addressed levels beyond ``levels``; see builders for the protocol.
    generator: Any = None
    _memo: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        alphabet = tuple(str(s) for s in self.alphabet)
        if not alphabet:
            raise ValueError("alphabet is empty")
        if len(set(alphabet)) != len(alphabet):
            raise ValueError("alphabet has duplicate symbols")
        coeffs = self.coeffs
        if not isinstance(coeffs, CoefficientSequence):
            coeffs = CoefficientSequence(tuple(coeffs))
        levels = tuple(tuple(tuple(int(i) for i in w) for w in lvl) for lvl in self.levels)
        if len(levels) > coeffs.depth:
            raise ValueError(f"{len(levels)} levels need {len(levels)} coefficients, got {coeffs.depth}")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "levels", levels)

    @property
    def top_level(self) -> int:
        if self.generator is not None:
            return max(len(self.levels), self.generator.top_level)
        return len(self.levels)

    def K(self, n: int) -> int:
        return self.coeffs.partials[n]

    def is_materialized(self, n: int) -> bool:
        return n <= len(self.levels)

    def word_count(self, n: int) -> int:
        if n == 0:
            return len(self.alphabet)
        if n <= len(self.levels):
            return len(self.levels[n - 1])
        if self.generator is not None and n <= self.generator.top_level:
            return self.generator.word_count(n)
        raise IndexError(f"level {n} is not available (top level {self.top_level})")

    def constituents(self, n: int, index: int) -> tuple[int, ...]:
        if n < 1:
            raise IndexError("level 0 words are single symbols")
        if n <= len(self.levels):
            return self.levels[n - 1][index]
        if self.generator is not None and n <= self.generator.top_level:
            if not 0 <= index < self.generator.word_count(n):
                raise IndexError(f"word {index} outside level {n}")
            return self.generator.constituents(n, index)
        raise IndexError(f"level {n} is not available (top level {self.top_level})")

    def word_ids(self, n: int) -> Iterator[WordId]:
        for i in range(self.word_count(n)):
            yield WordId(n, i)

    # -- JSON interchange -------------------------------------------------

    def to_dict(self) -> dict:
        out = {
            "alphabet": list(self.alphabet),
            "coeffs": [_json_int(k) for k in self.coeffs.coeffs],
            "levels": [{"words": [list(w) for w in lvl]} for lvl in self.levels],
        }
        if self.generator is not None:
            out["generator"] = {"name": self.generator.name, "params": self.generator.params}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"), ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> "ConstructionSequence":
        try:
            alphabet = data["alphabet"]
            coeffs = [_read_int(k) for k in data["coeffs"]]
            levels = []
            for lvl in data.get("levels", []):
                words = lvl["words"]
                for w in words:
                    if not all(isinstance(i, int) and not isinstance(i, bool) for i in w):
                        raise ValueError("word entries must be integers")
                levels.append(words)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed construction sequence: {exc}") from exc
        generator = None
        if data.get("generator") is not None:
            from .builders import generator_from_descriptor

            generator = generator_from_descriptor(data["generator"])
        return cls(tuple(alphabet), CoefficientSequence(tuple(coeffs)), tuple(levels), generator)

    @classmethod
    def from_json(cls, text: str) -> "ConstructionSequence":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ValueError("top-level JSON value must be an object")
        return cls.from_dict(data)


def _json_int(k: int):
    return k if abs(k) < 2**53 else str(k)


def _read_int(k) -> int:
    if isinstance(k, bool):
        raise ValueError("booleans are not integers")
    if isinstance(k, int):
        return k
    if isinstance(k, str) and k.lstrip("-").isdigit():
        return int(k)
    raise ValueError(f"expected an integer, got {k!r}")


# -- expansion -------------------------------------------------------------


def expand_codes(seq: ConstructionSequence, n: int, index: int, cap: int = DEFAULT_CAP) -> str:
    """Expansion as a string with one character per symbol, ``chr(symbol index)``."""
    length = seq.K(n)
    if length > cap:
        raise ExpansionCapError(f"level {n} words have length {length} > cap {cap}")
    key = ("codes", n, index)
    hit = seq._memo.get(key)
    if hit is not None:
        return hit
    if n == 0:
        if not 0 <= index < len(seq.alphabet):
            raise IndexError(f"symbol {index} outside alphabet")
        out = chr(index)
    else:
        out = "".join(expand_codes(seq, n - 1, c, cap) for c in seq.constituents(n, index))
    if seq.is_materialized(n):
        seq._memo[key] = out
    return out


def decode(seq: ConstructionSequence, codes: str) -> str:
    return "".join(seq.alphabet[ord(ch)] for ch in codes)


def expand(seq: ConstructionSequence, w: WordId, cap: int = DEFAULT_CAP) -> str:
    return decode(seq, expand_codes(seq, w.level, w.index, cap))


# -- unique readability -----------------------------------------------------


def misaligned_occurrence(words: Sequence[Sequence]) -> tuple[int, int, int, int] | None:
    """Search ``w`` inside ``u + v`` at offsets strictly between 0 and the word length.

    All words must share one length. Returns ``(u, v, w, offset)`` for the
    first hit in offset order, or None when the collection is uniquely readable.
    """
    if not words:
        return None
    length = len(words[0])
    for o in range(1, length):
        suffixes: dict = {}
        prefixes: dict = {}
        for i, u in enumerate(words):
            suffixes.setdefault(u[o:], i)
            prefixes.setdefault(u[:o], i)
        for wi, w in enumerate(words):
            ui = suffixes.get(w[: length - o])
            if ui is None:
                continue
            vi = prefixes.get(w[length - o:])
            if vi is not None:
                return ui, vi, wi, o
    return None


def _find_all(hay: str, needle: str) -> Iterator[int]:
    start = hay.find(needle)
    while start != -1:
        yield start
        start = hay.find(needle, start + 1)


def count_subword(hay: str, needle: str) -> int:
    """Occurrences at every offset, overlapping ones included."""
    return sum(1 for _ in _find_all(hay, needle))


# -- validation -------------------------------------------------------------


@dataclass
class LevelReport:
    level: int
    word_count: int
    lengths_ok: bool = True
    distinct: bool = True
    uniquely_readable: bool = True
    # Clauses relating this level to the next one; None at the top level.
    clause3: bool | None = None
    minimal: bool | None = None
    odometer_based: bool = True
    spacer_fraction: Fraction = Fraction(0)
    method: str = "exact"

    @property
    def ok(self) -> bool:
        return (self.lengths_ok and self.distinct and self.uniquely_readable
                and self.clause3 is not False and self.odometer_based)

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "word_count": _json_int(self.word_count),
            "lengths_ok": self.lengths_ok,
            "distinct": self.distinct,
            "uniquely_readable": self.uniquely_readable,
            "clause3": self.clause3,
            "minimal": self.minimal,
            "odometer_based": self.odometer_based,
            "spacer_fraction": fraction_str(self.spacer_fraction),
            "method": self.method,
        }


@dataclass
class ValidationReport:
    alphabet_ok: bool
    levels: list[LevelReport]
    witnesses: list[dict]
    sampled: bool = False

    @property
    def ok(self) -> bool:
        """Clauses 1-3 and odometer-based containment; minimality is reported separately."""
        return self.alphabet_ok and all(lv.ok for lv in self.levels)

    @property
    def minimal(self) -> bool:
        return all(lv.minimal is not False for lv in self.levels)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "minimal": self.minimal,
            "sampled": self.sampled,
            "alphabet_ok": self.alphabet_ok,
            "levels": [lv.to_dict() for lv in self.levels],
            "witnesses": self.witnesses,
        }


def fraction_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _sample_indices(count: int, limit: int, rng: random.Random) -> list[int]:
    if count <= limit:
        return list(range(count))
    picks = {0, count - 1}
    while len(picks) < limit:
        picks.add(rng.randrange(count))
    return sorted(picks)


def validate(seq: ConstructionSequence, level_cap: int | None = None, *,
             cap: int = DEFAULT_CAP, sample: int = 64, seed: int = 0) -> ValidationReport:
    """Check the construction-sequence clauses level by level.

    Materialized levels are checked exhaustively. Unique readability of level
    ``n`` is checked on block vectors when level ``n-1`` passed (a misaligned
    symbol occurrence would otherwise contradict readability one level down),
    and on symbol expansions otherwise. Lazily addressed levels are sampled.
    """
    rng = random.Random(seed)
    top = seq.top_level if level_cap is None else min(level_cap, seq.top_level)
    witnesses: list[dict] = []
    sampled = False
    alphabet_ok = len(seq.alphabet) > 0 and len(set(seq.alphabet)) == len(seq.alphabet)

    reports = [LevelReport(0, len(seq.alphabet))]
    structural_ok = {0: True}
    for n in range(1, top + 1):
        count = seq.word_count(n)
        rep = LevelReport(n, count)
        reports.append(rep)
        k = seq.coeffs[n - 1]
        below = seq.word_count(n - 1)
        if seq.is_materialized(n):
            indices = range(count)
        else:
            indices = _sample_indices(count, sample, rng)
            rep.method = "sampled"
            sampled = True
        vectors = {}
        for i in indices:
            vec = seq.constituents(n, i)
            vectors[i] = vec
            if len(vec) != k:
                rep.lengths_ok = False
                witnesses.append({"clause": "length", "level": n, "word": i,
                                  "expected": _json_int(k), "got": len(vec)})
            elif any(not 0 <= c < below for c in vec):
                rep.odometer_based = False
                witnesses.append({"clause": "containment", "level": n, "word": i,
                                  "detail": f"index outside level {n - 1} table"})
        structural_ok[n] = rep.lengths_ok and rep.odometer_based
        if not structural_ok[n]:
            rep.uniquely_readable = False
            continue
        seen: dict = {}
        for i, vec in vectors.items():
            if vec in seen:
                rep.distinct = False
                witnesses.append({"clause": "distinct", "level": n, "words": [seen[vec], i]})
            else:
                seen[vec] = i
        _check_readability(seq, n, vectors, reports, rep, witnesses, cap, rng, sample)
        sampled = sampled or rep.method == "sampled"

    for n in range(0, top):
        _check_occurrence(seq, n, reports, witnesses, structural_ok, cap)

    return ValidationReport(alphabet_ok, reports, witnesses, sampled)


def _check_readability(seq, n, vectors, reports, rep, witnesses, cap, rng, sample):
    below_ok = reports[n - 1].uniquely_readable and reports[n - 1].distinct
    scale = seq.K(n - 1)
    if rep.method == "exact" and below_ok:
        order = sorted(vectors)
        hit = misaligned_occurrence([vectors[i] for i in order])
        if hit is not None:
            u, v, w, o = (order[hit[0]], order[hit[1]], order[hit[2]], hit[3])
            rep.uniquely_readable = False
            witnesses.append(_ur_witness(seq, n, u, v, w, o * scale, cap))
        return
    if rep.method == "exact" and 2 * seq.K(n) <= cap and len(vectors) ** 3 * seq.K(n) <= 5 * 10**8:
        rep.method = "exact-symbols"
        codes = {i: expand_codes(seq, n, i, cap) for i in vectors}
        for u in vectors:
            for v in vectors:
                hay = codes[u] + codes[v]
                for w in vectors:
                    for pos in _find_all(hay, codes[w]):
                        if 0 < pos < seq.K(n):
                            rep.uniquely_readable = False
                            witnesses.append(_ur_witness(seq, n, u, v, w, pos, cap))
                            return
        return
    # sampled: random triples, block level when the level below reads uniquely
    rep.method = "sampled"
    ids = sorted(vectors)
    trials = max(sample, 1)
    for _ in range(trials):
        u, v, w = (rng.choice(ids) for _ in range(3))
        if below_ok:
            hay = "".join(map(chr, vectors[u] + vectors[v]))
            needle = "".join(map(chr, vectors[w]))
            step = scale
            limit = len(vectors[u])
        elif 2 * seq.K(n) <= cap:
            hay = expand_codes(seq, n, u, cap) + expand_codes(seq, n, v, cap)
            needle = expand_codes(seq, n, w, cap)
            step = 1
            limit = seq.K(n)
        else:
            continue
        for pos in _find_all(hay, needle):
            if 0 < pos < limit:
                rep.uniquely_readable = False
                witnesses.append(_ur_witness(seq, n, u, v, w, pos * step, cap))
                return


def _ur_witness(seq, n, u, v, w, offset, cap):
    out = {"clause": "unique_readability", "level": n, "word": w, "inside": [u, v], "offset": offset}
    if 2 * seq.K(n) <= min(cap, 200):
        out["text"] = (f"{expand(seq, WordId(n, w))} occurs at offset {offset} in "
                       f"{expand(seq, WordId(n, u))}.{expand(seq, WordId(n, v))}")
    return out


def _check_occurrence(seq, n, reports, witnesses, structural_ok, cap):
    """Clause 3 and minimality between levels n and n+1."""
    rep = reports[n]
    if not (structural_ok.get(n + 1) and structural_ok.get(n, True)):
        rep.clause3 = False
        rep.minimal = False
        return
    count = seq.word_count(n)
    if seq.is_materialized(n + 1):
        ids = range(seq.word_count(n + 1))
    else:
        ids = _sample_indices(seq.word_count(n + 1), 64, random.Random(n))
        rep.method = "sampled" if rep.method == "exact" else rep.method
    aligned = rep.uniquely_readable and rep.distinct
    rep.clause3 = True
    rep.minimal = True
    for j in ids:
        if aligned:
            counts = Counter(seq.constituents(n + 1, j))
            get = lambda i: counts.get(i, 0)  # noqa: E731
        else:
            hay = expand_codes(seq, n + 1, j, cap)
            get = lambda i: count_subword(hay, expand_codes(seq, n, i, cap))  # noqa: E731
        for i in range(count):
            c = get(i)
            if c == 0 and rep.clause3:
                rep.clause3 = False
                witnesses.append({"clause": "clause3", "level": n, "word": i, "missing_from": j})
            if c < 2 and rep.minimal:
                rep.minimal = False
                witnesses.append({"clause": "minimality", "level": n, "word": i,
                                  "in": j, "occurrences": c})


# -- counting ----------------------------------------------------------------


def block_counts(seq: ConstructionSequence, n: int, w2: WordId) -> Counter:
    """Aligned multiplicities of every level-n word inside ``w2``, from index tables only."""
    m = w2.level
    if m <= n:
        raise ValueError(f"need a higher level word, got level {m} over level {n}")
    memo = seq._memo.setdefault(("blocks", n), {})

    def rec(level, index):
        key = (level, index)
        hit = memo.get(key)
        if hit is not None:
            return hit
        vec = seq.constituents(level, index)
        if level == n + 1:
            out = Counter(vec)
        else:
            out = Counter()
            for c, mult in Counter(vec).items():
                for i, v in rec(level - 1, c).items():
                    out[i] += v * mult
        if seq.is_materialized(level):
            memo[key] = out
        return out

    return rec(m, w2.index)


def occurrences(seq: ConstructionSequence, w: WordId, w2: WordId, mode: str = "aligned",
                cap: int = DEFAULT_CAP) -> int:
    if w2.level <= w.level:
        raise ValueError("the containing word must sit at a higher level")
    if mode == "aligned":
        return block_counts(seq, w.level, w2).get(w.index, 0)
    if mode == "subword":
        return count_subword(expand_codes(seq, w2.level, w2.index, cap),
                             expand_codes(seq, w.level, w.index, cap))
    raise ValueError(f"unknown mode {mode!r}")


def freq(seq: ConstructionSequence, w: WordId, w2: WordId, mode: str = "aligned",
         cap: int = DEFAULT_CAP) -> Fraction:
    """Occurrences of ``w`` in ``w2`` divided by ``K_m / K_n``."""
    blocks = seq.K(w2.level) // seq.K(w.level)
    return Fraction(occurrences(seq, w, w2, mode, cap), blocks)
