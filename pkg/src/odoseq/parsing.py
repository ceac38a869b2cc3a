"""Hierarchical parsing of finite windows and the canonical map to the odometer."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .odometer import OdoPoint, tower_row
from .words import DEFAULT_CAP, ConstructionSequence, WordId, expand, expand_codes


class AnchorError(ValueError):
    def __init__(self, level: int, message: str):
        super().__init__(f"level {level}: {message}")
        self.level = level


@dataclass(frozen=True)
class Anchor:
    level: int
    offset: int  # r_n: position of the origin inside the principal n-subword
    word: WordId


@dataclass(frozen=True)
class AnchoredWindow:
    top: WordId
    origin: int
    anchors: tuple[Anchor, ...]  # ascending levels
    symbols: str | None = None

    def anchor(self, n: int) -> Anchor:
        for a in self.anchors:
            if a.level == n:
                return a
        raise KeyError(n)

    def to_dict(self) -> dict:
        out = {
            "top": str(self.top),
            "origin": self.origin,
            "anchors": [{"level": a.level, "r": a.offset, "word": str(a.word)} for a in self.anchors],
        }
        if self.symbols is not None:
            out["symbols"] = self.symbols
        return out


def _anchors(seq: ConstructionSequence, top: WordId, position: int) -> list[Anchor]:
    N = top.level
    if not 0 <= top.index < seq.word_count(N):
        raise ValueError(f"word {top} does not exist")
    if not 0 <= position < seq.K(N):
        raise ValueError(f"position {position} outside [0, {seq.K(N)})")
    out = [Anchor(N, position, top)]
    p, idx = position, top.index
    for n in range(N - 1, -1, -1):
        c, p = divmod(p, seq.K(n))
        idx = seq.constituents(n + 1, idx)[c]
        out.append(Anchor(n, p, WordId(n, idx)))
    return out[::-1]


def parse(seq: ConstructionSequence, top: WordId, position: int, *,
          with_symbols: bool = True, cap: int = DEFAULT_CAP) -> AnchoredWindow:
    anchors = tuple(_anchors(seq, top, position))
    symbols = expand(seq, top, cap) if with_symbols else None
    return AnchoredWindow(top, position, anchors, symbols)


def phi(seq: ConstructionSequence, top: WordId, position: int, depth: int) -> OdoPoint:
    """Digits ``c_n``: which block of the principal (n+1)-word holds the principal n-word."""
    if depth > top.level:
        raise ValueError(f"depth {depth} exceeds the level {top.level} of the top word")
    anchors = _anchors(seq, top, position)
    digits = [anchors[n + 1].offset // seq.K(n) for n in range(depth)]
    return OdoPoint(seq.coeffs.truncate(depth), tuple(digits))


def block_offsets(seq: ConstructionSequence, codes: str, depth: int, cap: int = DEFAULT_CAP) -> list[int]:
    """Recover the level-n block alignment of a symbol window by reading it.

    Offset ``a_n`` is the unique value in ``[0, K_n)`` congruent to ``a_{n-1}``
    such that every complete block starting at ``a_n + j K_n`` is a level-n word.
    """
    offsets = [0]
    for n in range(1, depth + 1):
        L = seq.K(n)
        table = {expand_codes(seq, n, i, cap) for i in range(seq.word_count(n))}
        good = []
        for a in range(offsets[-1], L, seq.K(n - 1)):
            starts = range(a, len(codes) - L + 1, L)
            if starts and all(codes[s:s + L] in table for s in starts):
                good.append(a)
        if len(good) != 1:
            raise AnchorError(n, f"{len(good)} consistent block alignments")
        offsets.append(good[0])
    return offsets


def phi_from_symbols(seq: ConstructionSequence, codes: str, position: int, depth: int,
                     offsets: Sequence[int] | None = None) -> OdoPoint:
    """``phi`` computed from symbols alone (no index tables consulted for the origin)."""
    if offsets is None:
        offsets = block_offsets(seq, codes, depth)
    starts = []
    for n in range(depth + 1):
        L = seq.K(n)
        start = offsets[n] + ((position - offsets[n]) // L) * L
        if start < 0 or start + L > len(codes):
            raise AnchorError(n, f"principal block of position {position} leaves the window")
        starts.append(start)
    digits = [(starts[n] - starts[n + 1]) // seq.K(n) for n in range(depth)]
    return OdoPoint(seq.coeffs.truncate(depth), tuple(digits))


def materialize(seq: ConstructionSequence, anchors: Sequence[tuple[int, WordId]], *,
                with_symbols: bool = True, cap: int = DEFAULT_CAP) -> AnchoredWindow:
    """The unique window with the given ``(r_n, w_n)`` for consecutive levels, lowest first."""
    if not anchors:
        raise ValueError("no anchors given")
    for (r, w), (r2, w2) in zip(anchors, anchors[1:]):
        n = w.level
        if w2.level != n + 1:
            raise AnchorError(n, "anchor levels must be consecutive")
        if not 0 <= r < seq.K(n):
            raise AnchorError(n, f"offset {r} outside [0, {seq.K(n)})")
        if r2 % seq.K(n) != r:
            raise AnchorError(n, f"offset {r2} at level {n + 1} is not congruent to {r}")
        block = seq.constituents(n + 1, w2.index)[r2 // seq.K(n)]
        if block != w.index:
            raise AnchorError(n, f"block {r2 // seq.K(n)} of {w2} is word {block}, not {w.index}")
    r_top, top = anchors[-1]
    if not 0 <= r_top < seq.K(top.level):
        raise AnchorError(top.level, f"offset {r_top} outside [0, {seq.K(top.level)})")
    return parse(seq, top, r_top, with_symbols=with_symbols, cap=cap)


TWO_WORD_THRESHOLD = 10


def psi_window(seq: ConstructionSequence, x: OdoPoint | Sequence[int], k: int = 0, *,
               with_symbols: bool = True, cap: int = DEFAULT_CAP) -> AnchoredWindow:
    """Finite-depth inverse of ``phi`` for the two-word and small-fingers builders.

    For ``k <= n < N`` the digit ``x(n)`` must point into the part of the
    level-(n+1) words that all of them share; ``w_n`` is the word there and
    ``r_n`` is the rank of ``x(0..n-1)``. The top word is the first level-N word.
    """
    if not isinstance(x, OdoPoint):
        x = OdoPoint(seq.coeffs.truncate(len(x)), tuple(x))
    N = x.coeffs.depth
    if N > seq.top_level:
        raise ValueError(f"{N} digits but the sequence has {seq.top_level} levels")
    gen = seq.generator
    name = getattr(gen, "name", None)
    if name not in ("two_word", "small_fingers"):
        raise ValueError(f"no inverse map for builder {name!r}")
    if N == 0:
        raise ValueError("need at least one digit")
    words = {}
    for n in range(k, N):
        j = x.digits[n]
        if name == "two_word":
            if j < TWO_WORD_THRESHOLD:
                raise AnchorError(n, f"digit {j} below {TWO_WORD_THRESHOLD}")
        elif j < gen.prefix_blocks(n):
            raise AnchorError(n, f"digit {j} inside the permutation prefix of {gen.prefix_blocks(n)} blocks")
        words[n] = gen.shared_block(n, j)
    words[N] = 0
    anchors = [(tower_row(x, n), WordId(n, words[n])) for n in range(k, N + 1)]
    return materialize(seq, anchors, with_symbols=with_symbols, cap=cap)
