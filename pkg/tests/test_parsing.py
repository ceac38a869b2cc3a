import random

import pytest
from hypothesis import given, settings, strategies as st

from odoseq.builders import build_small_fingers, build_two_word, small_fingers_coeffs
from odoseq.odometer import OdoPoint, succ
from odoseq.parsing import (AnchorError, block_offsets, materialize, parse, phi, phi_from_symbols,
                            psi_window)
from odoseq.words import WordId, expand, expand_codes

SEQ = build_two_word((10, 12, 14))


def test_parse_example():
    win = parse(build_two_word((10, 12)), WordId(2, 0), 57)
    assert win.anchor(1).offset == 7
    assert win.anchor(2).offset == 57
    # block 5 of a_2 is b_1 (aaabbb: blocks 3..5 are b)
    assert win.anchor(1).word == WordId(1, 1)


def test_parse_zero():
    win = parse(SEQ, WordId(3, 1), 0)
    assert all(a.offset == 0 for a in win.anchors)
    assert win.anchor(2).word == WordId(2, 1)


def test_parse_range():
    with pytest.raises(ValueError):
        parse(SEQ, WordId(2, 0), 120)


@given(st.integers(0, 1679))
def test_anchor_invariants(pos):
    win = parse(SEQ, WordId(3, 0), pos)
    text = win.symbols
    for a in win.anchors:
        K = SEQ.K(a.level)
        assert 0 <= a.offset < K
        start = pos - a.offset
        assert text[start:start + K] == expand(SEQ, a.word)
    for lo, hi in zip(win.anchors, win.anchors[1:]):
        assert hi.offset % SEQ.K(lo.level) == lo.offset


def test_phi_example():
    assert phi(build_two_word((10, 12)), WordId(2, 0), 57, 2).digits == (7, 5)


def test_phi_equivariance_exhaustive():
    top = WordId(3, 1)
    prev = phi(SEQ, top, 0, 3)
    assert prev.digits == (0, 0, 0)
    for p in range(1, SEQ.K(3)):
        cur = phi(SEQ, top, p, 3)
        assert cur == succ(prev)[0]
        prev = cur


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 1679))
def test_phi_from_symbols_agrees(pos):
    codes = expand_codes(SEQ, 3, 0)
    assert block_offsets(SEQ, codes, 2) == [0, 0, 0]
    assert phi_from_symbols(SEQ, codes, pos, 3) == phi(SEQ, WordId(3, 0), pos, 3)


def test_phi_from_symbols_unaligned_window():
    codes = expand_codes(SEQ, 3, 0)
    window = codes[37:37 + 600]
    pos = 300
    got = phi_from_symbols(SEQ, window, pos, 1)
    assert got == phi(SEQ, WordId(3, 0), pos + 37, 1)


def test_materialize_roundtrip():
    win = parse(SEQ, WordId(3, 0), 1000)
    anchors = [(a.offset, a.word) for a in win.anchors]
    again = materialize(SEQ, anchors)
    assert again == win


def test_materialize_incompatible_names_level():
    win = parse(SEQ, WordId(3, 0), 1000)
    anchors = [(a.offset, a.word) for a in win.anchors]
    r, w = anchors[0]
    anchors[0] = (r, WordId(0, 1 - w.index))
    with pytest.raises(AnchorError) as err:
        materialize(SEQ, anchors)
    assert err.value.level == 0
    # dropping level 0 and corrupting level 1 moves the failure up
    top = anchors[1:]
    r, w = top[0]
    top[0] = (r, WordId(1, 1 - w.index))
    with pytest.raises(AnchorError) as err:
        materialize(SEQ, top)
    assert err.value.level == 1


def _random_digits(rng, coeffs, k, lo):
    return [rng.randrange(lo, c) if n >= k else rng.randrange(c) for n, c in enumerate(coeffs)]


def test_psi_phi_roundtrip_two_word():
    rng = random.Random(7)
    coeffs = SEQ.coeffs.coeffs
    for _ in range(200):
        x = _random_digits(rng, coeffs, 1, 10)
        win = psi_window(SEQ, x, 1, with_symbols=False)
        assert phi(SEQ, win.top, win.origin, 3).digits == tuple(x)


def test_psi_shared_block():
    gen = SEQ.generator
    for j in range(6, 14):
        assert SEQ.constituents(3, 0)[j] == SEQ.constituents(3, 1)[j] == gen.shared_block(2, j)


def test_psi_rejects_small_digit():
    with pytest.raises(AnchorError) as err:
        psi_window(SEQ, [3, 11, 3], 1)
    assert err.value.level == 2


def test_psi_continuity():
    a = psi_window(SEQ, [4, 11, 12], 1, with_symbols=False)
    b = psi_window(SEQ, [4, 11, 13], 1, with_symbols=False)
    # digits agree through x(1), so anchors agree through level 1 and r_2 agrees
    assert a.anchors[:2] == b.anchors[:2]
    assert a.anchor(2).offset == b.anchor(2).offset
    c = psi_window(SEQ, [5, 11, 12], 1, with_symbols=False)
    assert c.anchors[1:] != a.anchors[1:] or c.origin != a.origin


def test_psi_small_fingers_roundtrip():
    seq = build_small_fingers(small_fingers_coeffs(12, 2))
    rng = random.Random(3)
    gen = seq.generator
    for _ in range(100):
        x = [rng.randrange(gen.prefix_blocks(n), seq.coeffs[n]) for n in range(2)]
        win = psi_window(seq, OdoPoint(seq.coeffs, tuple(x)), 0, with_symbols=False)
        assert phi(seq, win.top, win.origin, 2).digits == tuple(x)
    with pytest.raises(AnchorError):
        psi_window(seq, [0, 100], 0)
