import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from odoseq.builders import (PowerCoefficient, build_alternating_complement, build_small_fingers,
                             build_two_word, check_tower_budget, minimal_admissible, paint_levels,
                             rank_permutation, small_fingers_coeffs, unrank_permutation)
from odoseq.words import WordId, expand, validate


@given(st.integers(1, 7), st.data())
def test_permutation_rank_roundtrip(n, data):
    r = data.draw(st.integers(0, math.factorial(n) - 1))
    perm = unrank_permutation(r, n)
    assert sorted(perm) == list(range(n))
    assert rank_permutation(perm) == r


def test_unrank_is_lexicographic():
    from itertools import permutations
    assert [unrank_permutation(r, 4) for r in range(24)] == list(permutations(range(4)))


def test_two_word_words():
    seq = build_two_word((10, 11))
    assert expand(seq, WordId(1, 0)) == "aaabbbabab"
    assert expand(seq, WordId(1, 1)) == "bbbaaaabab"
    # odd k ends on a_n
    assert seq.constituents(2, 0)[-1] == 0


def test_two_word_needs_ten():
    with pytest.raises(ValueError, match="k_1"):
        build_two_word((10, 9))


def test_alternating_k_table():
    seq = build_alternating_complement(3)
    assert [seq.K(n) for n in range(4)] == [1, 2, 8, 128]
    assert expand(seq, WordId(2, 0)) == "01011010"


def test_alternating_is_not_uniquely_readable():
    # 01 sits across the boundary of 10.10, so the readability clause fails
    rep = validate(build_alternating_complement(2))
    assert not rep.levels[1].uniquely_readable


def test_small_fingers_counts():
    seq = build_small_fingers(small_fingers_coeffs(12, 3))
    assert [seq.word_count(n) for n in range(4)] == [3, 5, 119, math.factorial(119) - 1]
    assert seq.is_materialized(2) and not seq.is_materialized(3)
    # lazy level addressed by rank
    vec = seq.constituents(3, seq.word_count(3) - 1)
    assert len(vec) == seq.coeffs[2]


def test_small_fingers_multiplicities_match_tables():
    seq = build_small_fingers(small_fingers_coeffs(12, 3))
    gen = seq.generator
    for n in (0, 1):
        for j in range(seq.word_count(n + 1)):
            assert dict(Counter(seq.constituents(n + 1, j))) == gen.multiplicities(n)


def test_small_fingers_growth_violation_names_index():
    with pytest.raises(ValueError, match="index 1"):
        build_small_fingers((12, 100))


def test_small_fingers_validates():
    rep = validate(build_small_fingers(small_fingers_coeffs(12, 3)))
    assert rep.ok and rep.minimal


def test_tower_budget_chain_minimal():
    b = check_tower_budget(2, minimal_admissible(3), 3)
    assert b.ok
    assert all(lv.bound_ok for lv in b.levels)
    assert b.total_upper < Fraction(1, 4)


def test_tower_budget_stated_only_gives_weak_bound():
    b = check_tower_budget(2, minimal_admissible(3, "stated"), 3)
    assert b.first_failure == 1
    assert all(lv.weak_bound_ok for lv in b.levels)


def test_tower_budget_undersized_index():
    ks = minimal_admissible(3)
    ks[1] = PowerCoefficient(4 * 10**2, 1)
    assert check_tower_budget(2, ks, 3).first_failure == 2


def test_tower_budget_exact_level_one():
    # K_0 = 1 so mu(D_1) = 4 a / k_0
    b = check_tower_budget(2, [801, 10**9, 10**9], 1)
    assert b.levels[0].measure == Fraction(8, 801)
    assert b.levels[0].bound_ok


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 512), st.integers(0, 100))
def test_painting_places_each_word_twice(size, slack):
    inv = [format(i, "010b").replace("0", "a").replace("1", "b") for i in range(size)]
    plan = paint_levels(inv, 1, 2, 10**6, capacity=2 * size + slack)
    rows = plan.rows()
    recount = Counter(rows[i:i + 10] for i in range(0, len(rows), 10))
    assert all(recount[w] >= 2 for w in inv)


def test_painting_shortfall():
    with pytest.raises(ValueError, match="needs 6 blocks, only 5"):
        paint_levels(["ab", "ba", "aa"], 1, 2, 100, capacity=5)


def test_painting_strict_capacity():
    plan = paint_levels(["ab", "ba"], 1, 2, 100)
    assert plan.capacity == 16 and plan.d == 32
