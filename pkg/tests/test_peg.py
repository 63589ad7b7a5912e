import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridcover.blocks import POINT_BLOCK, Block
from gridcover.enumeration import counting_sequence
from gridcover.perms import Basis, contains
from gridcover.peg import (
    ConvexVectorSet,
    PegCoverError,
    PegPermutation,
    fill,
    is_filling,
    parse_vector,
    peg_cover_to_struct_cover,
    peg_to_rule,
    peg_to_rules,
    vector_contained,
)
from gridcover.rules import EMPTY_RULE, Rule, generated_set, is_struct_rule

EXAMPLE = PegPermutation.parse("3o1-4o2+")


def all_pegs(max_len):
    for n in range(1, max_len + 1):
        for p in itertools.permutations(range(1, n + 1)):
            for decs in itertools.product("+-o", repeat=n):
                yield PegPermutation.parse("".join(f"{a}{d}" for a, d in zip(p, decs)))


def fill_table(peg, vs, limit):
    """Vector -> fill for every vector of ``vs`` with total at most ``limit``, by trying every vector."""
    return {
        v: tuple(fill(peg, v, allow_singletons=True))
        for v in itertools.product(range(1, limit + 1), repeat=len(peg))
        if sum(v) <= limit and v in vs
    }


def brute_fills(peg, vs, limit):
    return set(fill_table(peg, vs, limit).values())


def test_parse_and_print():
    assert str(EXAMPLE) == "3o1-4o2+"
    assert PegPermutation.parse("3∘1⁻4∘2⁺") == EXAMPLE
    with pytest.raises(ValueError):
        PegPermutation.parse("3o1x")
    assert parse_vector("⟨1,3,1,2⟩") == (1, 3, 1, 2)


def test_fill_examples():
    assert fill(EXAMPLE, (1, 3, 1, 2)) == (6, 3, 2, 1, 7, 4, 5)
    assert fill(PegPermutation.parse("2o3o1o"), (1, 1, 1)) == (2, 3, 1)
    assert fill(PegPermutation.parse("1+"), (4,)) == (1, 2, 3, 4)


def test_fill_rejects_non_filling():
    assert not is_filling(EXAMPLE, (1, 1, 1, 2))
    with pytest.raises(ValueError):
        fill(EXAMPLE, (1, 1, 1, 2))
    with pytest.raises(ValueError):
        fill(EXAMPLE, (2, 3, 1, 2))
    assert fill(EXAMPLE, (1, 1, 1, 2), allow_singletons=True) == (4, 1, 5, 2, 3)


def test_vector_contained():
    assert vector_contained((1, 2, 1, 2), (1, 3, 1, 2))
    assert vector_contained((2, 2), (2, 2))
    assert not vector_contained((2, 1), (1, 2))
    with pytest.raises(ValueError):
        vector_contained((1,), (1, 2))


@st.composite
def peg_and_vectors(draw):
    n = draw(st.integers(1, 4))
    perm = draw(st.permutations(list(range(1, n + 1))))
    decs = draw(st.lists(st.sampled_from("+-o"), min_size=n, max_size=n))
    peg = PegPermutation.parse("".join(f"{a}{d}" for a, d in zip(perm, decs)))
    v = [1 if d == "o" else draw(st.integers(2, 4)) for d in decs]
    w = [1 if d == "o" else draw(st.integers(x, 4)) for d, x in zip(decs, v)]
    return peg, v, w


@settings(max_examples=200, deadline=None)
@given(peg_and_vectors())
def test_fill_monotone(data):
    peg, v, w = data
    assert contains(fill(peg, v), fill(peg, w))


def test_convex_vector_set():
    vs = ConvexVectorSet.parse("1,2..,1,2..4")
    assert (1, 5, 1, 3) in vs
    assert (1, 5, 1, 5) not in vs
    assert sorted(vs.members(6)) == [(1, 2, 1, 2)]
    assert len(list(vs.members(8))) == 3
    with pytest.raises(ValueError):
        ConvexVectorSet((3,), (2,))
    with pytest.raises(ValueError):
        ConvexVectorSet.parse("2..").check_for(PegPermutation.parse("1o"))


def test_increasing_letter_rule():
    r = peg_to_rule(PegPermutation.parse("1+"))
    assert r == Rule.from_cells({(0, 0): POINT_BLOCK, (1, 1): POINT_BLOCK, (2, 2): Block.of("21")})


def test_all_dot_rule():
    r = peg_to_rule(PegPermutation.parse("2o3o1o"))
    assert generated_set(r, 6) == {(2, 3, 1)}


def test_example_rule():
    r = peg_to_rule(EXAMPLE)
    assert (r.t, r.u) == (8, 8)
    assert (6, 3, 2, 1, 7, 4, 5) in generated_set(r, 7)


@pytest.mark.parametrize("peg", list(all_pegs(3)), ids=str)
def test_peg_rule_soundness(peg):
    r = peg_to_rule(peg)
    table = fill_table(peg, ConvexVectorSet.filling(peg), 8)
    assert generated_set(r, 8) == set(table.values())
    # griddings correspond to filling vectors, so gridding is unique exactly when
    # no two vectors fill to the same permutation (it fails for merging runs like 1+2+)
    injective = len(set(table.values())) == len(table)
    assert is_struct_rule(r, 8) == injective


@pytest.mark.parametrize("text,bounds", [("2+1-", "2..3,2.."), ("1-2o", "1..,1"), ("2+3o1+", "3..3,1,2..4")])
def test_capped_vector_sets(text, bounds):
    peg = PegPermutation.parse(text)
    vs = ConvexVectorSet.parse(bounds)
    rules = peg_to_rules(peg, vs)
    union = set()
    for r in rules:
        s = generated_set(r, 9)
        assert not (s & union)
        union |= s
    assert union == brute_fills(peg, vs, 9)


def test_cap_limit():
    with pytest.raises(ValueError):
        peg_to_rules(PegPermutation.parse("1+"), ConvexVectorSet.parse("2..9"))
    with pytest.raises(ValueError):
        peg_to_rule(PegPermutation.parse("1+"), ConvexVectorSet.parse("2..3"))


def test_decreasing_peg_cover():
    peg = PegPermutation.parse("1-")
    cover = peg_cover_to_struct_cover([(peg, ConvexVectorSet.parse("1.."))], Basis.parse("12"))
    assert cover.rules[0] == EMPTY_RULE
    assert counting_sequence(cover, 8) == [1] * 9


def test_trivial_class_cover():
    cover = peg_cover_to_struct_cover([], Basis.parse("1"))
    assert cover.rules == [EMPTY_RULE]


def test_two_peg_cover():
    # Av(132,213,231,312): increasing or decreasing, with the single point counted once
    pegs = [
        (PegPermutation.parse("1+"), ConvexVectorSet.parse("1..")),
        (PegPermutation.parse("1-"), ConvexVectorSet.parse("2..")),
    ]
    cover = peg_cover_to_struct_cover(pegs, Basis.parse("132_213_231_312"))
    assert counting_sequence(cover, 8) == [1, 1, 2, 2, 2, 2, 2, 2, 2]


def test_bad_peg_cover_reports_witness():
    pegs = [(PegPermutation.parse("1+"), ConvexVectorSet.parse("1.."))]
    with pytest.raises(PegCoverError, match="missing: 21"):
        peg_cover_to_struct_cover(pegs, Basis.parse("132_213_231_312"))
