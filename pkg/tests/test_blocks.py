import itertools

import pytest

from gridcover.blocks import (
    EMPTY_BLOCK,
    POINT_BLOCK,
    Block,
    BlockSet,
    block_set,
    build_poset,
    class_contains,
)
from gridcover.perms import Basis, avoiders, contains, subpatterns


def brute_block_bases(basis: Basis, depth: int) -> set[Basis]:
    """Every antichain of nontrivial subpatterns meeting each basis element's
    subpatterns, kept when nonempty up to ``depth``."""
    subs = [set(map(tuple, subpatterns(p))) for p in basis]
    cands = sorted(set().union(*subs) - {(), (1,)})
    out = set()
    for r in range(1, len(cands) + 1):
        for combo in itertools.combinations(cands, r):
            if any(contains(a, b) for a, b in itertools.permutations(combo, 2)):
                continue
            if not all(any(c in s for c in combo) for s in subs):
                continue
            b = Basis(combo)
            if all(avoiders(b, depth).counts):
                out.add(b)
    return out


def names(bs):
    return [b.name() for b in bs]


def test_block_set_231():
    assert names(block_set(Basis.parse("231"))) == ["eps", "point", "Av(12)", "Av(21)", "Av(231)"]


def test_block_set_12():
    assert names(block_set(Basis.parse("12"))) == ["eps", "point", "Av(12)"]


def test_block_set_finite_class():
    assert names(block_set(Basis.parse("12_21"))) == ["eps", "point"]


def test_block_set_321_2134():
    assert names(block_set(Basis.parse("321_2134"))) == ["eps", "point", "Av(21)", "Av(213,321)", "Av(321,2134)"]


@pytest.mark.parametrize("basis", ["231", "123", "132_4231", "321_2134", "123_231", "1234_3412", "132_213_231_312"])
def test_block_set_matches_brute_force(basis):
    b = Basis.parse(basis)
    bs = block_set(b)
    got = {blk.basis for blk in bs.class_blocks}
    assert got == brute_block_bases(b, b.max_length + 2)


def test_root_is_a_block():
    bs = block_set(Basis.parse("132_4231"))
    assert bs.root == Block.of("132_4231")
    assert len(bs) == 12


def test_blocks_are_infinite_to_depth():
    bs = block_set(Basis.parse("321_2134"))
    for b in bs.class_blocks:
        assert all(b.counts(bs.depth))


def test_block_parse_and_name():
    assert Block.parse("Av(132,213)").name() == "Av(132,213)"
    assert Block.parse("pt") is POINT_BLOCK or Block.parse("pt") == POINT_BLOCK
    assert Block.parse("eps") == EMPTY_BLOCK
    assert Block.of("1_12") == EMPTY_BLOCK


def test_block_json_roundtrip():
    bs = block_set(Basis.parse("231"))
    again = BlockSet.from_json(bs.to_json())
    assert again.blocks == bs.blocks
    assert again.root_basis == bs.root_basis


def test_class_contains():
    D, I, A = Block.of("12"), Block.of("21"), Block.of("231")
    assert class_contains(A, D)
    assert class_contains(A, I)
    assert not class_contains(D, I)
    assert class_contains(D, POINT_BLOCK)
    assert class_contains(D, EMPTY_BLOCK)
    assert not class_contains(POINT_BLOCK, EMPTY_BLOCK)


def test_poset_231():
    bs = block_set(Basis.parse("231"))
    poset = build_poset(bs)
    D, I, A = Block.of("12"), Block.of("21"), Block.of("231")
    assert poset.le(D, A) and poset.le(I, A)
    assert not poset.le(D, I) and not poset.le(I, D)
    assert set(poset.covers_of(D)) == {A}
    for b in bs.class_blocks:
        assert poset.le(EMPTY_BLOCK, b)
        assert poset.le(POINT_BLOCK, b)
    assert poset.maximal_elements() == [A]


def test_poset_is_a_partial_order():
    bs = block_set(Basis.parse("132_4231"))
    poset = build_poset(bs)
    for a in bs:
        assert poset.le(a, a)
        for b in bs:
            if a != b and poset.le(a, b):
                assert not poset.le(b, a)
            for c in bs:
                if poset.le(a, b) and poset.le(b, c):
                    assert poset.le(a, c)


def test_poset_matches_member_sets():
    # containment of blocks agrees with containment of their members up to a length
    bs = block_set(Basis.parse("132_4231"))
    poset = build_poset(bs)
    n = 6
    members = {b: set(p for lv in b.levels(n) for p in lv) for b in bs}
    for a in bs:
        for b in bs:
            assert poset.le(a, b) == (members[a] <= members[b])


def test_linear_extension():
    bs = block_set(Basis.parse("321_2134"))
    poset = build_poset(bs)
    order = poset.linear_extension(bs.class_blocks)
    for i, a in enumerate(order):
        for b in order[:i]:
            assert not (poset.le(a, b) and a != b)
