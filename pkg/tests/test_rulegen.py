import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridcover.blocks import POINT_BLOCK, Block, block_set, build_poset
from gridcover.perms import Basis
from gridcover.rulegen import (
    BudgetExceeded,
    CompatTable,
    GenConfig,
    generate_rules,
    naive_rules,
    pairwise_compat,
    rule_variants,
)
from gridcover.rules import EMPTY_RULE, Rule, generated_set, is_struct_rule, rule_avoids

P = POINT_BLOCK
A = Block.of("231")
D = Block.of("12")
I = Block.of("21")


def test_compat_examples():
    assert pairwise_compat(A, A, "ne", Basis.parse("231"), 5)
    assert not pairwise_compat(P, P, "row", Basis.parse("12"), 4)
    # decreasing cell below an increasing one avoids 132 and 312; the other way round gives 132
    assert pairwise_compat(D, I, "col", Basis.parse("132_312"), 5)
    assert not pairwise_compat(I, D, "col", Basis.parse("132_312"), 5)


def test_compat_unknown_orientation():
    with pytest.raises(ValueError):
        pairwise_compat(P, P, "diag", Basis.parse("12"), 4)


def _reverse_block(b: Block) -> Block:
    return b if not b.is_class else Block.of(b.basis.image("r"))


@pytest.mark.parametrize("basis", ["231", "132_4231", "123_231"])
def test_compat_reflection_symmetry(basis):
    b = Basis.parse(basis)
    rb = b.image("r")
    blocks = [P] + block_set(b).class_blocks
    t, rt = CompatTable(b, 5), CompatTable(rb, 5)
    for x, y in itertools.product(blocks, repeat=2):
        rx, ry = _reverse_block(x), _reverse_block(y)
        # mirroring left-right swaps the two cells of a row and the two diagonals
        assert t.compatible(x, y, "row") == rt.compatible(ry, rx, "row")
        assert t.compatible(x, y, "col") == rt.compatible(rx, ry, "col")
        assert t.compatible(x, y, "ne") == rt.compatible(ry, rx, "nw")


def test_rules_for_12():
    rules = generate_rules(Basis.parse("12"))
    strs = {str(r) for r in rules}
    assert "2x2[0/1/pt, 1/0/Av(12)]" in strs
    assert "1x1[0/0/pt]" in strs
    assert "2x2[0/1/pt, 1/0/pt]" in strs
    assert EMPTY_RULE in rules
    assert "1x1[0/0/Av(12)]" not in strs


def test_rules_for_231_include_fig1():
    rules = generate_rules(Basis.parse("231"))
    fig1 = Rule.from_cells({(0, 0): A, (1, 2): P, (2, 1): A})
    assert fig1 in rules and EMPTY_RULE in rules


@pytest.mark.parametrize("basis", ["12", "231", "123_231", "321_2134"])
def test_every_rule_is_valid(basis):
    b = Basis.parse(basis)
    cfg = GenConfig.default(b, max_width=3, max_height=3)
    for r in generate_rules(b, cfg=cfg):
        assert is_struct_rule(r, cfg.depth)
        assert rule_avoids(r, b, cfg.depth)
        assert r.is_normal()
        assert r.n_points <= cfg.depth


def test_output_is_canonical_and_deterministic():
    b = Basis.parse("132_4231")
    cfg = GenConfig.default(b, max_width=3, max_height=3)
    a = generate_rules(b, cfg=cfg)
    assert a == sorted(a, key=Rule.key)
    assert a == generate_rules(b, cfg=cfg)


def test_tiny_block_set_matches_naive():
    b = Basis.parse("12_21")
    assert generate_rules(b) == naive_rules(b)


# one basis per symmetry class whose naive run is quick; all of them run in the acceptance file
@pytest.mark.parametrize("basis", ["12", "123", "123_132", "123_231", "123_321", "123_132_213", "123_132_321"])
def test_pruned_matches_naive(basis):
    b = Basis.parse(basis)
    cfg = GenConfig.default(b, max_width=3, max_height=3)
    assert generate_rules(b, cfg=cfg) == naive_rules(b, cfg=cfg)


def test_rule_budget():
    b = Basis.parse("231")
    with pytest.raises(BudgetExceeded) as exc:
        generate_rules(b, cfg=GenConfig.default(b, max_rules=5))
    assert len(exc.value.partial) > 5
    assert exc.value.explored > 0


def test_time_budget():
    b = Basis.parse("132_4231")
    with pytest.raises(BudgetExceeded):
        generate_rules(b, cfg=GenConfig.default(b, time_limit=0.01))


def test_config_validation():
    with pytest.raises(ValueError):
        GenConfig(0, 2, 4)
    with pytest.raises(ValueError):
        GenConfig(2, 2, 4, max_rules=0)
    cfg = GenConfig.default(Basis.parse("321_2134"))
    assert (cfg.max_width, cfg.max_height, cfg.depth) == (5, 5, 6)


def test_variants_share_truncations():
    b = Basis.parse("132_4231")
    bs = block_set(b)
    d = b.max_length + 2
    for r in generate_rules(b, bs, cfg=GenConfig.default(b, max_width=2, max_height=2)):
        variants = rule_variants(r, bs, d)
        assert variants[0] == r
        base = None
        for v in variants:
            s = generated_set(v, d)
            base = s if base is None else base
            assert s == base


# monotonicity behind the poset pruning: enlarging a block keeps any failure
_B231 = Basis.parse("231")
_blocks = block_set(_B231)
_poset = build_poset(_blocks)


@st.composite
def rule_and_cell(draw):
    t = draw(st.integers(1, 3))
    u = draw(st.integers(1, 3))
    cells = {}
    for x in range(t):
        for y in range(u):
            if draw(st.integers(0, 2)) == 0:
                cells[(x, y)] = draw(st.sampled_from([P] + _blocks.class_blocks))
    cells[(0, 0)] = draw(st.sampled_from(_blocks.class_blocks))
    return cells


@settings(max_examples=60, deadline=None)
@given(rule_and_cell())
def test_superset_blocks_keep_failures(cells):
    small = cells[(0, 0)]
    for big in _poset.supersets(small):
        if not big.is_class:
            continue
        r1 = Rule.from_cells(cells)
        r2 = Rule.from_cells({**cells, (0, 0): big})
        ok1 = is_struct_rule(r1, 5) and rule_avoids(r1, _B231, 5)
        ok2 = is_struct_rule(r2, 5) and rule_avoids(r2, _B231, 5)
        assert ok1 or not ok2
