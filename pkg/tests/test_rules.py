import itertools
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridcover.blocks import EMPTY_BLOCK, POINT_BLOCK, Block
from gridcover.perms import Basis, standardize
from gridcover.rules import (
    EMPTY_RULE,
    Rule,
    assemble,
    count_rule,
    generated_set,
    grid_perms,
    is_struct_rule,
    line_members,
    point_rule,
    render_rule,
    rule_avoids,
    rule_subset_certified,
    size_assignment_terms,
)

A = Block.of("231")
D = Block.of("12")
I = Block.of("21")
P = POINT_BLOCK

FIG1 = Rule.from_cells({(0, 0): A, (1, 2): P, (2, 1): A})


def brute_griddings(rule: Rule, perm) -> int:
    """Count griddings of ``perm`` by trying every pair of cut sequences."""
    n = len(perm)
    cells = rule.cell_map()
    total = 0
    for cols in itertools.combinations_with_replacement(range(n + 1), rule.t - 1):
        xs = (0,) + cols + (n,)
        for rows in itertools.combinations_with_replacement(range(n + 1), rule.u - 1):
            ys = (0,) + rows + (n,)
            ok = True
            for x in range(rule.t):
                for y in range(rule.u):
                    word = [v for i, v in enumerate(perm) if xs[x] <= i < xs[x + 1] and ys[y] < v <= ys[y + 1]]
                    blk = cells.get((x, y), EMPTY_BLOCK)
                    if not blk.contains_perm(standardize(word)):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                total += 1
    return total


def test_fig1_catalan():
    assert [count_rule(FIG1, n) for n in range(8)] == [0, 1, 2, 5, 14, 42, 132, 429]
    assert is_struct_rule(FIG1, 7)
    assert rule_avoids(FIG1, Basis.parse("231"), 7)
    assert rule_subset_certified(FIG1, Basis.parse("231"))


def test_empty_rule():
    assert EMPTY_RULE.is_empty
    assert grid_perms(EMPTY_RULE, 3)[0] == Counter({(): 1})
    assert generated_set(EMPTY_RULE, 4) == {()}


def test_non_unique_column():
    r = Rule.from_cells({(0, 0): D, (0, 1): D})
    assert not is_struct_rule(r, 3)
    # 21 grids several ways: all in the top cell, all in the bottom, split
    assert grid_perms(r, 2)[2][(2, 1)] >= 2


def test_mixing_column_counts_powers_of_two():
    # increasing over decreasing in one column: each entry picks a cell
    r = Rule.from_cells({(0, 0): D, (0, 1): I})
    assert [count_rule(r, n) for n in range(7)] == [2**n for n in range(7)]
    assert is_struct_rule(r, 6) is False  # the single point grids twice


def test_row_of_point_and_class():
    r = Rule.from_cells({(0, 0): P, (1, 0): Block.of("132_213")})
    counts = [count_rule(r, n) for n in range(8)]
    assert counts[2:] == [n * 2 ** (n - 2) for n in range(2, 8)]


@pytest.mark.parametrize(
    "rule",
    [
        FIG1,
        Rule.from_cells({(0, 0): P, (1, 0): D}),
        Rule.from_cells({(0, 1): P, (1, 0): D, (1, 2): I}),
        Rule.from_cells({(0, 0): D, (1, 1): P, (0, 2): P}),
        Rule.from_cells({(0, 0): D, (0, 1): D}),
        Rule.from_cells({(0, 0): I, (1, 0): D, (2, 1): P}),
    ],
    ids=str,
)
def test_griddings_match_cut_sequences(rule):
    gp = grid_perms(rule, 5)
    for n in range(6):
        for perm in itertools.permutations(range(1, n + 1)):
            assert gp[n].get(perm, 0) == brute_griddings(rule, perm)


cell_strategy = st.sampled_from([P, D, I, A])


@st.composite
def small_rules(draw):
    t = draw(st.integers(1, 3))
    u = draw(st.integers(1, 3))
    cells = {}
    for x in range(t):
        for y in range(u):
            if draw(st.booleans()):
                cells[(x, y)] = draw(cell_strategy)
    return Rule.from_cells(cells)


@settings(max_examples=80, deadline=None)
@given(small_rules())
def test_count_rule_counts_griddings(rule):
    gp = grid_perms(rule, 6)
    for n in range(7):
        assert count_rule(rule, n) == sum(gp[n].values())


@settings(max_examples=60, deadline=None)
@given(small_rules())
def test_json_roundtrip(rule):
    assert Rule.from_json(rule.to_json()) == rule
    assert rule.is_normal()


def test_normalization_drops_empty_lines():
    r = Rule.from_cells({(0, 0): P, (2, 3): D})
    assert (r.t, r.u) == (2, 2)
    assert r.cell_map() == {(0, 0): P, (1, 1): D}


def test_point_rule():
    r = point_rule([(0, 1), (1, 0)])
    assert generated_set(r, 4) == {(2, 1)}


def test_render_ascii():
    text = render_rule(FIG1)
    lines = text.splitlines()
    assert "•" in lines[1]  # top row holds the point
    assert lines[-2].count("Av(231)") == 1
    assert render_rule(FIG1, "json") == FIG1.to_json()


def test_assemble_matches_generation():
    r = Rule.from_cells({(0, 0): P, (1, 1): D, (1, 0): I})
    n = 4
    built = Counter()
    for sizes, w in size_assignment_terms(r, n):
        cols, rows = line_members(r, sizes)
        cls_ids = [i for i, c in enumerate(r.cells) if c[2].is_class]
        contents_opts = []
        for i, s in zip(cls_ids, sizes):
            contents_opts.append([(i, p) for p in r.cells[i][2].levels(s)[s]] if s else [(i, None)])
        from gridcover.rules import _shuffles

        def words(members):
            ids = [cid for cid, _ in members]
            return [tuple(ids[l] for l in w_) for w_ in _shuffles(tuple(s for _, s in members))]

        col_opts = [[(x, w_) for w_ in words(m)] for x, m in cols.items()]
        row_opts = [[(y, w_) for w_ in words(m)] for y, m in rows.items()]
        for contents in itertools.product(*contents_opts):
            cmap = {i: p for i, p in contents if p is not None}
            for cw in itertools.product(*col_opts):
                for rw in itertools.product(*row_opts):
                    built[assemble(r, sizes, cmap, dict(cw), dict(rw))] += 1
    assert built == grid_perms(r, n)[n]
