"""Grid rules: gridded generation, unique-gridding checks, counting, rendering.

A rule is a ``t x u`` matrix of cells.  Columns are indexed left to right and
rows bottom to top.  Only non-empty cells (points and class blocks) are stored.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Iterator, Mapping, Optional, Sequence

from .blocks import POINT_BLOCK, Block
from .perms import Basis, avoiders

Cell = tuple[int, int]


class DependencyError(KeyError):
    """Counting data for a block is missing."""


@dataclass(frozen=True)
class Rule:
    t: int
    u: int
    cells: tuple[tuple[int, int, Block], ...]

    def __post_init__(self):
        seen = set()
        for x, y, blk in self.cells:
            if not (0 <= x < self.t and 0 <= y < self.u):
                raise ValueError(f"cell ({x},{y}) outside a {self.t}x{self.u} rule")
            if (x, y) in seen:
                raise ValueError(f"cell ({x},{y}) given twice")
            if blk.kind == "empty":
                raise ValueError("empty cells are not stored")
            seen.add((x, y))

    @classmethod
    def from_cells(cls, cells: Mapping[Cell, Block], t: Optional[int] = None, u: Optional[int] = None) -> "Rule":
        """Build a rule in normal form: empty cells dropped, then empty rows and
        columns deleted."""
        cells = {c: b for c, b in cells.items() if b.kind != "empty"}
        if not cells:
            return EMPTY_RULE
        t = max(x for x, _ in cells) + 1 if t is None else t
        u = max(y for _, y in cells) + 1 if u is None else u
        xs = sorted({x for x, _ in cells})
        ys = sorted({y for _, y in cells})
        xmap = {x: i for i, x in enumerate(xs)}
        ymap = {y: i for i, y in enumerate(ys)}
        norm = sorted(((xmap[x], ymap[y], b) for (x, y), b in cells.items()), key=lambda c: (c[0], c[1]))
        return cls(len(xs), len(ys), tuple(norm))

    @property
    def is_empty(self) -> bool:
        return not self.cells

    @property
    def points(self) -> list[Cell]:
        return [(x, y) for x, y, b in self.cells if b.kind == "point"]

    @property
    def class_cells(self) -> list[tuple[int, int, Block]]:
        return [c for c in self.cells if c[2].kind == "class"]

    @property
    def n_points(self) -> int:
        return sum(1 for c in self.cells if c[2].kind == "point")

    def blocks(self) -> set[Block]:
        return {b for _, _, b in self.cells if b.is_class}

    def cell_map(self) -> dict[Cell, Block]:
        return {(x, y): b for x, y, b in self.cells}

    def is_normal(self) -> bool:
        if not self.cells:
            return self.t == self.u == 1
        return {x for x, _, _ in self.cells} == set(range(self.t)) and {y for _, y, _ in self.cells} == set(range(self.u))

    def key(self) -> tuple:
        return (self.t + self.u, self.t, self.u, len(self.cells), tuple((x, y, b.key()) for x, y, b in self.cells))

    def __lt__(self, other: "Rule") -> bool:
        return self.key() < other.key()

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "u": self.u,
            "cells": [{"x": x, "y": y, "c": _cell_label(b)} for x, y, b in self.cells],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Rule":
        cells = {(c["x"], c["y"]): Block.parse(c["c"]) for c in data["cells"]}
        if not cells:
            return EMPTY_RULE
        rule = cls(data["t"], data["u"], tuple(sorted(((x, y, b) for (x, y), b in cells.items()), key=lambda c: c[:2])))
        return rule if rule.is_normal() else cls.from_cells(cells)

    @classmethod
    def from_json(cls, text: str) -> "Rule":
        return cls.from_dict(json.loads(text))

    def __str__(self) -> str:
        if not self.cells:
            return "[ ]"
        inner = ", ".join(f"{x}/{y}/{_cell_label(b)}" for x, y, b in self.cells)
        return f"{self.t}x{self.u}[{inner}]"


EMPTY_RULE = Rule(1, 1, ())


def _cell_label(b: Block) -> str:
    return "pt" if b.kind == "point" else b.name()


def render_rule(rule: Rule, format: str = "ascii", names: Optional[Mapping[Block, str]] = None) -> str:
    """Draw a rule as an ascii grid (top row first) or dump it as JSON."""
    if format == "json":
        return rule.to_json()
    if format != "ascii":
        raise ValueError(f"unknown format {format!r}")
    if not rule.cells:
        return "[ ]"
    names = names or {}
    grid = rule.cell_map()

    def label(c):
        b = grid.get(c)
        if b is None:
            return ""
        if b.kind == "point":
            return "•"
        return names.get(b, b.name())

    width = max(len(label(c)) for c in grid) + 2
    sep = "+" + "+".join("-" * width for _ in range(rule.t)) + "+"
    lines = [sep]
    for y in reversed(range(rule.u)):
        lines.append("|" + "|".join(label((x, y)).center(width) for x in range(rule.t)) + "|")
        lines.append(sep)
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# generation


@lru_cache(maxsize=None)
def _shuffles(counts: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """All words with ``counts[i]`` copies of letter ``i``."""
    total = sum(counts)
    if total == 0:
        return ((),)
    out = []
    for i, c in enumerate(counts):
        if c:
            rest = counts[:i] + (c - 1,) + counts[i + 1 :]
            out.extend((i,) + w for w in _shuffles(rest))
    return tuple(out)


@lru_cache(maxsize=None)
def _compositions(total: int, parts: int, caps: tuple[int, ...], floors: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """Vectors of ``parts`` sizes with ``floors[i] <= s_i <= caps[i]`` summing to ``total``."""
    if parts == 0:
        return ((),) if total == 0 else ()
    out = []
    lo, hi = floors[0], min(caps[0], total)
    for s in range(lo, hi + 1):
        for rest in _compositions(total - s, parts - 1, caps[1:], floors[1:]):
            out.append((s,) + rest)
    return tuple(out)


def _slot_assignments(groups: dict[int, list[tuple[int, int]]]) -> list[list[tuple]]:
    """For each line (column or row), list the ways of handing its slots to
    the cells in it.  ``groups`` maps a line offset to ``[(cell_id, size), ...]``.

    Returns, per line, a list of tuples ``((cell_id, positions), ...)``."""
    per_line = []
    for offset, members in groups.items():
        if len(members) == 1:
            cid, s = members[0]
            per_line.append([((cid, tuple(range(offset, offset + s))),)])
            continue
        counts = tuple(s for _, s in members)
        options = []
        for word in _shuffles(counts):
            pos = [[] for _ in members]
            for j, letter in enumerate(word):
                pos[letter].append(offset + j)
            options.append(tuple((members[i][0], tuple(pos[i])) for i in range(len(members))))
        per_line.append(options)
    return per_line


def _merge(choice, ncells):
    out = [None] * ncells
    for line in choice:
        for cid, positions in line:
            out[cid] = positions
    return out


@lru_cache(maxsize=200_000)
def _placements(t: int, u: int, cells: tuple) -> tuple[list, list]:
    """Index and value slot choices for each cell, given ``((x, y), size)`` per cell."""
    ncells = len(cells)
    width = [0] * t
    height = [0] * u
    for (x, y), s in cells:
        width[x] += s
        height[y] += s
    col_off = list(itertools.accumulate([0] + width[:-1]))
    row_off = list(itertools.accumulate([0] + height[:-1]))
    cols: dict[int, list] = {}
    rows: dict[int, list] = {}
    # members of a column are listed bottom to top, members of a row left to right
    for cid in sorted(range(ncells), key=lambda i: (cells[i][0][1], cells[i][0][0])):
        (x, y), s = cells[cid]
        cols.setdefault(col_off[x], []).append((cid, s))
    for cid in sorted(range(ncells), key=lambda i: (cells[i][0][0], cells[i][0][1])):
        (x, y), s = cells[cid]
        rows.setdefault(row_off[y], []).append((cid, s))
    idx_opts = [_merge(ch, ncells) for ch in itertools.product(*_slot_assignments(cols))]
    val_opts = [_merge(ch, ncells) for ch in itertools.product(*_slot_assignments(rows))]
    return idx_opts, val_opts


class Grid:
    """Generation engine over raw cell data.

    ``points`` is a list of cells holding a point, ``classes`` a list of
    ``(cell, levels)`` where ``levels[s]`` lists the block members of length s.
    """

    __slots__ = ("points", "classes", "t", "u")

    def __init__(self, points: Sequence[Cell], classes: Sequence[tuple[Cell, list[list[tuple]]]], t: int, u: int):
        self.points = list(points)
        self.classes = list(classes)
        self.t, self.u = t, u

    @classmethod
    def of(cls, rule: Rule, n: int) -> "Grid":
        pts = [(x, y) for x, y, b in rule.cells if b.kind == "point"]
        cls_cells = [((x, y), b.levels(n)) for x, y, b in rule.cells if b.kind == "class"]
        return cls(pts, cls_cells, rule.t, rule.u)

    def size_vectors(self, m: int, nonempty: Sequence[int] = ()) -> tuple[tuple[int, ...], ...]:
        k = m - len(self.points)
        if k < 0:
            return ()
        caps = tuple(len(lv) - 1 for _, lv in self.classes)
        floors = tuple(1 if i in nonempty else 0 for i in range(len(self.classes)))
        return _compositions(k, len(self.classes), caps, floors)

    def gridded(self, m: int, nonempty: Sequence[int] = (), with_info: bool = False) -> Iterator:
        """Yield the permutations of length ``m`` with one entry per gridding.

        With ``with_info`` the items are ``(perm, sizes, contents)`` where
        ``contents`` lists the pattern placed in each class cell."""
        npts = len(self.points)
        for sizes in self.size_vectors(m, nonempty):
            cells = [(c, 1) for c in self.points]
            contents_opts = [[(1,)]] * npts
            cls_ids = []
            ok = True
            for i, (c, levels) in enumerate(self.classes):
                s = sizes[i]
                if s:
                    lv = levels[s]
                    if not lv:
                        ok = False
                        break
                    cls_ids.append(i)
                    cells.append((c, s))
                    contents_opts.append(lv)
            if not ok:
                continue
            yield from self._assemble(m, cells, contents_opts, sizes, cls_ids, npts, with_info)

    def _assemble(self, m, cells, contents_opts, sizes, cls_ids, npts, with_info):
        ncells = len(cells)
        idx_opts, val_opts = _placements(self.t, self.u, tuple(cells))
        rng = range(ncells)
        for contents in itertools.product(*contents_opts):
            for idx in idx_opts:
                for val in val_opts:
                    arr = [0] * m
                    for c in rng:
                        ip = idx[c]
                        vp = val[c]
                        sig = contents[c]
                        for k in range(len(ip)):
                            arr[ip[k]] = vp[sig[k] - 1] + 1
                    if with_info:
                        yield tuple(arr), sizes, dict(zip(cls_ids, contents[npts:]))
                    else:
                        yield tuple(arr)


def grid_perms(rule: Rule, n: int) -> list[Counter]:
    """For each length ``0..n``, a Counter mapping each generated permutation
    to its number of griddings."""
    g = Grid.of(rule, n)
    return [Counter(g.gridded(m)) for m in range(n + 1)]


def generated_set(rule: Rule, n: int) -> set[tuple]:
    g = Grid.of(rule, n)
    out = set()
    for m in range(n + 1):
        out.update(g.gridded(m))
    return out


def is_struct_rule(rule: Rule, depth: int) -> bool:
    """Every permutation of length at most ``depth`` has at most one gridding."""
    g = Grid.of(rule, depth)
    for m in range(depth + 1):
        seen = set()
        for p in g.gridded(m):
            if p in seen:
                return False
            seen.add(p)
    return True


def rule_avoids(rule: Rule, basis: Basis, depth: int) -> bool:
    """Every generated permutation of length at most ``depth`` avoids ``basis``."""
    av = avoiders(basis, depth)
    g = Grid.of(rule, depth)
    for m in range(depth + 1):
        for p in g.gridded(m):
            if p not in av:
                return False
    return True


def rule_subset_certified(rule: Rule, basis: Basis) -> bool:
    """Check containment in ``Av(basis)`` to length ``points + longest pattern``.

    Deleting the class-cell entries outside a basis occurrence keeps the
    permutation inside the rule, so a failure anywhere shows up by that length.
    """
    return rule_avoids(rule, basis, rule.n_points + basis.max_length)


def multinomial(parts: Sequence[int]) -> int:
    out = factorial(sum(parts))
    for p in parts:
        out //= factorial(p)
    return out


def size_assignment_terms(
    rule: Rule, n: int, block_counts: Optional[Mapping[Block, Sequence[int]]] = None
) -> Iterator[tuple[tuple[int, ...], int]]:
    """Yield ``(sizes, weight)`` for each way of giving the class cells sizes
    summing to ``n - points`` with a nonzero weight.

    The weight is the product of the block counts at those sizes and of the
    multinomials counting interleavings inside every column and every row."""
    pts = [(x, y) for x, y, b in rule.cells if b.kind == "point"]
    cls_cells = [(x, y, b) for x, y, b in rule.cells if b.kind == "class"]
    k = n - len(pts)
    if k < 0:
        return
    seqs = []
    for _, _, b in cls_cells:
        if block_counts is None:
            seqs.append(b.counts(k))
        else:
            if b not in block_counts:
                raise DependencyError(f"no counts for block {b}")
            seq = block_counts[b]
            if len(seq) <= k:
                raise DependencyError(f"counts for block {b} only reach length {len(seq) - 1}, need {k}")
            seqs.append(seq)
    caps = tuple(k for _ in cls_cells)
    floors = tuple(0 for _ in cls_cells)
    for sizes in _compositions(k, len(cls_cells), caps, floors):
        prod = 1
        for s, seq in zip(sizes, seqs):
            prod *= seq[s]
            if not prod:
                break
        if not prod:
            continue
        cols: dict[int, list[int]] = {}
        rows: dict[int, list[int]] = {}
        for x, y in pts:
            cols.setdefault(x, []).append(1)
            rows.setdefault(y, []).append(1)
        for (x, y, _), s in zip(cls_cells, sizes):
            if s:
                cols.setdefault(x, []).append(s)
                rows.setdefault(y, []).append(s)
        for parts in cols.values():
            prod *= multinomial(parts)
        for parts in rows.values():
            prod *= multinomial(parts)
        yield sizes, prod


def count_rule(rule: Rule, n: int, block_counts: Optional[Mapping[Block, Sequence[int]]] = None) -> int:
    """Number of gridded permutations of length ``n``.

    Equals the number of permutations when the rule has unique griddings.
    ``block_counts`` maps each class block to its counting sequence (at least
    up to ``n - points``); missing blocks are counted by brute force when no
    mapping is given at all.
    """
    return sum(w for _, w in size_assignment_terms(rule, n, block_counts))


def line_members(rule: Rule, sizes: Sequence[int]) -> tuple[dict, dict]:
    """Cells taking part in each column and row for a size assignment.

    Returns ``(cols, rows)`` mapping a column (row) to a list of
    ``(cell_id, size)``; cell ids index ``rule.cells``.  Column members are
    listed bottom to top, row members left to right."""
    cols: dict[int, list] = {}
    rows: dict[int, list] = {}
    sized = []
    it = iter(sizes)
    for i, (x, y, b) in enumerate(rule.cells):
        s = 1 if b.kind == "point" else next(it)
        if s:
            sized.append((i, x, y, s))
    for i, x, y, s in sorted(sized, key=lambda c: (c[2], c[1])):
        cols.setdefault(x, []).append((i, s))
    for i, x, y, s in sorted(sized, key=lambda c: (c[1], c[2])):
        rows.setdefault(y, []).append((i, s))
    return cols, rows


def assemble(rule: Rule, sizes: Sequence[int], contents: Mapping[int, Sequence[int]], col_words: Mapping[int, Sequence[int]], row_words: Mapping[int, Sequence[int]]) -> tuple:
    """Build one gridded permutation.

    ``contents[i]`` is the pattern placed in cell ``i`` (points may be
    omitted); ``col_words[x]`` lists, slot by slot from left to right, the
    cell owning each index of column ``x``; ``row_words[y]`` does the same
    for values from the bottom of row ``y``."""
    cols, rows = line_members(rule, sizes)
    idx: dict[int, list[int]] = {}
    val: dict[int, list[int]] = {}
    offset = 0
    for x in sorted(cols):
        for j, cid in enumerate(col_words[x]):
            idx.setdefault(cid, []).append(offset + j)
        offset += len(col_words[x])
    n = offset
    offset = 0
    for y in sorted(rows):
        for j, cid in enumerate(row_words[y]):
            val.setdefault(cid, []).append(offset + j)
        offset += len(row_words[y])
    arr = [0] * n
    for cid, positions in idx.items():
        pat = contents.get(cid, (1,))
        for k, ip in enumerate(positions):
            arr[ip] = val[cid][pat[k] - 1] + 1
    return tuple(arr)


def point_rule(positions: Sequence[Cell]) -> Rule:
    return Rule.from_cells({c: POINT_BLOCK for c in positions})
