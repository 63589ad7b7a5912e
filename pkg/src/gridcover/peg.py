"""Peg permutations, filling vectors and their translation into rules.

A peg permutation decorates each letter with ``+`` (increasing run),
``-`` (decreasing run) or ``o`` (single point).  Filling letter ``i`` with
``v[i]`` entries and standardizing gives a permutation.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .blocks import POINT_BLOCK, Block
from .cover import Cover, verify_cover
from .perms import Basis, Perm, avoiders
from .rules import EMPTY_RULE, Rule

PLUS, MINUS, DOT = "+", "-", "o"
_DECOR_ALIASES = {"+": PLUS, "⁺": PLUS, "-": MINUS, "−": MINUS, "⁻": MINUS, "o": DOT, "∘": DOT, ".": DOT}
INCREASING = Block.of("21")
DECREASING = Block.of("12")
MAX_CAP = 8


@dataclass(frozen=True)
class PegPermutation:
    perm: Perm
    decorations: tuple[str, ...]

    def __post_init__(self):
        if len(self.perm) != len(self.decorations):
            raise ValueError("one decoration per letter is required")
        if any(d not in (PLUS, MINUS, DOT) for d in self.decorations):
            raise ValueError(f"bad decorations {self.decorations}")

    @classmethod
    def parse(cls, text: str) -> "PegPermutation":
        text = text.strip()
        if text in ("", "e", "ε"):
            return cls(Perm(()), ())
        tokens = re.findall(r"(\d+|\[\d+\])\s*([+⁺\-−⁻o∘.])", text)
        if "".join(a + b for a, b in tokens) != re.sub(r"\s+", "", text):
            raise ValueError(f"cannot parse peg permutation {text!r}")
        values = [int(a.strip("[]")) for a, _ in tokens]
        return cls(Perm(values), tuple(_DECOR_ALIASES[b] for _, b in tokens))

    def __len__(self) -> int:
        return len(self.perm)

    def __str__(self) -> str:
        wide = len(self.perm) > 9
        return "".join((f"[{v}]" if wide else str(v)) + d for v, d in zip(self.perm, self.decorations)) or "ε"


def parse_vector(text: str) -> tuple[int, ...]:
    inner = text.strip().strip("<>⟨⟩()[] ")
    if not inner:
        return ()
    return tuple(int(x) for x in inner.split(","))


def is_filling(peg: PegPermutation, v: Sequence[int]) -> bool:
    """1 on dotted letters and at least 2 on signed ones."""
    if len(v) != len(peg):
        return False
    return all((x == 1) if d == DOT else (x >= 2) for d, x in zip(peg.decorations, v))


def fill(peg: PegPermutation, v: Sequence[int], allow_singletons: bool = False) -> Perm:
    """Replace letter ``i`` by a run of ``v[i]`` values (increasing for ``+``,
    decreasing for ``-``) keeping the value order of the letters.

    ``allow_singletons`` also accepts 1 on signed letters."""
    v = tuple(v)
    ok = is_filling(peg, v) or (
        allow_singletons
        and len(v) == len(peg)
        and all((x == 1) if d == DOT else (x >= 1) for d, x in zip(peg.decorations, v))
    )
    if not ok:
        raise ValueError(f"{v} does not fill {peg}")
    start = {}
    acc = 0
    for i in sorted(range(len(peg)), key=lambda i: peg.perm[i]):
        start[i] = acc
        acc += v[i]
    out = []
    for i, d in enumerate(peg.decorations):
        run = range(start[i] + 1, start[i] + v[i] + 1)
        out.extend(reversed(run) if d == MINUS else run)
    return Perm(out, check=False)


def vector_contained(v: Sequence[int], w: Sequence[int]) -> bool:
    if len(v) != len(w):
        raise ValueError("vectors of different lengths")
    return all(a <= b for a, b in zip(v, w))


@dataclass(frozen=True)
class ConvexVectorSet:
    """Vectors with ``lower[i] <= v[i] <= upper[i]`` (``None`` = unbounded)."""

    lower: tuple[int, ...]
    upper: tuple[Optional[int], ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise ValueError("bounds of different lengths")
        for lo, hi in zip(self.lower, self.upper):
            if lo < 1 or (hi is not None and hi < lo):
                raise ValueError(f"bad bounds [{lo}, {hi}]")

    @classmethod
    def filling(cls, peg: PegPermutation) -> "ConvexVectorSet":
        """All filling vectors of ``peg``."""
        lo = tuple(1 if d == DOT else 2 for d in peg.decorations)
        hi = tuple(1 if d == DOT else None for d in peg.decorations)
        return cls(lo, hi)

    @classmethod
    def parse(cls, text: str) -> "ConvexVectorSet":
        """``lo..hi`` per component separated by commas, ``hi`` may be empty or ``*``."""
        lo, hi = [], []
        for part in text.strip().strip("<>⟨⟩").split(","):
            part = part.strip()
            if ".." in part:
                a, b = part.split("..")
                lo.append(int(a))
                hi.append(None if b.strip() in ("", "*") else int(b))
            else:
                lo.append(int(part))
                hi.append(int(part))
        return cls(tuple(lo), tuple(hi))

    def __contains__(self, v) -> bool:
        return len(v) == len(self.lower) and all(
            lo <= x and (hi is None or x <= hi) for x, lo, hi in zip(v, self.lower, self.upper)
        )

    def check_for(self, peg: PegPermutation) -> None:
        if len(self.lower) != len(peg):
            raise ValueError("vector set and peg have different lengths")
        for d, lo, hi in zip(peg.decorations, self.lower, self.upper):
            if d == DOT and (lo, hi) != (1, 1):
                raise ValueError("dotted letters take exactly one entry")

    def members(self, total: int) -> Iterator[tuple[int, ...]]:
        """Vectors in the set with component sum ``total``."""

        def rec(i, left):
            if i == len(self.lower):
                if left == 0:
                    yield ()
                return
            lo, hi = self.lower[i], self.upper[i]
            top = left if hi is None else min(hi, left)
            for x in range(lo, top + 1):
                for rest in rec(i + 1, left - x):
                    yield (x,) + rest

        yield from rec(0, total)


def _letter_cells(decoration: str, dots: int, with_class: bool) -> list[tuple[int, int, Block]]:
    """Cells for one letter as ``(column, row, block)`` offsets within its band."""
    k = dots + (1 if with_class else 0)
    cells = []
    for j in range(k):
        blk = POINT_BLOCK if j < dots else (INCREASING if decoration == PLUS else DECREASING)
        row = j if decoration != MINUS else k - 1 - j
        cells.append((j, row, blk))
    return cells


def _expand(peg: PegPermutation, sizes: Sequence[tuple[int, bool]]) -> Rule:
    """Place each letter's cells in its own band of columns and rows."""
    col_start, acc = [], 0
    for dots, cls in sizes:
        col_start.append(acc)
        acc += dots + cls
    row_start = [0] * len(peg)
    acc = 0
    for i in sorted(range(len(peg)), key=lambda i: peg.perm[i]):
        row_start[i] = acc
        acc += sizes[i][0] + sizes[i][1]
    cells = {}
    for i, d in enumerate(peg.decorations):
        dots, cls = sizes[i]
        for cx, cy, blk in _letter_cells(d, dots, cls):
            cells[(col_start[i] + cx, row_start[i] + cy)] = blk
    return Rule.from_cells(cells)


def peg_to_rules(peg: PegPermutation, vs: Optional[ConvexVectorSet] = None) -> list[Rule]:
    """Rules whose disjoint union is ``{fill(peg, v) : v in vs}``.

    An unbounded letter with lower bound ``lo`` becomes ``lo`` points followed
    by a monotone cell along the run's direction.  A letter with a finite cap
    becomes explicit points, one rule per admissible size."""
    vs = vs or ConvexVectorSet.filling(peg)
    vs.check_for(peg)
    options = []
    for d, lo, hi in zip(peg.decorations, vs.lower, vs.upper):
        if hi is None:
            options.append([(lo, True)])
        else:
            if hi > MAX_CAP:
                raise ValueError(f"cap {hi} exceeds the limit of {MAX_CAP}")
            options.append([(k, False) for k in range(lo, hi + 1)])
    return [_expand(peg, combo) for combo in itertools.product(*options)]


def peg_to_rule(peg: PegPermutation, vs: Optional[ConvexVectorSet] = None) -> Rule:
    rules = peg_to_rules(peg, vs)
    if len(rules) != 1:
        raise ValueError("a letter with a finite range of sizes needs several rules; use peg_to_rules")
    return rules[0]


class PegCoverError(ValueError):
    pass


def peg_cover_to_struct_cover(
    pegs: Sequence[tuple[PegPermutation, Optional[ConvexVectorSet]]], basis: Basis, verify_depth: Optional[int] = None
) -> Cover:
    """Rules for every peg (plus the empty rule when ε is in the class),
    checked against the avoiders before being returned."""
    rules: list[Rule] = []
    for peg, vs in pegs:
        for r in peg_to_rules(peg, vs):
            if r not in rules:
                rules.append(r)
    if avoiders(basis, 0).counts[0] and EMPTY_RULE not in rules:
        rules.insert(0, EMPTY_RULE)
    v = verify_depth or basis.max_length + 4
    cover = Cover(basis, rules, basis.max_length + 2)
    report = verify_cover(cover, v)
    if not report.ok:
        raise PegCoverError(report.summary())
    cover.depth_verified = v
    return cover
