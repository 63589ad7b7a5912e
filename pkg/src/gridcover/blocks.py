"""Blocks of a permutation class and the containment poset over them."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Optional

from .perms import Basis, avoiders, contains, perm_key, subpatterns

EMPTY, POINT, CLASS = "empty", "point", "class"
_KIND_ORDER = {EMPTY: 0, POINT: 1, CLASS: 2}


@dataclass(frozen=True)
class Block:
    """A cell content: ``{ε}``, the point ``{1}``, or an infinite class ``Av(B')``."""

    kind: str
    basis: Optional[Basis] = None

    def __post_init__(self):
        if (self.kind == CLASS) != (self.basis is not None):
            raise ValueError("only class blocks carry a basis")
        if self.kind == CLASS and (1,) in self.basis.patterns:
            raise ValueError("Av(1) must be represented by the empty block")

    @classmethod
    def of(cls, basis: Basis | str) -> "Block":
        """Class block for ``basis``; a basis containing ``1`` collapses to the empty block."""
        if isinstance(basis, str):
            basis = Basis.parse(basis)
        if (1,) in basis.patterns:
            return EMPTY_BLOCK
        return cls(CLASS, basis)

    @classmethod
    def parse(cls, text: str) -> "Block":
        text = text.strip()
        if text in ("eps", "e", "ε", "empty", "Av(1)"):
            return EMPTY_BLOCK
        if text in ("pt", "point", "•", "o"):
            return POINT_BLOCK
        m = re.fullmatch(r"Av\((.*)\)", text)
        if not m:
            raise ValueError(f"cannot parse block {text!r}")
        return cls.of(Basis.parse(m.group(1)))

    @property
    def is_class(self) -> bool:
        return self.kind == CLASS

    @property
    def is_point(self) -> bool:
        return self.kind == POINT

    def key(self) -> tuple:
        return (_KIND_ORDER[self.kind], self.basis.key() if self.basis else ())

    def name(self) -> str:
        if self.kind == EMPTY:
            return "eps"
        if self.kind == POINT:
            return "point"
        return "Av(" + ",".join(str(p) for p in self.basis) + ")"

    def __str__(self) -> str:
        return self.name()

    def levels(self, n: int) -> list[list[tuple]]:
        """Members of length ``0..n``, one sorted list per length."""
        if self.kind == EMPTY:
            return [[()]] + [[] for _ in range(n)]
        if self.kind == POINT:
            return [[]] + [[(1,)]] * min(n, 1) + [[] for _ in range(n - 1)]
        return avoiders(self.basis, n).levels

    def counts(self, n: int) -> list[int]:
        return [len(level) for level in self.levels(n)]

    def contains_perm(self, p) -> bool:
        p = tuple(p)
        if self.kind == EMPTY:
            return p == ()
        if self.kind == POINT:
            return p == (1,)
        return not any(contains(q, p) for q in self.basis)


EMPTY_BLOCK = Block(EMPTY)
POINT_BLOCK = Block(POINT)


def class_contains(a: Block, b: Block) -> bool:
    """True iff the set of ``b`` is contained in the set of ``a``."""
    if a == b:
        return True
    if b.kind == EMPTY:
        return a.kind != POINT
    if b.kind == POINT:
        return a.kind == CLASS
    if a.kind != CLASS:
        return False
    return all(any(contains(q, p) for q in b.basis) for p in a.basis)


def _is_infinite(basis: Basis, depth: int) -> bool:
    return all(avoiders(basis, depth).counts)


@dataclass
class BlockSet:
    root_basis: Basis
    blocks: list[Block]
    depth: int

    @property
    def class_blocks(self) -> list[Block]:
        return [b for b in self.blocks if b.is_class]

    @property
    def root(self) -> Optional[Block]:
        blk = Block.of(self.root_basis)
        return blk if blk in self.blocks else None

    def __iter__(self):
        return iter(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __contains__(self, b) -> bool:
        return b in self.blocks

    def to_json(self) -> str:
        return json.dumps({"root": str(self.root_basis), "blocks": [b.name() for b in self.blocks]})

    @classmethod
    def from_json(cls, text: str, depth: Optional[int] = None) -> "BlockSet":
        data = json.loads(text)
        basis = Basis.parse(data["root"])
        return cls(basis, [Block.parse(s) for s in data["blocks"]], depth or basis.max_length + 2)


def block_set(basis: Basis, depth: Optional[int] = None) -> BlockSet:
    """All blocks of ``Av(basis)``.

    Class blocks are the classes ``Av(B')`` where ``B'`` is an antichain of
    non-trivial subpatterns of the basis meeting ``subpatterns(p)`` for every
    basis element ``p``, kept when they have members of every length up to
    ``depth`` (default: longest basis pattern + 2).
    """
    if depth is None:
        depth = basis.max_length + 2
    subs = [set(map(tuple, subpatterns(p))) for p in basis]
    cands = sorted(set().union(*subs) - {(), (1,)}, key=perm_key)
    # which basis elements each candidate hits
    hits = [frozenset(i for i, s in enumerate(subs) if c in s) for c in cands]
    comparable = [[contains(a, b) or contains(b, a) for b in cands] for a in cands]
    n_basis = len(subs)
    found: list[Basis] = []

    def feasible(i: int, chosen: list[int], hit: frozenset) -> bool:
        # every unhit basis element must still be reachable by some later candidate
        for e in range(n_basis):
            if e in hit:
                continue
            if not any(e in hits[j] and not any(comparable[j][c] for c in chosen) for j in range(i, len(cands))):
                return False
        return True

    def rec(i: int, chosen: list[int], hit: frozenset):
        if not feasible(i, chosen, hit):
            return
        if i == len(cands):
            found.append(Basis(cands[c] for c in chosen))
            return
        # include cands[i]
        if not any(comparable[i][c] for c in chosen):
            new = chosen + [i]
            if _is_infinite(Basis(cands[c] for c in new), depth):
                rec(i + 1, new, hit | hits[i])
        rec(i + 1, chosen, hit)

    rec(0, [], frozenset())
    blocks = [EMPTY_BLOCK]
    if basis.avoided_by((1,)):
        blocks.append(POINT_BLOCK)
    blocks.extend(Block(CLASS, b) for b in sorted(set(found), key=Basis.key))
    return BlockSet(basis, blocks, depth)


class BlockPoset:
    """Containment relation over a block set: ``leq[i][j]`` iff block i ⊆ block j."""

    def __init__(self, blocks: BlockSet):
        self.blocks = blocks
        bl = blocks.blocks
        self.index = {b: i for i, b in enumerate(bl)}
        self.leq = [[class_contains(b, a) for b in bl] for a in bl]

    def le(self, a: Block, b: Block) -> bool:
        return self.leq[self.index[a]][self.index[b]]

    def supersets(self, a: Block) -> list[Block]:
        i = self.index[a]
        return [b for j, b in enumerate(self.blocks.blocks) if self.leq[i][j]]

    def subsets(self, a: Block) -> list[Block]:
        j = self.index[a]
        return [b for i, b in enumerate(self.blocks.blocks) if self.leq[i][j]]

    def covers_of(self, a: Block) -> list[Block]:
        """Blocks directly above ``a``."""
        ups = [b for b in self.supersets(a) if b != a]
        return [b for b in ups if not any(c != b and self.le(c, b) for c in ups)]

    def minimal_elements(self) -> list[Block]:
        bl = self.blocks.blocks
        return [b for b in bl if not any(c != b and self.le(c, b) for c in bl)]

    def maximal_elements(self) -> list[Block]:
        bl = self.blocks.blocks
        return [b for b in bl if not any(c != b and self.le(b, c) for c in bl)]

    def linear_extension(self, blocks: list[Block]) -> list[Block]:
        """``blocks`` ordered so every block precedes its strict supersets."""
        return sorted(blocks, key=lambda b: (sum(self.le(c, b) for c in blocks), b.key()))


def build_poset(bs: BlockSet) -> BlockPoset:
    return BlockPoset(bs)
