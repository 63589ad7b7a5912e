"""Pruned exhaustive search for unique-gridding rules.

Rules are built in two layers.  First the point cells (the "skeleton") are
chosen; a skeleton whose permutations contain a basis pattern is dropped
together with all its supersets.  Then class cells are added column by column.
With the skeleton fixed, adding a class cell or enlarging a cell's block only
adds gridded permutations, so a failure (duplicate or basis hit) persists in
every extension.  That justifies both the poset pruning and the pairwise
compatibility table.

Two conventions keep the output finite and meaningful at the validity depth
``d``:

* a rule whose skeleton already has ``d`` points cannot show any class cell
  below length ``d + 1``, so such rules are emitted only without class cells;
* a class cell of a rule with ``p`` points holds at most ``d - p`` entries, so
  blocks that agree up to that length are interchangeable there; only the
  canonical representative of each such group is used.
"""

from __future__ import annotations

import itertools
import resource
import time
from dataclasses import dataclass
from typing import Iterable, Optional

from .blocks import POINT_BLOCK, Block, BlockPoset, BlockSet, build_poset, block_set
from .perms import Basis, avoiders
from .rules import EMPTY_RULE, Grid, Rule

ORIENTATIONS = ("row", "col", "ne", "nw")
_PAIR_LAYOUT = {
    "row": ((0, 0), (1, 0), 2, 1),
    "col": ((0, 0), (0, 1), 1, 2),
    "ne": ((0, 0), (1, 1), 2, 2),
    "nw": ((0, 1), (1, 0), 2, 2),
}


class BudgetExceeded(RuntimeError):
    def __init__(self, message: str, partial: list[Rule], explored: int):
        super().__init__(message)
        self.partial = partial
        self.explored = explored


@dataclass
class GenConfig:
    max_width: int
    max_height: int
    depth: int
    max_rules: Optional[int] = None
    mem_limit_mb: Optional[int] = None
    time_limit: Optional[float] = None

    def __post_init__(self):
        if self.max_width < 1 or self.max_height < 1:
            raise ValueError("rule dimensions must be positive")
        for name in ("max_rules", "mem_limit_mb", "time_limit"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def default(cls, basis: Basis, **overrides) -> "GenConfig":
        ell = basis.max_length
        cfg = dict(max_width=ell + 1, max_height=ell + 1, depth=ell + 2)
        cfg.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**cfg)


def _orientation(c1, c2):
    """Order two cells (left first, or lower first in a shared column) and name
    their relative position."""
    if (c2[0], c2[1]) < (c1[0], c1[1]):
        c1, c2 = c2, c1
        swapped = True
    else:
        swapped = False
    if c1[1] == c2[1]:
        o = "row"
    elif c1[0] == c2[0]:
        o = "col"
    elif c1[1] < c2[1]:
        o = "ne"
    else:
        o = "nw"
    return o, swapped


class CompatTable:
    """Shortest length at which two blocks placed in a given relative position
    produce a permutation outside ``Av(basis)`` (``None`` if none up to depth)."""

    def __init__(self, basis: Basis, depth: int):
        self.basis = basis
        self.depth = depth
        self._av = avoiders(basis, depth)
        self._table: dict[tuple, Optional[int]] = {}

    def fail_length(self, a: Block, b: Block, orientation: str) -> Optional[int]:
        key = (a, b, orientation)
        if key not in self._table:
            self._table[key] = self._compute(a, b, orientation)
        return self._table[key]

    def _compute(self, a: Block, b: Block, orientation: str) -> Optional[int]:
        ca, cb, t, u = _PAIR_LAYOUT[orientation]
        pts, classes = [], []
        for c, blk in ((ca, a), (cb, b)):
            if blk.is_point:
                pts.append(c)
            else:
                classes.append((c, blk.levels(self.depth)))
        g = Grid(pts, classes, t, u)
        for m in range(self.depth + 1):
            for p in g.gridded(m):
                if p not in self._av:
                    return m
        return None

    def compatible(self, a: Block, b: Block, orientation: str, depth: Optional[int] = None) -> bool:
        m = self.fail_length(a, b, orientation)
        return m is None or m > (self.depth if depth is None else depth)


def pairwise_compat(a: Block, b: Block, orientation: str, basis: Basis, depth: int) -> bool:
    """True iff every permutation of length at most ``depth`` combining ``a``
    and ``b`` in the given relative position avoids ``basis``.

    ``row``: ``a`` left of ``b`` in one row; ``col``: ``a`` below ``b`` in one
    column; ``ne``: ``b`` above and right of ``a``; ``nw``: ``b`` below and
    right of ``a``.
    """
    if orientation not in ORIENTATIONS:
        raise ValueError(f"unknown orientation {orientation!r}")
    return CompatTable(basis, depth).compatible(a, b, orientation)


class _Search:
    def __init__(self, basis: Basis, blocks: BlockSet, poset: BlockPoset, cfg: GenConfig):
        self.basis = basis
        self.cfg = cfg
        self.d = cfg.depth
        self.poset = poset
        self.av = avoiders(basis, self.d)
        self.avset = set(self.av)
        self.root = Block.of(basis)
        self.class_blocks = poset.linear_extension(blocks.class_blocks)
        self.levels = {b: b.levels(self.d) for b in self.class_blocks}
        self.compat = CompatTable(basis, self.d)
        self.supersets = {b: [c for c in self.class_blocks if poset.le(b, c)] for b in self.class_blocks}
        self._reps: dict[int, list[Block]] = {}
        self.out: list[Rule] = []
        self.explored = 0
        self.started = time.monotonic()

    # -- budgets ---------------------------------------------------------------

    def _tick(self):
        self.explored += 1
        if self.explored & 0x3FF:
            return
        cfg = self.cfg
        if cfg.time_limit is not None and time.monotonic() - self.started > cfg.time_limit:
            raise BudgetExceeded("time budget exceeded", self.out, self.explored)
        if cfg.mem_limit_mb is not None:
            rss_mb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024
            if rss_mb > cfg.mem_limit_mb:
                raise BudgetExceeded("memory budget exceeded", self.out, self.explored)

    def _emit(self, rule: Rule):
        self.out.append(rule)
        if self.cfg.max_rules is not None and len(self.out) > self.cfg.max_rules:
            raise BudgetExceeded("rule budget exceeded", self.out, self.explored)

    # -- block representatives ----------------------------------------------

    def representatives(self, room: int) -> list[Block]:
        """One block per group of blocks with equal members up to length ``room``."""
        if room not in self._reps:
            seen = {}
            for b in sorted(self.class_blocks, key=Block.key):
                sig = tuple(tuple(level) for level in self.levels[b][: room + 1])
                seen.setdefault(sig, b)
            reps = set(seen.values())
            self._reps[room] = [b for b in self.class_blocks if b in reps]
        return self._reps[room]

    # -- skeletons ------------------------------------------------------------

    def skeletons(self, t: int, u: int) -> Iterable[list[tuple[int, int]]]:
        cells = [(x, y) for x in range(t) for y in range(u)]
        d = self.d

        def rec(i: int, chosen: list):
            if i == len(cells):
                yield list(chosen)
                return
            yield from rec(i + 1, chosen)
            if len(chosen) < d:
                chosen.append(cells[i])
                g = Grid(chosen, [], t, u)
                if all(p in self.avset for p in g.gridded(len(chosen))):
                    yield from rec(i + 1, chosen)
                chosen.pop()

        yield from rec(0, [])

    # -- main -----------------------------------------------------------------

    def run(self) -> list[Rule]:
        cfg = self.cfg
        dims = sorted(
            ((t, u) for t in range(1, cfg.max_width + 1) for u in range(1, cfg.max_height + 1)),
            key=lambda tu: (tu[0] + tu[1], tu),
        )
        for t, u in dims:
            for skel in self.skeletons(t, u):
                self._tick()
                self._fill(t, u, skel)
        self.out.append(EMPTY_RULE)
        # the 1x1 rule holding the class itself says nothing
        if self.root is not None and self.root.is_class:
            trivial = Rule(1, 1, ((0, 0, self.root),))
            return sorted({r for r in self.out if r != trivial}, key=Rule.key)
        return sorted(set(self.out), key=Rule.key)

    def _fill(self, t: int, u: int, skel: list[tuple[int, int]]):
        d = self.d
        p = len(skel)
        if p > 0:
            base = Grid(skel, [], t, u)
            seen = set()
            for q in base.gridded(p):
                if q in seen:
                    return
                seen.add(q)
            base_perms = seen
        else:
            base_perms = {()}
        skel_set = set(skel)
        if p == d or p == t * u:
            rule = Rule(t, u, tuple((x, y, POINT_BLOCK) for x, y in sorted(skel)))
            if rule.is_normal():
                self._emit(rule)
            return
        free = [(x, y) for x in range(t) for y in range(u) if (x, y) not in skel_set]
        # single-point signatures of free cells
        sigs = {}
        allowed = []
        for c in free:
            g = Grid(skel + [c], [], t, u)
            sig = set()
            ok = True
            for q in g.gridded(p + 1):
                if q in sig or q not in self.avset:
                    ok = False
                    break
                sig.add(q)
            if ok:
                sigs[c] = sig
                allowed.append(c)
        allowed_set = set(allowed)
        conflicts = {c: set() for c in allowed}
        for c1, c2 in itertools.combinations(allowed, 2):
            if sigs[c1] & sigs[c2]:
                conflicts[c1].add(c2)
                conflicts[c2].add(c1)
        # quick normal-form feasibility: every column and row must be reachable
        for x in range(t):
            if not any(c[0] == x for c in skel) and not any(c[0] == x for c in allowed):
                return
        for y in range(u):
            if not any(c[1] == y for c in skel) and not any(c[1] == y for c in allowed):
                return
        reps = self.representatives(d - p)
        point_cells = list(skel)
        order = [c for c in free if c in allowed_set]
        self._dfs(t, u, skel, point_cells, order, 0, [], base_perms, conflicts, reps)

    def _dfs(self, t, u, skel, point_cells, order, i, placed, perms, conflicts, reps):
        self._tick()
        if i == len(order):
            rule_cells = [(x, y, POINT_BLOCK) for x, y in skel] + [(c[0], c[1], b) for c, b in placed]
            cols = {x for x, _, _ in rule_cells}
            rows = {y for _, y, _ in rule_cells}
            if len(cols) == t and len(rows) == u:
                self._emit(Rule(t, u, tuple(sorted(rule_cells, key=lambda c: c[:2]))))
            return
        c = order[i]
        # columns strictly left of c are final: prune an empty one
        if i > 0 and order[i - 1][0] < c[0]:
            if not self._columns_ok(order[i - 1][0], c[0], skel, placed):
                return
        # option: leave c empty
        self._dfs(t, u, skel, point_cells, order, i + 1, placed, perms, conflicts, reps)
        if any(pc in conflicts[c] for pc, _ in placed):
            return
        n_pts = len(skel)
        dead: set[Block] = set()
        for blk in reps:
            if blk in dead:
                continue
            if not self._compatible(c, blk, skel, placed, n_pts):
                dead.update(self.supersets[blk])
                continue
            new = self._extend(t, u, skel, placed, c, blk, perms)
            if new is None:
                dead.update(self.supersets[blk])
                continue
            self._dfs(t, u, skel, point_cells, order, i + 1, placed + [(c, blk)], new, conflicts, reps)

    def _columns_ok(self, x_from, x_to, skel, placed):
        for x in range(x_from, x_to):
            if not any(c[0] == x for c in skel) and not any(c[0] == x for c, _ in placed):
                return False
        return True

    def _compatible(self, c, blk, skel, placed, n_pts) -> bool:
        d = self.d
        for other, ob in [(s, POINT_BLOCK) for s in skel] + placed:
            o, swapped = _orientation(other, c)
            a, b = (blk, ob) if swapped else (ob, blk)
            m = self.compat.fail_length(a, b, o)
            if m is None:
                continue
            others = n_pts - (1 if ob.is_point else 0)
            if m + others <= d:
                return False
        return True

    def _extend(self, t, u, skel, placed, c, blk, perms):
        classes = [(pc, self.levels[pb]) for pc, pb in placed] + [(c, self.levels[blk])]
        g = Grid(skel, classes, t, u)
        new_idx = len(classes) - 1
        fresh = set()
        avset = self.avset
        for m in range(len(skel) + 1, self.d + 1):
            for q in g.gridded(m, nonempty=(new_idx,)):
                if q not in avset or q in perms or q in fresh:
                    return None
                fresh.add(q)
        return perms | fresh


def generate_rules(
    basis: Basis,
    blocks: Optional[BlockSet] = None,
    poset: Optional[BlockPoset] = None,
    cfg: Optional[GenConfig] = None,
) -> list[Rule]:
    """All unique-gridding rules within the configured dimensions whose permutations up
    to the validity depth are unique-gridded members of ``Av(basis)``.

    The 1x1 rule holding the whole class is left out.  Raises
    :class:`BudgetExceeded` (carrying the rules found so far) when a budget runs out.
    """
    cfg = cfg or GenConfig.default(basis)
    blocks = blocks or block_set(basis)
    poset = poset or build_poset(blocks)
    return _Search(basis, blocks, poset, cfg).run()


def naive_rules(basis: Basis, blocks: Optional[BlockSet] = None, cfg: Optional[GenConfig] = None) -> list[Rule]:
    """Reference generator: every matrix over the block set, filtered by the
    validity checks and the output conventions of :func:`generate_rules`."""
    cfg = cfg or GenConfig.default(basis)
    blocks = blocks or block_set(basis)
    d = cfg.depth
    avset = set(avoiders(basis, d))
    contents = [POINT_BLOCK] + blocks.class_blocks
    levels = {b: b.levels(d) for b in blocks.class_blocks}
    root = Block.of(basis)
    search = _Search(basis, blocks, build_poset(blocks), cfg)
    reps = {p: set(search.representatives(d - p)) for p in range(d)}
    out = {EMPTY_RULE}
    for t in range(1, cfg.max_width + 1):
        for u in range(1, cfg.max_height + 1):
            cells = [(x, y) for x in range(t) for y in range(u)]
            for mask in range(1, 1 << len(cells)):
                support = [c for i, c in enumerate(cells) if mask >> i & 1]
                if {x for x, _ in support} != set(range(t)) or {y for _, y in support} != set(range(u)):
                    continue
                for choice in itertools.product(contents, repeat=len(support)):
                    pts = [c for c, b in zip(support, choice) if b.is_point]
                    p = len(pts)
                    classes = [(c, b) for c, b in zip(support, choice) if b.is_class]
                    if p > d or (classes and (p >= d or any(b not in reps[p] for _, b in classes))):
                        continue
                    if t == u == 1 and choice[0] == root:
                        continue
                    g = Grid(pts, [(c, levels[b]) for c, b in classes], t, u)
                    if _valid(g, d, avset):
                        out.add(Rule(t, u, tuple((c[0], c[1], b) for c, b in zip(support, choice))))
    return sorted(out, key=Rule.key)


def _valid(g: Grid, depth: int, avset) -> bool:
    """Unique griddings and avoidance for every length up to ``depth``."""
    for m in range(depth + 1):
        seen = set()
        for q in g.gridded(m):
            if q in seen or q not in avset:
                return False
            seen.add(q)
    return True


def rule_variants(rule: Rule, blocks: BlockSet, depth: int) -> list[Rule]:
    """Rules obtained by swapping class blocks for blocks with the same
    members up to the length a cell can reach at ``depth``; ``rule`` first."""
    room = depth - rule.n_points
    if room < 1 or not rule.class_cells:
        return [rule]

    def sig(b: Block):
        return tuple(tuple(level) for level in b.levels(room))

    groups: dict[tuple, list[Block]] = {}
    for b in sorted(blocks.class_blocks, key=Block.key):
        groups.setdefault(sig(b), []).append(b)
    choices = []
    for x, y, b in rule.cells:
        if b.is_class:
            alts = groups.get(sig(b), [b])
            choices.append([b] + [a for a in alts if a != b])
        else:
            choices.append([b])
    out = []
    for combo in itertools.product(*choices):
        out.append(Rule(rule.t, rule.u, tuple((x, y, b) for (x, y, _), b in zip(rule.cells, combo))))
    return out
