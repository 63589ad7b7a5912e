"""Exact minimal disjoint covers of ``Av_{<=d}(B)`` by rule sets."""

from __future__ import annotations

import json
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .perms import Basis, Perm, avoiders
from .rules import EMPTY_RULE, Grid, Rule, generated_set, rule_subset_certified


class CoverSearchUnknown(RuntimeError):
    """The search ran out of budget before deciding whether a cover exists."""

    def __init__(self, message: str, nodes: int):
        super().__init__(message)
        self.nodes = nodes


@dataclass
class CoverInstance:
    basis: Basis
    depth: int
    universe: list[tuple]
    rules: list[Rule]
    bitsets: list[int]

    @property
    def full_mask(self) -> int:
        return (1 << len(self.universe)) - 1

    def members(self, i: int) -> list[tuple]:
        bits = self.bitsets[i]
        return [p for j, p in enumerate(self.universe) if bits >> j & 1]

    def distinct(self) -> tuple[list[int], dict[int, list[int]]]:
        """Indices of one rule per distinct bitset (the first in canonical
        order), and for each such index the list of all rules sharing its bitset."""
        first: dict[int, int] = {}
        groups: dict[int, list[int]] = {}
        for i in sorted(range(len(self.rules)), key=lambda i: self.rules[i].key()):
            b = self.bitsets[i]
            if b not in first:
                first[b] = i
                groups[i] = []
            groups[first[b]].append(i)
        reps = sorted(groups, key=lambda i: self.rules[i].key())
        return reps, groups


def build_instance(basis: Basis, rules: Sequence[Rule], depth: int) -> CoverInstance:
    """Universe ``Av_{<=depth}(basis)`` (ε included) and one bitset per rule.

    The empty rule is always added as a candidate."""
    av = avoiders(basis, depth)
    universe = list(av)
    index = {p: i for i, p in enumerate(universe)}
    rules = list(dict.fromkeys(rules))
    if EMPTY_RULE not in rules and () in index:
        rules.append(EMPTY_RULE)
    bitsets = []
    for r in rules:
        bits = 0
        for p in generated_set(r, depth):
            if p not in index:
                raise ValueError(f"rule {r} generates {Perm(p)} outside the class")
            bits |= 1 << index[p]
        bitsets.append(bits)
    return CoverInstance(basis, depth, universe, rules, bitsets)


@dataclass
class Cover:
    basis: Basis
    rules: list[Rule]
    depth_solved: int
    depth_verified: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "basis": str(self.basis),
            "depth_solved": self.depth_solved,
            "depth_verified": self.depth_verified,
            "rules": [r.to_dict() for r in self.rules],
        }

    def to_json(self, indent: Optional[int] = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "Cover":
        return cls(
            Basis.parse(data["basis"]),
            [Rule.from_dict(r) for r in data["rules"]],
            int(data["depth_solved"]),
            data.get("depth_verified"),
        )

    @classmethod
    def from_json(cls, text: str) -> "Cover":
        return cls.from_dict(json.loads(text))

    @property
    def max_dimension(self) -> int:
        return max((max(r.t, r.u) for r in self.rules), default=0)

    def __len__(self) -> int:
        return len(self.rules)


# ---------------------------------------------------------------------------
# exact cover search


class _Solver:
    """Column-selection exact cover over Python-int bitsets.

    Candidates are indexed ``0..k-1``; ``conflicts[c]`` is the bitset of
    candidates sharing an element with ``c`` (``c`` included) and
    ``holders[e]`` the bitset of candidates containing element ``e``."""

    def __init__(self, sets: Sequence[int], nelems: int, node_budget=None, time_limit=None):
        self.sets = list(sets)
        self.nelems = nelems
        self.full = (1 << nelems) - 1
        self.holders = [0] * nelems
        for c, s in enumerate(self.sets):
            e = s
            while e:
                low = e & -e
                self.holders[low.bit_length() - 1] |= 1 << c
                e ^= low
        self.conflicts = []
        for c, s in enumerate(self.sets):
            m = 0
            e = s
            while e:
                low = e & -e
                m |= self.holders[low.bit_length() - 1]
                e ^= low
            self.conflicts.append(m | (1 << c))
        self.nodes = 0
        self.node_budget = node_budget
        self.deadline = None if time_limit is None else time.monotonic() + time_limit

    def _tick(self):
        self.nodes += 1
        if self.node_budget is not None and self.nodes > self.node_budget:
            raise CoverSearchUnknown("node budget exceeded", self.nodes)
        if self.deadline is not None and not self.nodes & 0xFF and time.monotonic() > self.deadline:
            raise CoverSearchUnknown("time budget exceeded", self.nodes)

    def covers_of_size(self, k: int) -> Iterator[list[int]]:
        """All exact covers using exactly ``k`` candidates, in canonical order."""
        alive = (1 << len(self.sets)) - 1
        # empty candidate sets never help an exact cover
        for c, s in enumerate(self.sets):
            if not s:
                alive &= ~(1 << c)
        yield from self._search(0, alive, k, [])

    def _search(self, covered: int, alive: int, left: int, chosen: list[int]):
        self._tick()
        if covered == self.full:
            if left == 0:
                yield sorted(chosen)
            return
        if left == 0:
            return
        # pick the uncovered element with fewest live candidates
        best, best_count = -1, None
        rest = self.full & ~covered
        while rest:
            low = rest & -rest
            e = low.bit_length() - 1
            rest ^= low
            n = (alive & self.holders[e]).bit_count()
            if best_count is None or n < best_count:
                best, best_count = e, n
                if n <= 1:
                    break
        if not best_count:
            return
        opts = alive & self.holders[best]
        while opts:
            low = opts & -opts
            c = low.bit_length() - 1
            opts ^= low
            chosen.append(c)
            yield from self._search(covered | self.sets[c], alive & ~self.conflicts[c], left - 1, chosen)
            chosen.pop()


def iter_covers(
    inst: CoverInstance,
    max_size: Optional[int] = None,
    node_budget: Optional[int] = None,
    time_limit: Optional[float] = None,
) -> Iterator[list[int]]:
    """Exact covers in increasing size (iterative deepening), each as a sorted
    list of rule indices.  Rules with identical bitsets are represented once,
    by the first rule in canonical order."""
    reps, _ = inst.distinct()
    order = sorted(reps, key=lambda i: inst.rules[i].key())
    solver = _Solver([inst.bitsets[i] for i in order], len(inst.universe), node_budget, time_limit)
    limit = len(order) if max_size is None else min(max_size, len(order))
    for k in range(1, limit + 1):
        for sol in solver.covers_of_size(k):
            yield sorted((order[c] for c in sol), key=lambda i: inst.rules[i].key())


def solve_min_cover(
    inst: CoverInstance,
    max_size: Optional[int] = None,
    node_budget: Optional[int] = None,
    time_limit: Optional[float] = None,
) -> Optional[Cover]:
    """A smallest exact partition of the universe by candidate sets, or ``None``.

    Raises :class:`CoverSearchUnknown` when a budget runs out first."""
    for sol in iter_covers(inst, max_size, node_budget, time_limit):
        return Cover(inst.basis, [inst.rules[i] for i in sol], inst.depth)
    return None


def is_partition(inst: CoverInstance, indices: Sequence[int]) -> bool:
    acc = 0
    for i in indices:
        if acc & inst.bitsets[i]:
            return False
        acc |= inst.bitsets[i]
    return acc == inst.full_mask


# ---------------------------------------------------------------------------
# verification


@dataclass
class VerificationReport:
    depth: int
    missing: list[tuple] = field(default_factory=list)
    duplicated: list[tuple] = field(default_factory=list)
    outside: list[tuple] = field(default_factory=list)
    subset_certified: bool = False

    @property
    def ok(self) -> bool:
        return not (self.missing or self.duplicated or self.outside)

    def summary(self) -> str:
        if not self.ok:
            parts = []
            for label, items in (("missing", self.missing), ("duplicated", self.duplicated), ("outside", self.outside)):
                if items:
                    parts.append(f"{label}: " + ", ".join(str(Perm(p)) for p in items[:5]))
            return f"FAILED at length <= {self.depth}; " + "; ".join(parts)
        text = f"verified to length {self.depth}"
        if self.subset_certified:
            text += "; containment in the class certified"
        return text


def verify_cover(cover: Cover, depth: int) -> VerificationReport:
    """Regenerate every rule to ``depth`` and compare with the avoiders.

    Witnesses are permutations missing from the union, generated more than
    once (by two rules or two griddings), or lying outside the class."""
    av = avoiders(cover.basis, depth)
    report = VerificationReport(depth)
    grids = [Grid.of(r, depth) for r in cover.rules]
    for m in range(depth + 1):
        seen = Counter()
        for g in grids:
            seen.update(g.gridded(m))
        level = av.of_length(m)
        report.missing.extend(p for p in level if p not in seen)
        report.duplicated.extend(sorted(p for p, c in seen.items() if c > 1))
        report.outside.extend(sorted(p for p in seen if p not in av))
    report.subset_certified = all(rule_subset_certified(r, cover.basis) for r in cover.rules)
    return report


# ---------------------------------------------------------------------------
# CNF export


def export_cnf(inst: CoverInstance) -> str:
    """DIMACS text whose models are exactly the exact covers of the instance.

    Variable ``i + 1`` selects rule ``i``; every universe element gets one
    at-least-one clause and pairwise at-most-one clauses."""
    clauses: list[list[int]] = []
    for j in range(len(inst.universe)):
        holders = [i + 1 for i, b in enumerate(inst.bitsets) if b >> j & 1]
        clauses.append(holders)
        for a in range(len(holders)):
            for b in range(a + 1, len(holders)):
                clauses.append([-holders[a], -holders[b]])
    lines = [f"c basis {inst.basis}", f"c depth {inst.depth}"]
    lines += [f"c var {i + 1} {r}" for i, r in enumerate(inst.rules)]
    lines.append(f"p cnf {len(inst.rules)} {len(clauses)}")
    lines += [" ".join(map(str, c + [0])) for c in clauses]
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> tuple[int, list[list[int]]]:
    nvars, clauses = 0, []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            nvars = int(line.split()[2])
            continue
        lits = [int(x) for x in line.split()]
        clauses.append(lits[:-1])
    return nvars, clauses
