"""Counting sequences, functional equations and uniform sampling from covers."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterator, Mapping, Optional, Sequence

from .blocks import Block
from .cover import Cover
from .perms import Basis, Perm, avoiders, canonical_basis
from .rules import _shuffles, assemble, count_rule, line_members, size_assignment_terms, Rule


class RecursionNotWellFounded(ValueError):
    pass


@dataclass
class CountingSequence:
    terms: list[int]

    def __getitem__(self, n):
        return self.terms[n]

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __eq__(self, other):
        if isinstance(other, CountingSequence):
            return self.terms == other.terms
        return list(self.terms) == list(other)

    def to_json(self) -> str:
        return json.dumps(self.terms)

    def comma_line(self) -> str:
        return ", ".join(map(str, self.terms))


class ClassRegistry:
    """Counting data for classes, keyed by canonical basis.

    A class with a registered cover is counted through it; anything else is
    counted by generating its avoiders."""

    def __init__(self, covers: Sequence[Cover] = ()):
        self.covers: dict[Basis, Cover] = {}
        self._counts: dict[Basis, list[int]] = {}
        self._active: set[Basis] = set()
        for c in covers:
            self.register(c)

    def register(self, cover: Cover) -> None:
        key = canonical_basis(cover.basis)
        self.covers[key] = cover
        self._counts.pop(key, None)

    def cover_for(self, basis: Basis) -> Optional[Cover]:
        return self.covers.get(canonical_basis(basis))

    def counts(self, block: Block, n: int) -> list[int]:
        """Counts of ``block`` for lengths ``0..n``."""
        if block.kind == "empty":
            return [1] + [0] * n
        if block.is_point:
            return [0, 1][: n + 1] + [0] * max(0, n - 1)
        key = canonical_basis(block.basis)
        have = self._counts.get(key)
        if have is not None and len(have) > n:
            return have[: n + 1]
        cover = self.covers.get(key)
        if cover is not None:
            if key in self._active:
                raise RecursionNotWellFounded(f"cyclic dependency through {key}")
            self._active.add(key)
            try:
                seq = counting_sequence(cover, n, self).terms
            finally:
                self._active.discard(key)
        else:
            seq = avoiders(block.basis, n).counts
        self._counts[key] = list(seq)
        return list(seq)


def _root_equivalent(cover: Cover, block: Block) -> bool:
    return block.is_class and canonical_basis(block.basis) == canonical_basis(cover.basis)


def _check_wellfounded(cover: Cover) -> None:
    for r in cover.rules:
        if any(_root_equivalent(cover, b) for _, _, b in r.class_cells) and r.n_points == 0:
            raise RecursionNotWellFounded(f"rule {r} contains the class itself but no point")


def counting_sequence(cover: Cover, N: int, reg: Optional[ClassRegistry] = None) -> CountingSequence:
    """``a_0..a_N`` as the sum of rule counts, computed by increasing length."""
    reg = reg or ClassRegistry()
    _check_wellfounded(cover)
    blocks = {b for r in cover.rules for _, _, b in r.class_cells}
    own = [b for b in blocks if _root_equivalent(cover, b)]
    table = {b: reg.counts(b, N) for b in blocks if b not in own}
    terms: list[int] = []
    for n in range(N + 1):
        for b in own:
            table[b] = terms
        terms.append(sum(count_rule(r, n, table) for r in cover.rules))
    return CountingSequence(terms)


# ---------------------------------------------------------------------------
# generating-function terms


@dataclass(frozen=True)
class XPower:
    power: int


@dataclass(frozen=True)
class ClassSeries:
    block: Block
    name: str


@dataclass(frozen=True)
class MonotoneLine:
    """``p! x^p / (1 - m x)^(p+1)``: ``m`` monotone cells and ``p`` points on one line."""

    m: int
    p: int


@dataclass(frozen=True)
class PointClassLine:
    """``x^p (d/dx)^p (x^p C(x))``: one class cell and ``p`` points on one line."""

    block: Block
    name: str
    p: int


@dataclass(frozen=True)
class ExplicitSum:
    """No closed form; the coefficient is the rule's size-assignment sum."""


Factor = object


def _sup(k: int) -> str:
    return "" if k == 1 else str(k).translate(str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹"))


@dataclass
class GFTerm:
    rule: Optional[Rule]
    factors: list = field(default_factory=list)

    @property
    def explicit(self) -> bool:
        return any(isinstance(f, ExplicitSum) for f in self.factors)

    def shape(self) -> tuple:
        """Order-independent description used for structural comparison."""
        if self.explicit:
            return ("explicit", str(self.rule))
        coef, xp, names, dens, derivs = self._collect()
        return (coef, xp, tuple(sorted(names)), tuple(sorted(dens)), tuple(sorted(derivs)))

    def _collect(self):
        coef, xp, names, dens, derivs = 1, 0, [], [], []
        for f in self.factors:
            if isinstance(f, XPower):
                xp += f.power
            elif isinstance(f, ClassSeries):
                names.append(f.name)
            elif isinstance(f, MonotoneLine):
                coef *= factorial(f.p)
                xp += f.p
                if f.m:
                    dens.append((f.m, f.p + 1))
            elif isinstance(f, PointClassLine):
                xp += f.p
                derivs.append((f.name, f.p))
        return coef, xp, names, dens, derivs

    def render(self) -> str:
        if self.explicit:
            return f"Σ[{self.rule}]"
        coef, xp, names, dens, derivs = self._collect()
        parts = []
        if coef != 1:
            parts.append(str(coef))
        if xp:
            parts.append("x" + _sup(xp))
        parts.extend(names)
        for name, p in derivs:
            inner = "x" + _sup(p) + "·" + name
            parts.append(("∂" + _sup(p)) + "(" + inner + ")")
        text = "·".join(parts) if parts else "1"
        for m, e in dens:
            base = "(1−x)" if m == 1 else f"(1−{m}x)"
            text += "/" + base + _sup(e)
        return text


@dataclass
class EquationSystem:
    equations: dict[str, list[GFTerm]]
    external: dict[str, Block]
    root: str

    def render(self) -> str:
        lines = []
        for name, terms in self.equations.items():
            lines.append(f"{name} = " + " + ".join(t.render() for t in terms))
        return "\n".join(lines)

    def shape(self, name: Optional[str] = None) -> list:
        return sorted((t.shape() for t in self.equations[name or self.root]), key=repr)


_MONOTONE = {Basis.parse("12"), Basis.parse("21")}


def is_monotone(b: Block) -> bool:
    return b.is_class and b.basis in _MONOTONE


def default_names(cover: Cover, root_name: str = "A") -> dict[Block, str]:
    names: dict[Block, str] = {}
    root = Block.of(cover.basis)
    names[root] = root_name
    fixed = {Block.of("12"): "D", Block.of("21"): "I"}
    i = 0
    for r in cover.rules:
        for _, _, b in r.class_cells:
            if b in names:
                continue
            if b in fixed and fixed[b] not in names.values():
                names[b] = fixed[b]
            else:
                i += 1
                names[b] = f"B{i}"
    return names


def rule_term(rule: Rule, names: Mapping[Block, str]) -> GFTerm:
    """Factor ``rule`` into line groups and give each its closed form when one exists."""
    cells = list(rule.cells)
    if not cells:
        return GFTerm(rule, [])
    # connected components under sharing a row or column
    parent = list(range(len(cells)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(cells)):
        for j in range(i + 1, len(cells)):
            if cells[i][0] == cells[j][0] or cells[i][1] == cells[j][1]:
                parent[find(i)] = find(j)
    groups: dict[int, list] = {}
    for i, c in enumerate(cells):
        groups.setdefault(find(i), []).append(c)
    factors = []
    points = 0
    for members in groups.values():
        if len(members) == 1:
            x, y, b = members[0]
            if b.is_point:
                points += 1
            else:
                factors.append(ClassSeries(b, names[b]))
            continue
        on_line = len({c[0] for c in members}) == 1 or len({c[1] for c in members}) == 1
        if not on_line:
            return GFTerm(rule, [ExplicitSum()])
        p = sum(1 for c in members if c[2].is_point)
        classes = [c[2] for c in members if c[2].is_class]
        if all(is_monotone(b) for b in classes):
            factors.append(MonotoneLine(len(classes), p))
        elif len(classes) == 1:
            factors.append(PointClassLine(classes[0], names[classes[0]], p))
        else:
            return GFTerm(rule, [ExplicitSum()])
    if points:
        factors.insert(0, XPower(points))
    return GFTerm(rule, factors)


def functional_equations(
    cover: Cover,
    reg: Optional[ClassRegistry] = None,
    names: Optional[Mapping[Block, str]] = None,
    root_name: str = "A",
) -> EquationSystem:
    """One equation for the cover's class, plus one for every other class in
    its cells that has a registered cover; remaining classes are external."""
    reg = reg or ClassRegistry()
    all_names = default_names(cover, root_name)
    if names:
        all_names.update(names)
    root = Block.of(cover.basis)
    equations: dict[str, list[GFTerm]] = {}
    external: dict[str, Block] = {}
    todo = [(root, cover)]
    done = set()
    while todo:
        blk, cov = todo.pop(0)
        key = canonical_basis(cov.basis)
        if key in done:
            continue
        done.add(key)
        for r in cov.rules:
            for _, _, b in r.class_cells:
                if b not in all_names:
                    all_names[b] = f"B{len(all_names)}"
        equations[all_names[blk]] = [rule_term(r, all_names) for r in cov.rules]
        for r in cov.rules:
            for _, _, b in r.class_cells:
                bkey = canonical_basis(b.basis)
                if bkey in done or bkey == key:
                    continue
                sub = reg.covers.get(bkey)
                if sub is not None and sub.basis == b.basis:
                    todo.append((b, sub))
                elif all_names[b] not in equations:
                    external[all_names[b]] = b
    for name in list(external):
        if name in equations:
            del external[name]
    return EquationSystem(equations, external, all_names[root])


def _series_product(a: list[int], b: list[int], n: int) -> list[int]:
    out = [0] * (n + 1)
    for i, x in enumerate(a[: n + 1]):
        if x:
            for j, y in enumerate(b[: n + 1 - i]):
                out[i + j] += x * y
    return out


def _factor_series(f, n: int, counts) -> list[int]:
    if isinstance(f, XPower):
        return [1 if k == f.power else 0 for k in range(n + 1)]
    if isinstance(f, ClassSeries):
        return list(counts(f.block, n))
    if isinstance(f, MonotoneLine):
        # coefficient of x^(k+p) is (k+p)!/k! * m^k
        out = [0] * (n + 1)
        for k in range(0, n - f.p + 1):
            out[k + f.p] = factorial(k + f.p) // factorial(k) * f.m**k
        return out
    if isinstance(f, PointClassLine):
        c = counts(f.block, n)
        out = [0] * (n + 1)
        for k in range(0, n - f.p + 1):
            out[k + f.p] = c[k] * factorial(k + f.p) // factorial(k)
        return out
    raise TypeError(f"unknown factor {f!r}")


def evaluate_term_numeric(
    term: GFTerm, n: int, reg: Optional[ClassRegistry] = None, overrides: Optional[Mapping[Block, Sequence[int]]] = None
) -> int:
    """Coefficient of ``x^n`` in ``term``.  ``overrides`` supplies counting
    sequences for particular blocks (such as the class being defined)."""
    reg = reg or ClassRegistry()
    overrides = overrides or {}

    def counts(b: Block, m: int):
        if b in overrides:
            return list(overrides[b][: m + 1]) + [0] * max(0, m + 1 - len(overrides[b]))
        return reg.counts(b, m)

    if term.explicit:
        table = {b: counts(b, n) for _, _, b in term.rule.class_cells}
        return count_rule(term.rule, n, table)
    series = [1] + [0] * n
    for f in term.factors:
        series = _series_product(series, _factor_series(f, n, counts), n)
    return series[n]


# ---------------------------------------------------------------------------
# uniform sampling


class EmptyClassError(ValueError):
    pass


class _SamplingTree:
    """The choices made when drawing a uniform member of length ``n``.

    Every choice is an integer-weighted option list; the random sampler
    draws from these lists and :func:`exact_distribution` walks all of them."""

    def __init__(self, cover: Cover, N: int, reg: ClassRegistry):
        self.cover = cover
        self.reg = reg
        self.seq = counting_sequence(cover, N, reg).terms
        blocks = {b for r in cover.rules for _, _, b in r.class_cells}
        self.root = Block.of(cover.basis)
        self.table = {}
        for b in blocks:
            if b == self.root:
                self.table[b] = self.seq
            elif _root_equivalent(cover, b):
                self.table[b] = self.seq
            else:
                self.table[b] = reg.counts(b, N)

    def rule_options(self, n: int):
        return [(r, count_rule(r, n, self.table)) for r in self.cover.rules]

    def size_options(self, rule: Rule, n: int):
        return list(size_assignment_terms(rule, n, self.table))

    def content_options(self, block: Block, k: int):
        """Options for a non-recursive block: every member, weight 1."""
        return [(p, 1) for p in avoiders(block.basis, k).of_length(k)]

    def word_options(self, members):
        counts = tuple(s for _, s in members)
        ids = [cid for cid, _ in members]
        return [(tuple(ids[letter] for letter in w), 1) for w in _shuffles(counts)]


def _pick(rng: random.Random, options):
    total = sum(w for _, w in options)
    if total <= 0:
        raise EmptyClassError("nothing to choose from")
    r = rng.randrange(total)
    acc = 0
    for opt, w in options:
        acc += w
        if r < acc:
            return opt
    raise AssertionError("unreachable")


def _draw(tree: _SamplingTree, n: int, rng: random.Random) -> tuple:
    if tree.seq[n] == 0:
        raise EmptyClassError(f"the class has no members of length {n}")
    rule = _pick(rng, tree.rule_options(n))
    sizes = _pick(rng, tree.size_options(rule, n))
    contents = {}
    it = iter(sizes)
    for i, (x, y, b) in enumerate(rule.cells):
        if b.is_point:
            continue
        s = next(it)
        if not s:
            continue
        if b == tree.root:
            contents[i] = _draw(tree, s, rng)
        else:
            # members of a non-recursive block are drawn uniformly by index
            level = avoiders(b.basis, s).of_length(s)
            contents[i] = level[rng.randrange(len(level))]
    cols, rows = line_members(rule, sizes)
    col_words = {x: _word(rng, m) for x, m in cols.items()}
    row_words = {y: _word(rng, m) for y, m in rows.items()}
    return assemble(rule, sizes, contents, col_words, row_words)


def _word(rng: random.Random, members) -> tuple:
    letters = [cid for cid, s in members for _ in range(s)]
    rng.shuffle(letters)
    return tuple(letters)


def sample_uniform(
    cover: Cover, n: int, seed: int = 0, count: int = 1, reg: Optional[ClassRegistry] = None
) -> list[Perm]:
    """``count`` independent uniform members of length ``n``; deterministic in ``seed``."""
    reg = reg or ClassRegistry()
    tree = _SamplingTree(cover, n, reg)
    rng = random.Random(seed)
    return [Perm(_draw(tree, n, rng), check=False) for _ in range(count)]


def exact_distribution(cover: Cover, n: int, reg: Optional[ClassRegistry] = None) -> dict[tuple, Fraction]:
    """Probability of each permutation under the sampler, by walking every
    branch of the sampling tree with exact fractions.  A shuffled column or
    row is uniform over the distinct words of its multiset."""
    reg = reg or ClassRegistry()
    tree = _SamplingTree(cover, n, reg)
    memo: dict[int, dict[tuple, Fraction]] = {}

    def dist(m: int) -> dict[tuple, Fraction]:
        if m in memo:
            return memo[m]
        out: dict[tuple, Fraction] = {}
        ropts = tree.rule_options(m)
        rtotal = sum(w for _, w in ropts)
        for rule, rw in ropts:
            if not rw:
                continue
            sopts = tree.size_options(rule, m)
            stotal = sum(w for _, w in sopts)
            for sizes, sw in sopts:
                p0 = Fraction(rw, rtotal) * Fraction(sw, stotal)
                content_choices = []
                it = iter(sizes)
                for i, (x, y, b) in enumerate(rule.cells):
                    if b.is_point:
                        continue
                    s = next(it)
                    if not s:
                        continue
                    if b == tree.root:
                        content_choices.append([(i, p, q) for p, q in dist(s).items()])
                    else:
                        level = avoiders(b.basis, s).of_length(s)
                        content_choices.append([(i, p, Fraction(1, len(level))) for p in level])
                cols, rows = line_members(rule, sizes)
                col_opts = [(x, tree.word_options(mem)) for x, mem in cols.items()]
                row_opts = [(y, tree.word_options(mem)) for y, mem in rows.items()]
                for contents in _product(content_choices):
                    pc = p0
                    cmap = {}
                    for i, p, q in contents:
                        pc *= q
                        cmap[i] = p
                    for cw in _product([[(x, w) for w, _ in opts] for x, opts in col_opts]):
                        pcw = pc
                        for _, opts in col_opts:
                            pcw /= len(opts)
                        for rw_ in _product([[(y, w) for w, _ in opts] for y, opts in row_opts]):
                            prw = pcw
                            for _, opts in row_opts:
                                prw /= len(opts)
                            perm = assemble(rule, sizes, cmap, dict(cw), dict(rw_))
                            out[perm] = out.get(perm, Fraction(0)) + prw
        memo[m] = out
        return out

    return dist(n)


def _product(lists) -> Iterator[list]:
    if not lists:
        yield []
        return
    head, rest = lists[0], lists[1:]
    for item in head:
        for tail in _product(rest):
            yield [item] + tail
