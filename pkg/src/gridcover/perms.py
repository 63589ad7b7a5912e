"""Permutations, pattern containment and avoidance classes.

Permutations are stored as tuples of 1-based values.  :class:`Perm` is a thin
tuple subclass, so plain tuples and ``Perm`` objects hash and compare equal and
can be mixed freely inside sets and dicts.  The hot loops elsewhere in the
package work on raw tuples for speed.
"""

from __future__ import annotations

import itertools
import re
from typing import Iterable, Sequence

MAX_LENGTH = 16
MAX_BURNSIDE_LENGTH = 6


class Perm(tuple):
    """A permutation of ``1..n`` written in one-line notation."""

    __slots__ = ()

    def __new__(cls, values: Iterable[int] | str = (), check: bool = True):
        if isinstance(values, str):
            return cls.parse(values)
        values = tuple(values)
        if check:
            n = len(values)
            if n > MAX_LENGTH:
                raise ValueError(f"permutation length {n} exceeds maximum {MAX_LENGTH}")
            if sorted(values) != list(range(1, n + 1)):
                raise ValueError(f"{values!r} is not a permutation of 1..{n}")
        return super().__new__(cls, values)

    @classmethod
    def parse(cls, text: str) -> "Perm":
        """Parse ``"231"``, ``"[10,2,1,...]"`` or ``"e"``/``""`` for the empty permutation."""
        text = text.strip()
        if text in ("", "e", "eps", "ε"):
            return cls(())
        if text.startswith("["):
            if not text.endswith("]"):
                raise ValueError(f"unterminated pattern literal {text!r}")
            inner = text[1:-1].strip()
            return cls(int(tok) for tok in inner.split(",")) if inner else cls(())
        if not text.isdigit():
            raise ValueError(f"invalid pattern literal {text!r}")
        return cls(int(ch) for ch in text)

    def __str__(self) -> str:
        if not self:
            return "ε"
        if len(self) <= 9:
            return "".join(map(str, self))
        return "[" + ",".join(map(str, self)) + "]"

    def __repr__(self) -> str:
        return f"Perm({str(self)!r})"

    def sort_key(self) -> tuple:
        return (len(self), tuple(self))

    def literal(self) -> str:
        """Round-trippable text form (``e`` for the empty permutation)."""
        return "e" if not self else str(self)


def perm_key(p: Sequence[int]) -> tuple:
    """Canonical order: by length, then lexicographic."""
    return (len(p), tuple(p))


def standardize(word: Sequence) -> Perm:
    """Return the permutation order isomorphic to ``word`` (keys must be distinct)."""
    if len(set(word)) != len(word):
        raise ValueError("standardize needs pairwise distinct keys")
    return Perm(_std(word), check=False)


def _std(word: Sequence) -> tuple:
    order = sorted(range(len(word)), key=word.__getitem__)
    out = [0] * len(word)
    for rank, idx in enumerate(order, 1):
        out[idx] = rank
    return tuple(out)


def _pattern_plan(pattern: Sequence[int]):
    """For each pattern position, the earlier positions holding the closest
    smaller and closest larger values (or -1)."""
    plan = []
    for i, v in enumerate(pattern):
        lo = hi = -1
        lo_v, hi_v = 0, len(pattern) + 1
        for j in range(i):
            w = pattern[j]
            if lo_v < w < v:
                lo, lo_v = j, w
            elif v < w < hi_v:
                hi, hi_v = j, w
        plan.append((lo, hi))
    return plan


def contains(pattern: Sequence[int], host: Sequence[int]) -> bool:
    """True iff some subsequence of ``host`` is order isomorphic to ``pattern``."""
    k, n = len(pattern), len(host)
    if k > n:
        return False
    if k == 0:
        return True
    if k == n:
        return tuple(pattern) == tuple(_std(host)) if len(set(host)) == n else False
    plan = _pattern_plan(pattern)
    chosen = [0] * k

    def search(i: int, start: int) -> bool:
        if i == k:
            return True
        lo, hi = plan[i]
        lo_v = host[chosen[lo]] if lo >= 0 else -1
        hi_v = host[chosen[hi]] if hi >= 0 else n + 2
        # leave room for the remaining k - i - 1 pattern letters
        for j in range(start, n - (k - i) + 1):
            v = host[j]
            if lo_v < v < hi_v:
                chosen[i] = j
                if search(i + 1, j + 1):
                    return True
        return False

    return search(0, 0)


def avoids(host: Sequence[int], patterns: Iterable[Sequence[int]]) -> bool:
    return not any(contains(p, host) for p in patterns)


def subword_at(host: Sequence[int], X: Iterable[int], Y: Iterable[int]) -> Perm:
    """Standardization of the points of ``host`` with 1-based index in ``X``
    and value in ``Y``."""
    X, Y = set(X), set(Y)
    word = [v for i, v in enumerate(host, 1) if i in X and v in Y]
    return Perm(_std(word), check=False)


def delete_index(p: Sequence[int], i: int) -> tuple:
    """Remove the entry at 0-based position ``i`` and standardize."""
    v = p[i]
    return tuple(w - (w > v) for j, w in enumerate(p) if j != i)


def subpatterns(p: Sequence[int]) -> set[Perm]:
    """All patterns contained in ``p``, including ε and ``p`` itself."""
    p = tuple(p)
    out = {p}
    layer = {p}
    while layer:
        nxt = set()
        for q in layer:
            for i in range(len(q)):
                nxt.add(delete_index(q, i))
        nxt -= out
        out |= nxt
        layer = nxt
    return {Perm(q, check=False) for q in out}


def all_perms(n: int):
    return (Perm(p, check=False) for p in itertools.permutations(range(1, n + 1)))


# ---------------------------------------------------------------------------
# symmetries of the square


def reverse(p: Sequence[int]) -> Perm:
    return Perm(tuple(reversed(p)), check=False)


def complement(p: Sequence[int]) -> Perm:
    n = len(p)
    return Perm(tuple(n + 1 - v for v in p), check=False)


def inverse(p: Sequence[int]) -> Perm:
    out = [0] * len(p)
    for i, v in enumerate(p, 1):
        out[v - 1] = i
    return Perm(tuple(out), check=False)


_GENERATORS = {"r": reverse, "c": complement, "i": inverse}

# The dihedral group of the square as words in the generators, applied left to right.
SYMMETRY_WORDS = ("", "r", "c", "i", "rc", "ri", "ci", "rci")
SYMMETRY_NAMES = {
    "": "identity",
    "r": "reverse",
    "c": "complement",
    "i": "inverse",
    "rc": "reverse-complement",
    "ri": "reverse-inverse",
    "ci": "complement-inverse",
    "rci": "reverse-complement-inverse",
}
_BY_NAME = {name: word for word, name in SYMMETRY_NAMES.items()}


def apply_symmetry(p: Sequence[int], op: str) -> Perm:
    """Apply a symmetry given by name (``"reverse"``) or generator word (``"rc"``).

    Generator words are applied left to right, so ``"ri"`` means reverse then inverse.
    """
    word = _BY_NAME.get(op, op)
    if any(ch not in _GENERATORS for ch in word):
        raise ValueError(f"unknown symmetry {op!r}")
    q = Perm(tuple(p), check=False)
    for ch in word:
        q = _GENERATORS[ch](q)
    return q


# ---------------------------------------------------------------------------
# bases


def parse_basis_patterns(text: str) -> list[Perm]:
    """Split a basis literal such as ``"231_4321"``, ``"231,4321"`` or
    ``"[10,2,1,3,4,5,6,7,8,9]_12"`` into patterns."""
    text = text.strip()
    tokens = re.findall(r"\[[^\]]*\]|[^_,\s\[\]]+", text)
    if not tokens:
        raise ValueError(f"empty basis literal {text!r}")
    return [Perm.parse(tok) for tok in tokens]


def reduce_to_antichain(patterns: Iterable[Sequence[int]]) -> "Basis":
    """Drop every pattern that contains another pattern of the set."""
    pats = sorted({tuple(p) for p in patterns}, key=perm_key)
    if not pats:
        raise ValueError("a basis needs at least one pattern")
    kept: list[tuple] = []
    for p in pats:
        if not any(contains(q, p) for q in kept):
            kept.append(p)
    return Basis(kept)


class Basis:
    """A finite antichain of patterns, kept in canonical order."""

    __slots__ = ("patterns", "_hash")

    def __init__(self, patterns: Iterable[Sequence[int]]):
        pats = sorted({Perm(p) for p in patterns}, key=perm_key)
        if not pats:
            raise ValueError("a basis needs at least one pattern")
        for i, p in enumerate(pats):
            for q in pats[:i]:
                if contains(q, p):
                    raise ValueError(f"{q} is contained in {p}: not an antichain")
        self.patterns: tuple[Perm, ...] = tuple(pats)
        self._hash = hash(self.patterns)

    @classmethod
    def parse(cls, text: str) -> "Basis":
        return reduce_to_antichain(parse_basis_patterns(text))

    @property
    def max_length(self) -> int:
        return len(self.patterns[-1])

    def key(self) -> tuple:
        return tuple(perm_key(p) for p in self.patterns)

    def __iter__(self):
        return iter(self.patterns)

    def __len__(self) -> int:
        return len(self.patterns)

    def __contains__(self, p) -> bool:
        return tuple(p) in self.patterns

    def __eq__(self, other) -> bool:
        return isinstance(other, Basis) and self.patterns == other.patterns

    def __lt__(self, other: "Basis") -> bool:
        return self.key() < other.key()

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return "_".join(str(p) for p in self.patterns)

    def __repr__(self) -> str:
        return f"Basis({str(self)!r})"

    def avoided_by(self, host: Sequence[int]) -> bool:
        return avoids(host, self.patterns)

    def image(self, op: str) -> "Basis":
        return Basis(apply_symmetry(p, op) for p in self.patterns)


def canonical_basis(basis: Basis) -> Basis:
    """The smallest of the eight symmetric images of ``basis``."""
    return min((basis.image(w) for w in SYMMETRY_WORDS), key=Basis.key)


# ---------------------------------------------------------------------------
# avoidance sets


class PermSetByLength:
    """Complete sets ``Av_m(B)`` for ``m = 0..n``."""

    def __init__(self, basis: Basis, levels: list[list[tuple]]):
        self.basis = basis
        self.levels = levels
        self._sets = [frozenset(level) for level in levels]

    @property
    def max_length(self) -> int:
        return len(self.levels) - 1

    @property
    def counts(self) -> list[int]:
        return [len(level) for level in self.levels]

    def of_length(self, m: int) -> list[tuple]:
        return self.levels[m]

    def __contains__(self, p) -> bool:
        p = tuple(p)
        return len(p) <= self.max_length and p in self._sets[len(p)]

    def __iter__(self):
        for level in self.levels:
            yield from level

    def __len__(self) -> int:
        return sum(self.counts)

    def truncate(self, n: int) -> "PermSetByLength":
        return PermSetByLength(self.basis, self.levels[: n + 1])


_AV_CACHE: dict[Basis, list[list[tuple]]] = {}
_VIEW_CACHE: dict[tuple[Basis, int], "PermSetByLength"] = {}


def _extend_level(prev: list[tuple], prev_set: frozenset, basis_set: frozenset, m: int) -> list[tuple]:
    """Avoiders of length ``m``: insert a new maximum into every avoider of
    length ``m - 1``, keep candidates whose one-point deletions all avoid the
    basis and which are not basis elements themselves."""
    out = []
    for sigma in prev:
        for pos in range(m):
            cand = sigma[:pos] + (m,) + sigma[pos:]
            if cand in basis_set:
                continue
            ok = True
            for i in range(m):
                if i == pos:
                    continue
                v = cand[i]
                red = tuple(w - (w > v) for j, w in enumerate(cand) if j != i)
                if red not in prev_set:
                    ok = False
                    break
            if ok:
                out.append(cand)
    out.sort()
    return out


def avoiders(basis: Basis, n: int) -> PermSetByLength:
    """All permutations of length ``0..n`` avoiding every pattern of ``basis``."""
    if n > MAX_LENGTH:
        raise ValueError(f"length {n} exceeds maximum {MAX_LENGTH}")
    view = _VIEW_CACHE.get((basis, n))
    if view is not None:
        return view
    levels = _AV_CACHE.get(basis)
    if levels is None:
        levels = [[()]] if () not in basis.patterns else [[]]
        _AV_CACHE[basis] = levels
    basis_set = frozenset(tuple(p) for p in basis.patterns)
    while len(levels) <= n:
        m = len(levels)
        levels.append(_extend_level(levels[-1], frozenset(levels[-1]), basis_set, m))
    view = _VIEW_CACHE[(basis, n)] = PermSetByLength(basis, levels[: n + 1])
    return view


def clear_caches() -> None:
    _AV_CACHE.clear()
    _VIEW_CACHE.clear()


# ---------------------------------------------------------------------------
# symmetry classes of subsets of S_n


def count_symmetry_classes(n: int) -> int:
    """Number of subsets of ``S_n`` up to the eight symmetries of the square.

    Burnside: average over the group of ``2 ** (number of cycles of g on S_n)``.
    """
    if n > MAX_BURNSIDE_LENGTH:
        raise ValueError(f"n = {n} exceeds the configured maximum {MAX_BURNSIDE_LENGTH}")
    elements = [tuple(p) for p in itertools.permutations(range(1, n + 1))]
    total = 0
    for word in SYMMETRY_WORDS:
        seen = set()
        cycles = 0
        for p in elements:
            if p in seen:
                continue
            cycles += 1
            q = p
            while q not in seen:
                seen.add(q)
                q = tuple(apply_symmetry(q, word))
        total += 2**cycles
    assert total % len(SYMMETRY_WORDS) == 0
    return total // len(SYMMETRY_WORDS)
