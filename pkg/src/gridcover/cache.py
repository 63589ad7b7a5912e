"""JSON cache for avoider sets, rule lists and covers.

Layout: ``<root>/<canonical basis>/<kind>....json``.  Avoider sets are stored
for the canonical representative of a symmetry class and mapped back to the
requested basis on load, so every spelling of a class shares one entry.
Writes go through a temporary file and ``os.replace``.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Optional

from .cover import Cover, verify_cover
from .perms import SYMMETRY_WORDS, Basis, PermSetByLength, apply_symmetry, avoiders, canonical_basis
from .rules import Rule

ENV_VAR = "GRIDCOVER_CACHE"


def default_root() -> Optional[Path]:
    value = os.environ.get(ENV_VAR)
    return Path(value) if value else None


class Cache:
    def __init__(self, root):
        self.root = Path(root)

    # -- plumbing -----------------------------------------------------------

    def _dir(self, basis: Basis) -> Path:
        return self.root / str(canonical_basis(basis))

    def _write(self, path: Path, payload) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(payload, fh, sort_keys=True)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def _read(self, path: Path):
        try:
            with open(path) as fh:
                return json.load(fh)
        except FileNotFoundError:
            return None
        except (OSError, ValueError):
            self._discard(path)
            return None

    def _discard(self, path: Path) -> None:
        try:
            path.unlink()
        except OSError:
            pass

    # -- avoiders -------------------------------------------------------------

    def store_avoiders(self, basis: Basis, n: int) -> Path:
        canon = canonical_basis(basis)
        levels = avoiders(canon, n).levels
        path = self._dir(basis) / f"avoiders-d{n}.json"
        self._write(path, {"basis": str(canon), "depth": n, "levels": [[list(p) for p in lv] for lv in levels]})
        return path

    def load_avoiders(self, basis: Basis, n: int) -> Optional[PermSetByLength]:
        """Avoiders of ``basis`` to length ``n`` from any stored depth ``>= n``."""
        d = self._dir(basis)
        if not d.is_dir():
            return None
        canon = canonical_basis(basis)
        for path in sorted(d.glob("avoiders-d*.json"), key=lambda p: int(p.stem.split("-d")[1])):
            depth = int(path.stem.split("-d")[1])
            if depth < n:
                continue
            data = self._read(path)
            if data is None:
                continue
            try:
                if Basis.parse(data["basis"]) != canon or data["depth"] != depth:
                    raise ValueError("mismatched entry")
                levels = [[tuple(p) for p in lv] for lv in data["levels"][: n + 1]]
                if len(levels) != n + 1 or any(len(p) != m for m, lv in enumerate(levels) for p in lv):
                    raise ValueError("malformed levels")
            except (KeyError, TypeError, ValueError):
                self._discard(path)
                continue
            word = next(w for w in SYMMETRY_WORDS if canon.image(w) == basis)
            mapped = [sorted(tuple(apply_symmetry(p, word)) for p in lv) for lv in levels]
            return PermSetByLength(basis, mapped)
        return None

    def avoiders(self, basis: Basis, n: int) -> PermSetByLength:
        hit = self.load_avoiders(basis, n)
        if hit is not None:
            return hit
        self.store_avoiders(basis, n)
        return avoiders(basis, n)

    # -- rules and covers -------------------------------------------------------

    @staticmethod
    def _tag(basis: Basis, dims: tuple[int, int], depth: int) -> str:
        return f"{basis}-{dims[0]}x{dims[1]}-d{depth}"

    def store_rules(self, basis: Basis, dims, depth: int, rules: list[Rule]) -> Path:
        path = self._dir(basis) / f"rules-{self._tag(basis, dims, depth)}.json"
        self._write(path, {"basis": str(basis), "rules": [r.to_dict() for r in rules]})
        return path

    def load_rules(self, basis: Basis, dims, depth: int) -> Optional[list[Rule]]:
        path = self._dir(basis) / f"rules-{self._tag(basis, dims, depth)}.json"
        data = self._read(path)
        if data is None:
            return None
        try:
            if Basis.parse(data["basis"]) != basis:
                raise ValueError("mismatched entry")
            return [Rule.from_dict(r) for r in data["rules"]]
        except (KeyError, TypeError, ValueError):
            self._discard(path)
            return None

    def store_cover(self, cover: Cover, dims, verify_depth: int) -> Path:
        tag = self._tag(cover.basis, dims, cover.depth_solved)
        path = self._dir(cover.basis) / f"cover-{tag}-v{verify_depth}.json"
        self._write(path, cover.to_dict())
        return path

    def load_cover(self, basis: Basis, dims, depth: int, verify_depth: int) -> Optional[Cover]:
        """A stored cover, re-verified at its recorded depth before it is returned."""
        path = self._dir(basis) / f"cover-{self._tag(basis, dims, depth)}-v{verify_depth}.json"
        data = self._read(path)
        if data is None:
            return None
        try:
            cover = Cover.from_dict(data)
            if cover.basis != basis or cover.depth_verified is None:
                raise ValueError("mismatched entry")
            if not verify_cover(cover, cover.depth_verified).ok:
                raise ValueError("stored cover fails verification")
        except (KeyError, TypeError, ValueError):
            self._discard(path)
            return None
        return cover
