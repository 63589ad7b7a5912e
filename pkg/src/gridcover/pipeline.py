"""The conjecture pipeline and batch runs over many bases."""

from __future__ import annotations

import itertools
import multiprocessing as mp
import os
import resource
import time
import traceback
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .blocks import block_set, build_poset
from .cache import Cache, default_root
from .cover import Cover, CoverSearchUnknown, build_instance, iter_covers, solve_min_cover, verify_cover
from .perms import Basis, canonical_basis
from .rulegen import BudgetExceeded, GenConfig, generate_rules, rule_variants
from .rules import Rule, is_struct_rule, rule_avoids

FOUND, NONE, BUDGET, ERROR = "cover", "none", "budget", "error"

# covers at the solve depth tried directly before switching to a search at
# the verification depth
_DIRECT_TRIES = 8
_VARIANT_TRIES = 64


@dataclass
class RunConfig:
    basis: str
    max_width: Optional[int] = None
    max_height: Optional[int] = None
    depth: Optional[int] = None
    verify_depth: Optional[int] = None
    terms: int = 10
    max_rules: Optional[int] = None
    mem_limit_mb: Optional[int] = None
    time_limit: Optional[float] = None
    cover_node_budget: Optional[int] = None
    cache_dir: Optional[str] = None
    seed: int = 0
    escalate: bool = True

    def resolved(self) -> tuple[Basis, int, int, int, int]:
        b = Basis.parse(self.basis)
        ell = b.max_length
        w = self.max_width or ell + 1
        h = self.max_height or ell + 1
        d = self.depth or ell + 2
        v = self.verify_depth or ell + 4
        if d < ell:
            raise ValueError(f"solve depth {d} is below the longest basis pattern ({ell})")
        if v < d:
            raise ValueError("verify depth must be at least the solve depth")
        return b, w, h, d, v


@dataclass
class ConjectureResult:
    status: str
    basis: Basis
    cover: Optional[Cover] = None
    message: str = ""
    rules_generated: int = 0
    dims: Optional[tuple[int, int]] = None
    elapsed: float = 0.0

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "basis": str(self.basis),
            "message": self.message,
            "rules_generated": self.rules_generated,
            "dims": None if self.dims is None else f"{self.dims[0]}x{self.dims[1]}",
            "cover": None if self.cover is None else self.cover.to_dict(),
        }


def _dim_schedule(w: int, h: int, escalate: bool) -> list[tuple[int, int]]:
    if not escalate:
        return [(w, h)]
    out = []
    for k in range(1, max(w, h) + 1):
        dims = (min(k, w), min(k, h))
        if dims not in out:
            out.append(dims)
    return out


def find_verified_cover(
    basis: Basis,
    rules: Sequence[Rule],
    blocks,
    depth: int,
    verify_depth: int,
    node_budget: Optional[int] = None,
    deadline: Optional[float] = None,
) -> Optional[Cover]:
    """A smallest cover at ``depth`` that survives verification at ``verify_depth``.

    The smallest exact covers at the solve depth are tried first.  If none of
    the first few survive, the question is settled by an exact-cover search at
    the verification depth over every rule (and block variant) still valid
    there: a cover verifies exactly when it is such a partition.
    Raises :class:`CoverSearchUnknown` on budget exhaustion."""

    def remaining():
        return None if deadline is None else max(0.001, deadline - time.monotonic())

    inst = build_instance(basis, rules, depth)
    _, groups = inst.distinct()
    tried = 0
    for sol in iter_covers(inst, node_budget=node_budget, time_limit=remaining()):
        options = []
        for i in sol:
            alts = []
            for j in groups[i]:
                alts.extend(rule_variants(inst.rules[j], blocks, depth))
            options.append(list(dict.fromkeys(alts)))
        for combo in itertools.islice(itertools.product(*options), _VARIANT_TRIES):
            cover = Cover(basis, list(combo), depth)
            if verify_cover(cover, verify_depth).ok:
                cover.depth_verified = verify_depth
                return cover
        tried += 1
        if tried >= _DIRECT_TRIES:
            break
    else:
        if tried == 0:
            return None
    pool = []
    for r in inst.rules:
        pool.extend(rule_variants(r, blocks, depth))
    pool = [r for r in dict.fromkeys(pool) if is_struct_rule(r, verify_depth) and rule_avoids(r, basis, verify_depth)]
    deep = build_instance(basis, pool, verify_depth)
    found = solve_min_cover(deep, node_budget=node_budget, time_limit=remaining())
    if found is None:
        return None
    cover = Cover(basis, found.rules, depth, verify_depth)
    return cover


def conjecture(cfg: RunConfig) -> ConjectureResult:
    """Blocks, rules, a minimal cover and its verification, escalating the
    rule dimensions from 1x1 up to the configured maximum."""
    started = time.monotonic()
    basis, w, h, d, v = cfg.resolved()
    deadline = None if cfg.time_limit is None else started + cfg.time_limit
    cache_root = cfg.cache_dir or default_root()
    cache = Cache(cache_root) if cache_root else None
    blocks = block_set(basis)
    poset = build_poset(blocks)
    total_rules = 0
    for dims in _dim_schedule(w, h, cfg.escalate):
        if cache is not None:
            hit = cache.load_cover(basis, dims, d, v)
            if hit is not None:
                return ConjectureResult(FOUND, basis, hit, "loaded from cache", 0, dims, time.monotonic() - started)
        left = None if deadline is None else deadline - time.monotonic()
        if left is not None and left <= 0:
            return ConjectureResult(BUDGET, basis, None, "time budget exceeded", total_rules, dims, time.monotonic() - started)
        gen = GenConfig(dims[0], dims[1], d, cfg.max_rules, cfg.mem_limit_mb, left)
        rules = cache.load_rules(basis, dims, d) if cache is not None else None
        if rules is None:
            try:
                rules = generate_rules(basis, blocks, poset, gen)
            except BudgetExceeded as exc:
                msg = f"{exc} after {exc.explored} candidates ({len(exc.partial)} rules so far)"
                return ConjectureResult(BUDGET, basis, None, msg, len(exc.partial), dims, time.monotonic() - started)
            if cache is not None:
                cache.store_rules(basis, dims, d, rules)
        total_rules = len(rules)
        try:
            cover = find_verified_cover(basis, rules, blocks, d, v, cfg.cover_node_budget, deadline)
        except CoverSearchUnknown as exc:
            return ConjectureResult(BUDGET, basis, None, f"cover search: {exc}", total_rules, dims, time.monotonic() - started)
        if cover is not None:
            if cache is not None:
                cache.store_cover(cover, dims, v)
            return ConjectureResult(FOUND, basis, cover, verify_cover(cover, v).summary(), total_rules, dims, time.monotonic() - started)
    msg = f"no cover verified to length {v} with rules up to {w}x{h}"
    return ConjectureResult(NONE, basis, None, msg, total_rules, (w, h), time.monotonic() - started)


# ---------------------------------------------------------------------------
# batch


@dataclass
class BatchReport:
    outcomes: dict[str, dict] = field(default_factory=dict)
    duplicates: list[str] = field(default_factory=list)

    def column(self, outcome: dict) -> str:
        if outcome["status"] == FOUND:
            return f"{outcome['max_dim']}x{outcome['max_dim']}"
        return {NONE: "failed", BUDGET: "budget"}.get(outcome["status"], "error")

    def table(self) -> dict[int, dict[str, int]]:
        rows: dict[int, dict[str, int]] = {}
        for basis, o in self.outcomes.items():
            size = len(Basis.parse(basis))
            row = rows.setdefault(size, {})
            col = self.column(o)
            row[col] = row.get(col, 0) + 1
        return dict(sorted(rows.items()))

    def columns(self) -> list[str]:
        cols = {c for row in self.table().values() for c in row}
        dims = sorted((c for c in cols if "x" in c), key=lambda c: int(c.split("x")[0]))
        return dims + [c for c in ("failed", "budget", "error") if c in cols]

    def render(self) -> str:
        cols = self.columns()
        head = ["size"] + cols + ["total"]
        lines = ["  ".join(f"{h:>7}" for h in head)]
        for size, row in self.table().items():
            cells = [str(size)] + [str(row.get(c, 0)) for c in cols] + [str(sum(row.values()))]
            lines.append("  ".join(f"{c:>7}" for c in cells))
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "outcomes": self.outcomes,
            "duplicates": self.duplicates,
            "table": {str(k): v for k, v in self.table().items()},
        }


def _batch_worker(cfg: RunConfig, mem_mb: Optional[int], queue) -> None:
    try:
        if mem_mb:
            limit = mem_mb * 1024 * 1024
            resource.setrlimit(resource.RLIMIT_AS, (limit, limit))
        res = conjecture(cfg)
        out = {"status": res.status, "message": res.message, "rules": res.rules_generated}
        if res.cover is not None:
            out["max_dim"] = res.cover.max_dimension
            out["cover"] = res.cover.to_dict()
    except MemoryError:
        out = {"status": BUDGET, "message": "memory budget exceeded"}
    except Exception as exc:  # recorded, never fatal for the batch
        out = {"status": ERROR, "message": repr(exc), "trace": traceback.format_exc(limit=3)}
    queue.put(out)


def read_bases(lines: Sequence[str]) -> list[Basis]:
    out = []
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(Basis.parse(line))
    return out


def run_batch(
    bases: Sequence[Basis],
    template: RunConfig,
    time_limit: float = 60.0,
    mem_limit_mb: Optional[int] = 2048,
    workers: Optional[int] = None,
) -> BatchReport:
    """Run the pipeline on one representative per symmetry class, each in
    its own process under wall-clock and address-space limits."""
    report = BatchReport()
    todo: list[Basis] = []
    seen = set()
    for b in bases:
        c = canonical_basis(b)
        if c in seen:
            report.duplicates.append(str(b))
            continue
        seen.add(c)
        todo.append(c)
    workers = workers or os.cpu_count() or 1
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else mp.get_context()
    running: list[tuple[Basis, object, object, float]] = []
    pending = list(todo)
    while pending or running:
        while pending and len(running) < workers:
            b = pending.pop(0)
            cfg = RunConfig(**{**template.__dict__, "basis": str(b), "time_limit": time_limit})
            q = ctx.Queue()
            proc = ctx.Process(target=_batch_worker, args=(cfg, mem_limit_mb, q), daemon=True)
            proc.start()
            running.append((b, proc, q, time.monotonic()))
        still = []
        for b, proc, q, t0 in running:
            result = None
            try:
                result = q.get(timeout=0.05)
            except Exception:
                pass
            if result is not None:
                proc.join()
                report.outcomes[str(b)] = result
            elif not proc.is_alive():
                report.outcomes[str(b)] = {"status": BUDGET, "message": f"worker exited with code {proc.exitcode}"}
            elif time.monotonic() - t0 > time_limit + 5:
                proc.terminate()
                proc.join()
                report.outcomes[str(b)] = {"status": BUDGET, "message": "time budget exceeded"}
            else:
                still.append((b, proc, q, t0))
        running = still
    report.outcomes = dict(sorted(report.outcomes.items(), key=lambda kv: Basis.parse(kv[0]).key()))
    return report
