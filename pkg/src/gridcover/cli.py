"""Command line entry point: ``gridcover <command> ...``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from .blocks import block_set, build_poset
from .cover import Cover, build_instance, export_cnf, verify_cover
from .enumeration import ClassRegistry, counting_sequence, functional_equations, sample_uniform
from .peg import ConvexVectorSet, PegPermutation, fill, parse_vector, peg_to_rules
from .perms import SYMMETRY_NAMES, SYMMETRY_WORDS, Basis, canonical_basis
from .pipeline import BUDGET, FOUND, NONE, RunConfig, conjecture, read_bases, run_batch
from .rulegen import BudgetExceeded, GenConfig, generate_rules
from .rules import render_rule

EXIT_OK, EXIT_NONE, EXIT_BUDGET, EXIT_FAIL = 0, 3, 4, 1


def _dims(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}")


def _basis(text: str) -> Basis:
    try:
        return Basis.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _emit(args, payload, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _load_cover(arg: str, args) -> Cover:
    """A cover from a JSON file, or found by running the pipeline on a basis."""
    if os.path.exists(arg):
        with open(arg) as fh:
            return Cover.from_json(fh.read())
    cfg = _run_config(arg, args)
    res = conjecture(cfg)
    if res.status != FOUND:
        raise SystemExit(f"no cover for {arg}: {res.message}")
    return res.cover


def _run_config(basis: str, args) -> RunConfig:
    w, h = args.max_dim if getattr(args, "max_dim", None) else (None, None)
    return RunConfig(
        basis=str(Basis.parse(basis)),
        max_width=w,
        max_height=h,
        depth=getattr(args, "depth", None),
        verify_depth=getattr(args, "verify_depth", None),
        terms=getattr(args, "terms", 10),
        max_rules=getattr(args, "max_rules", None),
        mem_limit_mb=getattr(args, "mem_limit", None),
        time_limit=getattr(args, "time_limit", None),
        cache_dir=getattr(args, "cache_dir", None),
        seed=getattr(args, "seed", 0) or 0,
        escalate=not getattr(args, "no_escalate", False),
    )


# -- commands -------------------------------------------------------------


def cmd_blocks(args) -> int:
    bs = block_set(args.basis, args.depth)
    poset = build_poset(bs)
    covers = {b.name(): [c.name() for c in poset.covers_of(b)] for b in bs}
    text = "\n".join(f"{b.name():<40} < " + ", ".join(covers[b.name()]) for b in bs)
    _emit(args, {"root": str(args.basis), "blocks": [b.name() for b in bs], "covers": covers}, text)
    return EXIT_OK


def cmd_rules(args) -> int:
    w, h = args.max_dim or (None, None)
    cfg = GenConfig.default(
        args.basis, max_width=w, max_height=h, depth=args.depth, max_rules=args.max_rules,
        mem_limit_mb=args.mem_limit, time_limit=args.time_limit,
    )
    try:
        rules = generate_rules(args.basis, cfg=cfg)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc} ({exc.explored} candidates, {len(exc.partial)} rules)", file=sys.stderr)
        return EXIT_BUDGET
    _emit(args, {"basis": str(args.basis), "depth": cfg.depth, "rules": [r.to_dict() for r in rules]},
          "\n".join(str(r) for r in rules) + f"\n{len(rules)} rules")
    return EXIT_OK


def _cover_text(cover: Cover, args, reg: ClassRegistry) -> str:
    parts = [render_rule(r) for r in cover.rules]
    eqs = functional_equations(cover, reg, root_name=args.name)
    seq = counting_sequence(cover, args.terms, reg)
    parts.append(eqs.render())
    parts.append(seq.comma_line())
    return "\n\n".join(parts)


def cmd_conjecture(args) -> int:
    cfg = _run_config(str(args.basis), args)
    res = conjecture(cfg)
    code = {FOUND: EXIT_OK, NONE: EXIT_NONE, BUDGET: EXIT_BUDGET}[res.status]
    if res.cover is None:
        _emit(args, res.to_dict(), f"{res.status}: {res.message}")
        return code
    reg = ClassRegistry()
    seq = counting_sequence(res.cover, args.terms, reg)
    eqs = functional_equations(res.cover, reg, root_name=args.name)
    payload = res.to_dict()
    payload["sequence"] = seq.terms
    payload["equations"] = eqs.render()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(res.cover.to_json(indent=2) + "\n")
    _emit(args, payload, f"{res.status}: {res.message}\n\n" + _cover_text(res.cover, args, reg))
    return code


def cmd_verify(args) -> int:
    cover = _load_cover(args.cover, args)
    depth = args.depth or cover.depth_verified or cover.basis.max_length + 4
    rep = verify_cover(cover, depth)
    payload = {
        "ok": rep.ok, "depth": depth, "summary": rep.summary(),
        "missing": [list(p) for p in rep.missing], "duplicated": [list(p) for p in rep.duplicated],
        "outside": [list(p) for p in rep.outside], "subset_certified": rep.subset_certified,
    }
    _emit(args, payload, rep.summary())
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_enumerate(args) -> int:
    cover = _load_cover(args.cover, args)
    seq = counting_sequence(cover, args.terms)
    _emit(args, seq.terms, seq.to_json() + "\n" + seq.comma_line())
    return EXIT_OK


def cmd_gf(args) -> int:
    cover = _load_cover(args.cover, args)
    eqs = functional_equations(cover, root_name=args.name)
    payload = {
        "equations": {k: [t.render() for t in v] for k, v in eqs.equations.items()},
        "external": {k: b.name() for k, b in eqs.external.items()},
        "text": eqs.render(),
    }
    text = eqs.render()
    if eqs.external:
        text += "\nwhere " + ", ".join(f"{k} = {b.name()}" for k, b in eqs.external.items())
    _emit(args, payload, text)
    return EXIT_OK


def cmd_sample(args) -> int:
    cover = _load_cover(args.cover, args)
    perms = sample_uniform(cover, args.length, args.seed, args.count)
    _emit(args, {"seed": args.seed, "length": args.length, "samples": [str(p) for p in perms]},
          "\n".join(str(p) for p in perms))
    return EXIT_OK


def cmd_peg(args) -> int:
    peg = PegPermutation.parse(args.peg)
    payload = {"peg": str(peg)}
    lines = [str(peg)]
    if args.vector:
        v = parse_vector(args.vector)
        p = fill(peg, v, allow_singletons=True)
        payload["fill"] = str(p)
        lines.append(f"fill {args.vector} = {p}")
    vs = ConvexVectorSet.parse(args.bounds) if args.bounds else None
    rules = peg_to_rules(peg, vs)
    payload["rules"] = [r.to_dict() for r in rules]
    lines.extend(render_rule(r) for r in rules)
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_canon(args) -> int:
    c = canonical_basis(args.basis)
    images = {SYMMETRY_NAMES[w]: str(args.basis.image(w)) for w in SYMMETRY_WORDS}
    _emit(args, {"basis": str(args.basis), "canonical": str(c), "images": images}, str(c))
    return EXIT_OK


def cmd_batch(args) -> int:
    with open(args.file) as fh:
        bases = read_bases(fh.readlines())
    template = _run_config(str(bases[0]) if bases else "1", args)
    report = run_batch(bases, template, args.time_limit, args.mem_limit, args.workers)
    lines = []
    for b, o in report.outcomes.items():
        dim = f" max {o['max_dim']}x{o['max_dim']}" if "max_dim" in o else ""
        lines.append(f"{b}: {o['status']}{dim}  {o.get('message', '')}")
    if report.duplicates:
        lines.append("skipped symmetric duplicates: " + ", ".join(report.duplicates))
    lines.append("")
    lines.append(report.render())
    _emit(args, report.to_dict(), "\n".join(lines))
    return EXIT_OK


def cmd_export_cnf(args) -> int:
    w, h = args.max_dim or (None, None)
    cfg = GenConfig.default(args.basis, max_width=w, max_height=h, depth=args.depth)
    rules = generate_rules(args.basis, cfg=cfg)
    inst = build_instance(args.basis, rules, cfg.depth)
    text = export_cnf(inst)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    if args.json:
        print(json.dumps({"variables": len(inst.rules), "rules": [r.to_dict() for r in inst.rules],
                          "dimacs": text}, indent=2, sort_keys=True))
    elif not args.output:
        sys.stdout.write(text)
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gridcover", description="Covers of permutation classes by grid rules.")
    p.add_argument("--cache-dir", default=None, help="cache root (default: $GRIDCOVER_CACHE)")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.set_defaults(func=func)
        return sp

    def gen_opts(sp):
        sp.add_argument("--max-dim", type=_dims, default=None, metavar="WxH")
        sp.add_argument("--depth", type=int, default=None, help="solve / validity depth")
        sp.add_argument("--max-rules", type=int, default=None)
        sp.add_argument("--mem-limit", type=int, default=None, metavar="MB")
        sp.add_argument("--time-limit", type=float, default=None, metavar="SECONDS")

    sp = add("blocks", cmd_blocks, "block set and containment order")
    sp.add_argument("basis", type=_basis)
    sp.add_argument("--depth", type=int, default=None)

    sp = add("rules", cmd_rules, "generate candidate rules")
    sp.add_argument("basis", type=_basis)
    gen_opts(sp)

    sp = add("conjecture", cmd_conjecture, "find and verify a cover")
    sp.add_argument("basis", type=_basis)
    gen_opts(sp)
    sp.add_argument("--verify-depth", type=int, default=None)
    sp.add_argument("--terms", type=int, default=10)
    sp.add_argument("--name", default="A", help="name of the class series")
    sp.add_argument("--no-escalate", action="store_true", help="search only at the maximum dimensions")
    sp.add_argument("-o", "--output", default=None, help="write the cover JSON here")

    sp = add("verify", cmd_verify, "re-verify a stored cover")
    sp.add_argument("cover", help="cover JSON file (or a basis)")
    sp.add_argument("--depth", type=int, default=None)

    sp = add("enumerate", cmd_enumerate, "counting sequence of a cover")
    sp.add_argument("cover", help="cover JSON file (or a basis)")
    sp.add_argument("--terms", type=int, default=10)

    sp = add("gf", cmd_gf, "functional equations of a cover")
    sp.add_argument("cover", help="cover JSON file (or a basis)")
    sp.add_argument("--name", default="A")

    sp = add("sample", cmd_sample, "uniform random members")
    sp.add_argument("cover", help="cover JSON file (or a basis)")
    sp.add_argument("--length", type=int, required=True)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("peg", cmd_peg, "fill a peg permutation and build its rules")
    sp.add_argument("peg", help="e.g. 3o1-4o2+")
    sp.add_argument("--vector", default=None, help="e.g. <1,3,1,2>")
    sp.add_argument("--bounds", default=None, help="per letter lo..hi, e.g. 1,2..,1,2..4")

    sp = add("canon", cmd_canon, "canonical basis of the symmetry class")
    sp.add_argument("basis", type=_basis)

    sp = add("batch", cmd_batch, "run many bases")
    sp.add_argument("file", help="one basis per line")
    sp.add_argument("--time-limit", type=float, default=60.0)
    sp.add_argument("--mem-limit", type=int, default=2048, metavar="MB")
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--max-dim", type=_dims, default=None, metavar="WxH")

    sp = add("export-cnf", cmd_export_cnf, "DIMACS encoding of the cover instance")
    sp.add_argument("basis", type=_basis)
    sp.add_argument("--max-dim", type=_dims, default=None, metavar="WxH")
    sp.add_argument("--depth", type=int, default=None)
    sp.add_argument("-o", "--output", default=None)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
