"""Command-line front end.

Exit codes: 0 success, 1 negative result (incompatible jump data, no
bricks, invalid instruction, failed verification), 2 usage or input error.
Diagnostics, including whether the point bound was ever binding, go to
standard error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from collections import Counter
from pathlib import Path

from .brickfinder import (DEDUCTION_MODES, DEDUP_MODES, STRATEGIES, SearchConfig,
                          brick_invariants, find_bricks)
from .fileformats import (Problem, ProblemFileError, brick_from_json, brick_to_json, emit_dot,
                          fixture_path, load_problem, parse_problem_file)
from .jumpdata import (IncompatibleJumpData, JumpDataError, derive_groupoid_relators,
                       format_groupoid_relator)
from .mosaic import (ConstructionInstruction, InstructionError, Mosaic, Placement, build_mosaic,
                     complete_instruction, connectivity_graph, cycle_string, handle_index_sets,
                     make_circle_instruction, mosaic_from_json, mosaic_to_json, parse_cycles,
                     verify_instruction, verify_mosaic)
from .permanalysis import (IS_ALT, DegreeSets, NotTransitive, contains_alternating, evaluate_word,
                           exact_threshold, group_order, is_identity, minimal_block_system,
                           orbits, realizable_degrees, support)
from .presentation import MalformedInput

log = logging.getLogger("brickwork")


class UsageError(Exception):
    pass


class NegativeResult(Exception):
    pass


# ---------------------------------------------------------------------------
# loading


def _load(arg: str):
    """A problem from a path, or from a shipped fixture by name."""
    p = Path(arg)
    if p.exists():
        return load_problem(p), p.parent
    name = arg if arg.endswith(".json") else arg + ".json"
    fx = fixture_path(name)
    if not fx.is_file():
        raise UsageError(f"no such problem file or fixture: {arg}")
    return parse_problem_file(fx.read_text(encoding="utf-8")), Path(str(fx)).parent


def _find_file(name: str, base: Path) -> Path:
    for cand in (Path(name), base / name, Path(str(fixture_path(name)))):
        if cand.is_file():
            return cand
    raise UsageError(f"file not found: {name}")


def _piece(problem: Problem, name: str) -> int:
    try:
        return problem.jumpdata.cement.index(name)
    except MalformedInput as e:
        raise UsageError(str(e)) from None


def _default_seeds(problem: Problem) -> list:
    """One seed per handle type: its first cement piece."""
    return [cls[0] for cls in problem.jumpdata.handles.classes]


def _search(problem: Problem, bound: int, seeds, low_index=False, dedup="canonical",
            deduction=None, strategy=None, jobs=1):
    """Run one search per seed and merge the results."""
    kw = {"dedup": dedup, "jobs": jobs}
    if deduction:
        kw["deduction"] = deduction
    if strategy:
        kw["strategy"] = strategy
    pres, data = problem.presentation, problem.jumpdata
    if low_index:
        runs = [None]
    else:
        if data is None:
            raise UsageError("problem has no jump data; use --low-index")
        runs = list(seeds) if seeds else _default_seeds(problem)
    bricks, seen, hit, nodes = [], set(), False, 0
    for seed in runs:
        res = find_bricks(pres, data, SearchConfig(bound, seed, **kw))
        hit |= res.bound_hit
        nodes += res.nodes
        for b in res.bricks:
            if dedup == "all":
                bricks.append(b)
                continue
            key = brick_invariants(b) if dedup == "invariants" else (b.shape, b.canonical_form())
            if key not in seen:
                seen.add(key)
                bricks.append(b)
    return bricks, hit, nodes


def _report_bound(hit: bool, bound: int, nodes: int):
    print(f"bound {bound}: {'hit' if hit else 'not hit'} ({nodes} nodes)", file=sys.stderr)


def _shape_of(doc) -> tuple:
    size, counts = doc
    return (int(size), tuple(int(h) for h in counts))


def _section_bricks(problem: Problem, base: Path, spec: dict) -> dict:
    out = {}
    cache: dict = {}
    for key, entry in spec.get("bricks", {}).items():
        if isinstance(entry, str):
            entry = {"file": entry}
        if "file" in entry:
            with open(_find_file(entry["file"], base), encoding="utf-8") as fh:
                out[key] = brick_from_json(json.load(fh), problem.presentation, problem.jumpdata)
            continue
        s = entry.get("search")
        if not s:
            raise UsageError(f"brick {key!r} needs 'file' or 'search'")
        shape = _shape_of(s["shape"]) if "shape" in s else None
        if "seed_cement" in s:
            seed = _piece(problem, s["seed_cement"])
        elif shape is not None and any(shape[1]):
            t = next(i for i, h in enumerate(shape[1]) if h)
            seed = problem.jumpdata.handles.classes[t][0]
        else:
            seed = _default_seeds(problem)[0]
        ck = (int(s["bound"]), seed)
        if ck not in cache:
            cache[ck] = _search(problem, ck[0], [seed])[0]
        found = [b for b in cache[ck] if shape is None or b.shape == shape]
        idx = int(s.get("index", 0))
        if idx >= len(found):
            raise NegativeResult(f"brick {key!r}: no brick of shape {shape} at bound {ck[0]}")
        out[key] = found[idx]
    return out


def _parse_zeta(problem: Problem, bricks: dict, placement: Placement, zeta: dict) -> dict:
    data = problem.jumpdata
    sets = handle_index_sets(bricks, placement, data)
    maps = {}
    for name, spec in zeta.items():
        c = _piece(problem, name)
        dom = sets.domain(c)
        if isinstance(spec, str):
            perm = parse_cycles(spec, len(placement))
            if len(perm) > len(placement):
                raise UsageError(f"ζ({name}) moves positions beyond {len(placement)}")
            maps[c] = {(lam, j): (perm[lam], j) for lam, j in dom}
        else:
            maps[c] = {(a[0] - 1, a[1]): (b[0] - 1, b[1]) for a, b in spec}
    return maps


def _mosaic_from_section(problem: Problem, base: Path, spec: dict):
    if not spec or "placement" not in spec:
        raise UsageError("nothing to render: no mosaic section")
    if spec.get("problem") and spec["problem"] != problem.name:
        raise UsageError(f"mosaic spec is for {spec['problem']!r}, not {problem.name!r}")
    bricks = _section_bricks(problem, base, spec)
    placement = Placement(tuple(spec["placement"]))
    for key in placement.beta:
        if key not in bricks:
            raise UsageError(f"placement uses unknown brick {key!r}")
    data = problem.jumpdata
    rels = derive_groupoid_relators(data, problem.presentation) if data else ()
    if "circle" in spec:
        inst = make_circle_instruction(bricks, placement, data, spec["circle"], rels)
    elif data is not None:
        maps = _parse_zeta(problem, bricks, placement, spec.get("zeta", {}))
        inst = complete_instruction(bricks, placement, data, maps, rels)
    else:
        inst = ConstructionInstruction({})
    if data is not None:
        bad = verify_instruction(inst, handle_index_sets(bricks, placement, data), data, rels)
        if bad:
            raise NegativeResult("invalid construction instruction: " + bad[0].message)
    return build_mosaic(bricks, placement, inst, data, problem.presentation)


def _mosaic_spec(args, problem: Problem, base: Path) -> dict:
    if getattr(args, "spec", None):
        with open(_find_file(args.spec, base), encoding="utf-8") as fh:
            return json.load(fh)
    spec = dict(problem.mosaic)
    if getattr(args, "brick", None):
        spec["bricks"] = {}
        for item in args.brick:
            key, _, path = item.partition("=")
            if not path:
                raise UsageError("--brick takes NAME=FILE")
            spec["bricks"][key] = {"file": path}
    if getattr(args, "place", None):
        spec["placement"] = args.place.split(",")
    if getattr(args, "circle", None):
        spec["circle"] = args.circle
        spec.pop("zeta", None)
    if getattr(args, "zeta", None):
        spec.pop("circle", None)
        spec["zeta"] = {}
        for item in args.zeta:
            key, _, cyc = item.partition("=")
            spec["zeta"][key] = cyc
    return spec


def _get_mosaic(args, problem: Problem, base: Path) -> Mosaic:
    if getattr(args, "mosaic", None):
        with open(args.mosaic, encoding="utf-8") as fh:
            return mosaic_from_json(json.load(fh), problem.presentation)
    return _mosaic_from_section(problem, base, _mosaic_spec(args, problem, base))


def _emit(text: str, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt_set(s) -> str:
    return "{" + ", ".join(map(str, sorted(s))) + "}"


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    problem, _ = _load(args.problem)
    pres, data = problem.presentation, problem.jumpdata
    alph = pres.alphabet
    print(f"problem {problem.name}: {len(alph)} symbols, {len(pres.relators)} relators after closure")
    if data is None:
        print("no jump data")
        return 0
    names = data.cement.names
    print(f"cement: {len(names)} pieces, {len(data.stays)} stays after closure")
    for i, cls in enumerate(data.handles.classes):
        print(f"handle type {i + 1}: " + _fmt_set(names[c] for c in cls))
    rels = derive_groupoid_relators(data, pres)
    print("groupoid relators:")
    for r in rels:
        print("  " + format_groupoid_relator(data, r))
    return 0


def cmd_find_bricks(args) -> int:
    problem, _ = _load(args.problem)
    bound = args.bound or problem.search.get("bound")
    if not bound:
        raise UsageError("no --bound given and none in the problem file")
    seeds = [_piece(problem, s) for s in args.seed_cement] if args.seed_cement else None
    bricks, hit, nodes = _search(problem, bound, seeds, args.low_index, args.dedup,
                                 args.deduction, args.strategy, args.jobs)
    if args.handles is not None:
        want = tuple(int(h) for h in args.handles.split(",")) if args.handles else ()
        bricks = [b for b in bricks if b.handle_counts == want]
    _report_bound(hit, bound, nodes)
    if args.format == "summary":
        counts = Counter(b.shape for b in bricks)
        lines = [f"{size:>5}  {list(h)}  x{k}" for (size, h), k in sorted(counts.items())]
        sizes = sorted({b.size for b in bricks})
        lines.append("sizes: " + _fmt_set(sizes))
        _emit("\n".join(lines) + "\n", args.output)
    else:
        doc = {"problem": problem.name, "bound": bound, "bound_hit": hit, "nodes": nodes,
               "bricks": [brick_to_json(b) for b in bricks]}
        _emit(json.dumps(doc, indent=1) + "\n", args.output)
    return 0 if bricks else 1


def _mosaic_report(m: Mosaic) -> dict:
    g = m.perm_group()
    orb = orbits(g)
    rep = {"verified": not verify_mosaic(m, m.provenance["presentation"]), "orbits": len(orb)}
    if "instruction" in m.provenance:
        rep["connected"] = connectivity_graph(m).connected
    if len(orb) == 1:
        bl = minimal_block_system(g)
        rep["primitive"] = bl is None
        if bl is not None:
            rep["blocks"] = [len(bl), len(bl[0])]
    return rep


def cmd_build_mosaic(args) -> int:
    problem, base = _load(args.problem)
    m = _get_mosaic(args, problem, base)
    doc = mosaic_to_json(m)
    doc["report"] = _mosaic_report(m)
    _emit(json.dumps(doc, indent=1) + "\n", args.output)
    print(f"mosaic on {m.degree} points", file=sys.stderr)
    return 0


def cmd_verify_mosaic(args) -> int:
    problem, base = _load(args.problem)
    m = _get_mosaic(args, problem, base)
    bad = verify_mosaic(m, problem.presentation)
    if bad:
        for v in bad[:20]:
            print(f"{v.kind}: {v.message}")
        return 1
    print(f"valid: {m.degree} points, {len(orbits(m.perm_group()))} orbit(s)")
    return 0


def _word(problem: Problem, text: str):
    words = problem.extra.get("words", {})
    return words.get(text, text)


def cmd_analyze(args) -> int:
    problem, base = _load(args.problem)
    m = _get_mosaic(args, problem, base)
    g = m.perm_group()
    out = {"degree": m.degree}
    orb = orbits(g)
    out["orbits"] = [len(o) for o in orb]
    if len(orb) == 1:
        bl = minimal_block_system(g)
        out["primitive"] = bl is None
        if bl is not None:
            out["blocks"] = {"count": len(bl), "size": len(bl[0])}
    target = None
    if args.alt or args.all:
        try:
            res = contains_alternating(g, attempts=args.attempts, seed=args.seed)
            out["alternating"] = res.verdict
            if res.certificate:
                out["certificate"] = {"prime": res.certificate.prime,
                                      "exponent": res.certificate.exponent}
                full = math.factorial(g.degree)
                target = full // 2 if res.verdict == IS_ALT else full
        except NotTransitive:
            out["alternating"] = "not transitive"
    if args.order or args.all:
        out["order"] = str(group_order(g, target=target))
    for w in args.word or []:
        text = _word(problem, w)
        p = evaluate_word(g, text)
        out.setdefault("words", {})[w] = {
            "word": text, "identity": is_identity(p), "moved": len(support(p)),
            "cycles": cycle_string(p) if args.cycles else None}
    if args.json:
        print(json.dumps(out, indent=1))
    else:
        print(f"degree {m.degree}, orbits {out['orbits']}")
        if "primitive" in out:
            print("primitive" if out["primitive"] else
                  f"imprimitive: {out['blocks']['count']} blocks of size {out['blocks']['size']}")
        if "order" in out:
            print(f"order {out['order']}")
        if "alternating" in out:
            extra = ""
            if "certificate" in out:
                extra = f" (prime cycle {out['certificate']['prime']})"
            print(f"alternating: {out['alternating']}{extra}")
        for w, r in out.get("words", {}).items():
            what = "identity" if r["identity"] else f"moves {r['moved']} points"
            print(f"{w} = {r['word']}: {what}")
    return 0


def _degree_sets(problem: Problem, bound: int, args):
    bricks, hit, nodes = _search(problem, bound, None, dedup="canonical",
                                 deduction=args.deduction, strategy=args.strategy, jobs=args.jobs)
    _report_bound(hit, bound, nodes)
    ntypes = len(problem.jumpdata.handles)
    if ntypes == 1:
        a1 = {b.size for b in bricks if b.handle_counts == (1,)}
        return DegreeSets.of(a1, a1, {b.size for b in bricks if b.handle_counts == (2,)})
    if ntypes == 2:
        return DegreeSets.of({b.size for b in bricks if b.handle_counts == (1, 0)},
                             {b.size for b in bricks if b.handle_counts == (0, 1)},
                             {b.size for b in bricks if b.handle_counts == (1, 1)})
    raise UsageError("degree arithmetic needs one or two handle types")


def _int_set(text):
    return {int(v) for v in text.split(",") if v.strip()} if text else set()


def cmd_degrees(args) -> int:
    problem = None
    if args.problem:
        problem, _ = _load(args.problem)
        bound = args.bound or problem.search.get("bound")
        sets = _degree_sets(problem, bound, args)
    else:
        if args.a1 is None and args.a12 is None:
            raise UsageError("give a problem or --a1/--a2/--a12")
        a1 = _int_set(args.a1)
        sets = DegreeSets.of(a1, _int_set(args.a2) if args.a2 is not None else a1,
                             _int_set(args.a12))
    rep = realizable_degrees(sets, args.limit)
    print(f"A1 = {_fmt_set(sets.a1)}")
    print(f"A2 = {_fmt_set(sets.a2)}")
    print(f"A12 = {_fmt_set(sets.a12)}")
    print(f"achievable up to {args.limit}: {_fmt_set(rep.achievable)}")
    print(f"not achievable up to {args.limit}: {_fmt_set(rep.missing())}")
    if rep.modulus is None:
        print("A12 is empty: no threshold")
        return 0
    mins = " ".join(f"{r}:{v}" for r, v in sorted(rep.class_minima.items()))
    print(f"least value per residue mod {rep.modulus}: {mins}")
    if rep.threshold is None:
        print("some residue class is never reached: no threshold")
        return 1
    print(f"b = {rep.bound}; every N >= {rep.threshold} is achievable")
    k = args.low_index_bound
    if k == "auto":
        k = rep.threshold - 1
    if k:
        k = int(k)
        if problem is None:
            raise UsageError("--low-index-bound needs a problem")
        if k < 1:
            print("M = 1 (nothing to enumerate)")
            return 0
        low, hit, nodes = _search(problem, k, None, low_index=True, jobs=args.jobs)
        _report_bound(hit, k, nodes)
        degs = {b.size for b in low}
        print(f"transitive degrees up to {k}: {_fmt_set(degs)}")
        if k < rep.threshold - 1:
            print(f"low-index bound {k} is below {rep.threshold - 1}: no verdict")
            return 0
        print(f"M = {exact_threshold(rep, degs)}")
    return 0


def cmd_export_dot(args) -> int:
    problem, base = _load(args.problem)
    if args.brick_file:
        with open(_find_file(args.brick_file, base), encoding="utf-8") as fh:
            doc = json.load(fh)
        if "bricks" in doc:  # find-bricks output
            if not doc["bricks"]:
                raise UsageError("nothing to render: no bricks in file")
            doc = doc["bricks"][args.index]
        obj = brick_from_json(doc, problem.presentation, problem.jumpdata)
    else:
        obj = _get_mosaic(args, problem, base)
    _emit(emit_dot(obj, problem.name or "G"), args.output)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="brickwork", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def problem_arg(p):
        p.add_argument("problem", help="problem file, or the name of a shipped fixture")

    p = sub.add_parser("validate", help="check jump data and print the groupoid relators")
    problem_arg(p)
    p.set_defaults(func=cmd_validate)

    def engine_args(p):
        p.add_argument("--deduction", choices=DEDUCTION_MODES, default=None)
        p.add_argument("--strategy", choices=STRATEGIES, default=None)
        p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("find-bricks", help="search for bricks up to a point bound")
    problem_arg(p)
    p.add_argument("--bound", type=int)
    p.add_argument("--seed-cement", action="append",
                   help="initial cement piece (repeatable); default: one per handle type")
    p.add_argument("--dedup", choices=DEDUP_MODES, default="canonical")
    p.add_argument("--low-index", action="store_true", help="no cement: plain transitive actions")
    p.add_argument("--handles", help="keep only bricks with these handle counts, e.g. 1 or 0,1")
    p.add_argument("--format", choices=("json", "summary"), default="json")
    p.add_argument("-o", "--output")
    engine_args(p)
    p.set_defaults(func=cmd_find_bricks)

    def mosaic_args(p, with_file=True):
        if with_file:
            p.add_argument("--mosaic", help="mosaic JSON written by build-mosaic")
        p.add_argument("--spec", help="mosaic specification file (bricks, placement, circle/zeta)")
        p.add_argument("--brick", action="append", help="NAME=FILE brick document")
        p.add_argument("--place", help="comma-separated brick names, one per position")
        p.add_argument("--circle", help="join the placement in a circle through this piece")
        p.add_argument("--zeta", action="append",
                       help="PIECE=CYCLES over positions, e.g. c1='(1 2 3)'")

    p = sub.add_parser("build-mosaic", help="glue bricks into a permutation representation")
    problem_arg(p)
    mosaic_args(p, with_file=False)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_build_mosaic)

    p = sub.add_parser("verify-mosaic", help="check a mosaic against the relators")
    problem_arg(p)
    mosaic_args(p)
    p.set_defaults(func=cmd_verify_mosaic)

    p = sub.add_parser("analyze", help="orbits, blocks, order, alternating test, words")
    problem_arg(p)
    mosaic_args(p)
    p.add_argument("--order", action="store_true")
    p.add_argument("--alt", action="store_true")
    p.add_argument("--all", action="store_true")
    p.add_argument("--word", action="append", help="word, or a name from the problem's 'words'")
    p.add_argument("--cycles", action="store_true", help="print word images in cycle notation")
    p.add_argument("--attempts", type=int, default=2000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("degrees", help="degrees reachable by gluing bricks")
    p.add_argument("problem", nargs="?")
    p.add_argument("--bound", type=int)
    p.add_argument("--a1")
    p.add_argument("--a2")
    p.add_argument("--a12")
    p.add_argument("--limit", type=int, default=40)
    p.add_argument("--low-index-bound", help="run a low-index search to this bound ('auto')")
    engine_args(p)
    p.set_defaults(func=cmd_degrees)

    p = sub.add_parser("export-dot", help="DOT text for a brick or a mosaic")
    problem_arg(p)
    p.add_argument("--brick-file", help="brick JSON, or find-bricks output with --index")
    p.add_argument("--index", type=int, default=0)
    mosaic_args(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export_dot)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except IncompatibleJumpData as e:
        print(f"incompatible jump data: {e}", file=sys.stderr)
        return 1
    except (NegativeResult, InstructionError) as e:
        print(str(e), file=sys.stderr)
        return 1
    except (UsageError, MalformedInput, ProblemFileError, JumpDataError, OSError,
            ValueError, KeyError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
