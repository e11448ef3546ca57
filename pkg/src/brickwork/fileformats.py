"""JSON problem files, brick and mosaic documents, and DOT export.

A problem file looks like::

    {
      "name": "example1",
      "generators": [["s", "r"], ["t", "t"]],
      "relators": ["s^3", "t^2", "(st)^7"],
      "cement": [{"name": "c1", "bar": "c2", "xi": "t"},
                 {"name": "c2", "bar": "c1", "xi": "t"}],
      "stays": [["c1", "ststs", "c1"], ["c2", "stststs", "c2"]],
      "close_stays": true,
      "search": {"bound": 28, "seed_cement": "c1"}
    }

``generators`` lists ``[name, inverse]`` pairs (an involution is paired
with itself).  Words use the symbol names with optional parentheses and
``^k`` powers; multi-character names may be separated by spaces.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .brickfinder import Brick, PartialCosetTable, extract_brick
from .jumpdata import CementSet, JumpData, Stay, close_stays, validate_jump_data
from .presentation import Alphabet, MalformedInput, Presentation, normalize_presentation


class ProblemFileError(MalformedInput):
    def __init__(self, message: str, path: str = "", line: int = 0, column: int = 0):
        where = f"line {line}, column {column}: " if line else ""
        at = f" (at {path})" if path else ""
        super().__init__(f"{where}{message}{at}")
        self.path = path
        self.line = line
        self.column = column


@dataclass
class Problem:
    name: str
    presentation: Presentation
    jumpdata: Optional[JumpData]
    raw_relators: tuple
    search: dict = field(default_factory=dict)
    mosaic: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)


def _locate(text: str, needle) -> tuple:
    if not isinstance(needle, str):
        return 0, 0
    i = text.find(json.dumps(needle))
    if i < 0:
        return 0, 0
    line = text.count("\n", 0, i) + 1
    col = i - (text.rfind("\n", 0, i) + 1) + 1
    return line, col


def parse_problem_file(text: str) -> Problem:
    """Parse a JSON problem document into a presentation and jump data."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemFileError(e.msg, "", e.lineno, e.colno) from None
    if not isinstance(doc, dict):
        raise ProblemFileError("top level must be an object", "$")

    def fail(msg, path, value=None):
        line, col = _locate(text, value)
        raise ProblemFileError(msg, path, line, col)

    gens = doc.get("generators")
    if not isinstance(gens, list) or not gens:
        fail("'generators' must be a non-empty list of [name, inverse] pairs", "generators")
    pairs = []
    for i, g in enumerate(gens):
        if isinstance(g, str):
            g = [g, g]
        if not (isinstance(g, list) and len(g) == 2 and all(isinstance(s, str) and s for s in g)):
            fail("generator entry must be [name, inverse]", f"generators[{i}]")
        pairs.append(tuple(g))
    try:
        alphabet = Alphabet.from_pairs(pairs)
    except MalformedInput as e:
        fail(str(e), "generators")

    def word(s, path):
        if not isinstance(s, str):
            fail("word must be a string", path)
        try:
            return alphabet.parse(s)
        except MalformedInput as e:
            fail(str(e), path, s)

    raw = doc.get("relators", [])
    if not isinstance(raw, list):
        fail("'relators' must be a list", "relators")
    relators = tuple(word(s, f"relators[{i}]") for i, s in enumerate(raw))
    pres = normalize_presentation(alphabet, relators)

    data = None
    cement = doc.get("cement")
    if cement:
        names = []
        for i, c in enumerate(cement):
            if not isinstance(c, dict) or not isinstance(c.get("name"), str):
                fail("cement entry needs a name", f"cement[{i}]")
            names.append(c["name"])
        if len(set(names)) != len(names):
            fail("duplicate cement name", "cement")
        bar, xi = [], []
        for i, c in enumerate(cement):
            b = c.get("bar", c["name"])
            if b == "self":
                b = c["name"]
            if b not in names:
                fail(f"unknown bar partner {b!r}", f"cement[{i}].bar", b)
            bar.append(names.index(b))
            x = c.get("xi")
            if not isinstance(x, str):
                fail("cement needs a generator 'xi'", f"cement[{i}].xi")
            try:
                xi.append(alphabet.index(x))
            except MalformedInput as e:
                fail(str(e), f"cement[{i}].xi", x)
        cs = CementSet(tuple(names), tuple(bar), tuple(xi))
        stays = []
        for i, st in enumerate(doc.get("stays", [])):
            if not (isinstance(st, list) and len(st) == 3):
                fail("stay must be [piece, word, piece]", f"stays[{i}]")
            a, w, b = st
            for k, p in ((0, a), (2, b)):
                if p not in names:
                    fail(f"unknown cement piece {p!r}", f"stays[{i}][{k}]", p)
            stays.append(Stay(names.index(a), word(w, f"stays[{i}][1]"), names.index(b)))
        if doc.get("close_stays", True):
            stays = close_stays(alphabet, stays)
        data = validate_jump_data(alphabet, cs, stays)
    return Problem(
        name=str(doc.get("name", "")),
        presentation=pres,
        jumpdata=data,
        raw_relators=relators,
        search=dict(doc.get("search", {})),
        mosaic=dict(doc.get("mosaic", {})),
        extra={k: v for k, v in doc.items() if k not in _KNOWN},
    )


_KNOWN = {"name", "generators", "relators", "cement", "stays", "close_stays", "search", "mosaic"}


def emit_problem(problem: Problem) -> str:
    """Canonical JSON text for a problem (stays closed, relators as given)."""
    alph = problem.presentation.alphabet
    seen = set()
    gens = []
    for x, name in enumerate(alph.names):
        if x in seen:
            continue
        y = alph.inverse[x]
        seen.update((x, y))
        gens.append([name, alph.names[y]])
    doc = {"name": problem.name, "generators": gens,
           "relators": [alph.format(r, " ") for r in problem.raw_relators]}
    data = problem.jumpdata
    if data is not None:
        cn = data.cement.names
        doc["cement"] = [{"name": cn[c], "bar": cn[data.cement.bar[c]],
                          "xi": alph.names[data.cement.xi[c]]} for c in range(len(cn))]
        doc["stays"] = [[cn[st.start], alph.format(st.word, " "), cn[st.end]]
                        for st in data.stays]
        doc["close_stays"] = True
    if problem.search:
        doc["search"] = problem.search
    if problem.mosaic:
        doc["mosaic"] = problem.mosaic
    doc.update(problem.extra)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_problem(path) -> Problem:
    with open(path, encoding="utf-8") as fh:
        return parse_problem_file(fh.read())


def fixture_path(name: str):
    return resources.files("brickwork") / "fixtures" / name


def load_fixture(name: str) -> Problem:
    if not name.endswith(".json"):
        name += ".json"
    return parse_problem_file(fixture_path(name).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# bricks


def _entry_json(b: Brick, e):
    if isinstance(e, int):
        return e
    return [b.cement_names[e.piece] if b.cement_names else e.piece, e.copy]


def brick_to_json(b: Brick) -> dict:
    names = b.names or tuple(str(x) for x in range(b.ngens))
    cn = b.cement_names or tuple(str(c) for c in range(b.ncement))
    return {
        "size": b.size,
        "generators": list(names),
        "shape": [b.size, list(b.handle_counts)],
        "table": [[_entry_json(b, e) for e in row] for row in b.rows()],
        "handles": [{"type": t + 1, "copy": j, "points": {cn[c]: w for c, w in sorted(th.items())}}
                    for (t, j), th in sorted(b.handles.items())],
        "fixed_points": dict(zip(names, b.fixed_points())),
    }


def brick_from_json(doc: dict, pres: Presentation, data: Optional[JumpData]) -> Brick:
    """Rebuild (and re-verify) a brick from its JSON document."""
    alph = pres.alphabet
    gens = doc.get("generators", list(alph.names))
    order = [alph.index(g) for g in gens]
    rows = []
    for row in doc["table"]:
        out = [None] * len(alph)
        for x, e in zip(order, row):
            if isinstance(e, list):
                c = data.cement.index(e[0]) if isinstance(e[0], str) else int(e[0])
                out[x] = (c, int(e[1]))
            else:
                out[x] = int(e)
        rows.append(out)
    t = PartialCosetTable.from_rows(pres, data, rows)
    return extract_brick(t, data, pres)


def load_brick(path, pres, data) -> Brick:
    with open(path, encoding="utf-8") as fh:
        return brick_from_json(json.load(fh), pres, data)


# ---------------------------------------------------------------------------
# DOT


def _dot_id(s: str) -> str:
    return s if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", s) else json.dumps(s)


def emit_dot(obj, name: str = "G") -> str:
    """DOT text for a brick or a mosaic.

    One node per point and one labelled edge per generator image; an
    involution contributes one undirected edge per 2-cycle.  Cement cells
    of a brick become dashed half-edges to small labelled stub nodes.
    """
    from .mosaic import Mosaic

    if isinstance(obj, Mosaic):
        return _mosaic_dot(obj, name)
    if isinstance(obj, Brick):
        return _brick_dot(obj, name)
    raise ValueError("nothing to render")


def _edges(n: int, images: dict, inverse, names) -> list:
    """``images[x]`` maps points to points (partial allowed)."""
    lines = []
    done = set()
    for x in range(len(names)):
        ix = inverse[x]
        if x in done:
            continue
        if ix != x:
            # draw only one of each inverse pair
            done.add(ix)
        for w in range(1, n + 1):
            v = images[x].get(w)
            if v is None:
                continue
            if ix == x:
                if v < w:
                    continue
                attr = f'label="{names[x]}", dir=none'
            else:
                attr = f'label="{names[x]}"'
            lines.append(f"  {w} -> {v} [{attr}];")
    return lines


def _brick_dot(b: Brick, name: str) -> str:
    names = b.names or tuple(str(x) for x in range(b.ngens))
    cn = b.cement_names or tuple(f"c{c + 1}" for c in range(b.ncement))
    inverse = b.inverse or tuple(range(b.ngens))
    lines = [f"digraph {_dot_id(name)} {{", "  node [shape=circle];"]
    lines += [f"  {w};" for w in range(1, b.size + 1)]
    images = {x: {} for x in range(b.ngens)}
    for w in range(1, b.size + 1):
        for x in range(b.ngens):
            v = b.image(w, x)
            if v is not None:
                images[x][w] = v
    lines += _edges(b.size, images, inverse, names)
    for (c, j), (w, x) in sorted(b.cement_cells().items(), key=lambda kv: kv[1]):
        stub = f"stub_{cn[c]}_{j}"
        lines.append(f'  {_dot_id(stub)} [shape=plaintext, label="{cn[c]}.{j}"];')
        lines.append(f'  {w} -> {_dot_id(stub)} [label="{names[x]}", style=dashed];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _mosaic_dot(m, name: str) -> str:
    alph = m.alphabet
    n = m.degree
    lines = [f"digraph {_dot_id(name)} {{", "  node [shape=circle];"]
    for lam, (start, size) in enumerate(m.blocks):
        lines.append(f"  subgraph cluster_{lam + 1} {{")
        lines.append(f'    label="brick {lam + 1}";')
        lines += [f"    {p};" for p in range(start, start + size)]
        lines.append("  }")
    images = {x: {p: int(m.phi[x][p - 1]) + 1 for p in range(1, n + 1)} for x in range(len(alph))}
    body = _edges(n, images, alph.inverse, alph.names)
    block_of = m.block_of
    for k, line in enumerate(body):
        a, _, rest = line.strip().partition(" -> ")
        b = rest.split(" ", 1)[0]
        if block_of(int(a)) != block_of(int(b)):
            body[k] = line.replace("]", ", style=bold, color=red]")
    lines += body
    lines.append("}")
    return "\n".join(lines) + "\n"
