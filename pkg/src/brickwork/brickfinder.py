"""Backtrack search for bricks on partial coset tables.

A partial coset table has rows ``1..N`` and one column per symbol.  Entries
are stored in a flat list of ints:

* ``0``   undefined,
* ``w>0`` the point ``w``,
* ``<0``  the cement point ``(c, j)``, encoded by :func:`cement_code`.

Rows are never merged; a point value is only ever offered for a cell whose
mirror cell is still free, so there is no coincidence handling.
"""

from __future__ import annotations

import logging
from collections import namedtuple
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .jumpdata import IncompatibleJumpData, JumpData, derive_groupoid_relators
from .presentation import Presentation

log = logging.getLogger(__name__)

Cement = namedtuple("Cement", "piece copy")
Contradiction = namedtuple("Contradiction", "kind row detail")

DEDUP_MODES = ("invariants", "canonical", "all")
DEDUCTION_MODES = ("checks-only", "stays", "full")
STRATEGIES = ("first", "min")


class BrickInvariantError(AssertionError):
    """A completed table failed the brick conditions (an engine bug)."""


def cement_code(c: int, j: int, ncement: int) -> int:
    return -(1 + c + ncement * (j - 1))


def decode_cement(code: int, ncement: int) -> Cement:
    v = -code - 1
    return Cement(v % ncement, v // ncement + 1)


@dataclass
class SearchConfig:
    bound: int
    initial_cement: Optional[int] = None  # None selects low-index mode
    dedup: str = "canonical"
    deduction: str = "checks-only"
    strategy: str = "min"
    jobs: int = 1
    split_depth: int = 2
    max_nodes: Optional[int] = None

    def __post_init__(self):
        if self.bound < 1:
            raise ValueError("bound must be at least 1")
        if self.dedup not in DEDUP_MODES:
            raise ValueError(f"dedup must be one of {DEDUP_MODES}")
        if self.deduction not in DEDUCTION_MODES:
            raise ValueError(f"deduction must be one of {DEDUCTION_MODES}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")


class PartialCosetTable:
    """Search state: a partial coset table with an undo trail."""

    def __init__(self, ngens: int, inverse, ncement: int, nhandle_types: int,
                 bound: int, handle_type=(), xi=()):
        self.ng = ngens
        self.inv = tuple(inverse)
        self.nc = ncement
        self.bound = bound
        self.cells = [0] * (bound * ngens)
        self.n_rows = 1
        self.defined = 0
        self.jmax = [0] * nhandle_types
        self.handle_type = tuple(handle_type)
        self.xi = tuple(xi)
        self.loc: dict = {}  # cement code -> cell index
        self.trail: list = []

    @classmethod
    def for_data(cls, pres: Presentation, data: Optional[JumpData], bound: int):
        if data is None:
            return cls(len(pres.alphabet), pres.alphabet.inverse, 0, 0, bound)
        return cls(len(pres.alphabet), pres.alphabet.inverse, len(data.cement),
                   len(data.handles), bound, data.handles.class_of, data.cement.xi)

    # -- access ---------------------------------------------------------
    def get(self, row: int, x: int):
        """Point (int), :class:`Cement`, or ``None`` if undefined."""
        v = self.cells[(row - 1) * self.ng + x]
        if v == 0:
            return None
        if v > 0:
            return v
        return decode_cement(v, self.nc)

    def undefined_cells(self) -> list:
        ng = self.ng
        return [(i // ng + 1, i % ng) for i in range(self.n_rows * ng) if self.cells[i] == 0]

    def is_complete(self) -> bool:
        return self.defined == self.n_rows * self.ng

    def rows(self) -> list:
        ng = self.ng
        return [tuple(self.cells[i * ng:(i + 1) * ng]) for i in range(self.n_rows)]

    # -- mutation -------------------------------------------------------
    def add_row(self):
        if self.n_rows >= self.bound:
            raise ValueError("point bound exceeded")
        self.trail.append(("n", self.n_rows))
        self.n_rows += 1

    def set_point(self, row: int, x: int, target: int):
        cells, ng = self.cells, self.ng
        a = (row - 1) * ng + x
        b = (target - 1) * ng + self.inv[x]
        cells[a] = target
        self.trail.append(a)
        self.defined += 1
        if b != a:
            cells[b] = row
            self.trail.append(b)
            self.defined += 1

    def set_cement(self, row: int, x: int, c: int, j: int):
        code = cement_code(c, j, self.nc)
        a = (row - 1) * self.ng + x
        self.cells[a] = code
        self.loc[code] = a
        self.trail.append(a)
        self.defined += 1
        t = self.handle_type[c]
        if j > self.jmax[t]:
            self.trail.append(("j", t, self.jmax[t]))
            self.jmax[t] = j

    def undo(self, mark: int):
        trail, cells, loc = self.trail, self.cells, self.loc
        while len(trail) > mark:
            e = trail.pop()
            if type(e) is int:
                v = cells[e]
                if v < 0:
                    del loc[v]
                cells[e] = 0
                self.defined -= 1
            elif e[0] == "n":
                self.n_rows = e[1]
            else:
                self.jmax[e[1]] = e[2]

    # -- construction helpers -------------------------------------------
    @classmethod
    def from_rows(cls, pres: Presentation, data: Optional[JumpData], rows, bound=None):
        """Build a table from rows of entries (int point, ``(c, j)`` pair, or ``None``).

        Only the ``(row, x)`` side of each point pair needs to be consistent;
        both sides are read as given.
        """
        rows = list(rows)
        t = cls.for_data(pres, data, bound or len(rows))
        t.n_rows = len(rows)
        for w, row in enumerate(rows, start=1):
            for x, e in enumerate(row):
                i = (w - 1) * t.ng + x
                if e is None or e == 0:
                    continue
                if isinstance(e, tuple):
                    c, j = e
                    code = cement_code(c, j, t.nc)
                    if code in t.loc:
                        raise ValueError(f"cement {e} occurs twice")
                    t.cells[i] = code
                    t.loc[code] = i
                    ht = t.handle_type[c]
                    t.jmax[ht] = max(t.jmax[ht], j)
                else:
                    t.cells[i] = int(e)
                t.defined += 1
        return t

    def check_invariants(self) -> list:
        """Return a list of violated table invariants (empty when sound)."""
        bad = []
        ng, cells, inv = self.ng, self.cells, self.inv
        N = self.n_rows
        seen_cement = {}
        for x in range(ng):
            images = {}
            for w in range(1, N + 1):
                v = cells[(w - 1) * ng + x]
                if v > 0:
                    if v > N:
                        bad.append(f"row {w} col {x}: point {v} beyond N={N}")
                        continue
                    if cells[(v - 1) * ng + inv[x]] != w:
                        bad.append(f"pair symmetry fails at ({w},{x})")
                    if v in images:
                        bad.append(f"column {x} repeats point {v}")
                    images[v] = w
                elif v < 0:
                    c = decode_cement(v, self.nc).piece
                    if self.xi and self.xi[c] != x:
                        bad.append(f"cement piece {c} in column {x} but xi={self.xi[c]}")
                    if v in seen_cement:
                        bad.append(f"cement {decode_cement(v, self.nc)} occurs twice")
                    seen_cement[v] = (w, x)
        for i in range(N * ng, len(cells)):
            if cells[i] != 0:
                bad.append(f"cell {i} beyond the current rows is set")
                break
        if set(seen_cement) != set(self.loc):
            bad.append("cement location index out of sync")
        # reachability from row 1 along defined point moves
        reached = {1}
        todo = [1]
        while todo:
            w = todo.pop()
            for x in range(ng):
                v = cells[(w - 1) * ng + x]
                if v > 0 and v not in reached:
                    reached.add(v)
                    todo.append(v)
        if len(reached) != N:
            bad.append(f"rows {sorted(set(range(1, N + 1)) - reached)} unreachable from 1")
        if self.defined != sum(1 for i in range(N * ng) if cells[i] != 0):
            bad.append("defined-cell counter out of sync")
        return bad


# ---------------------------------------------------------------------------
# table checks


def check_relators(table: PartialCosetTable, pres: Presentation) -> Optional[Contradiction]:
    """Trace every relator from every row; ``None`` when consistent.

    A trace is abandoned at an undefined or cement entry.  A contradiction is
    a fully defined trace not returning to its start, or forward and
    backward traces meeting with different values.
    """
    cells, ng, inv = table.cells, table.ng, table.inv
    for w in range(1, table.n_rows + 1):
        for r in pres.relators:
            L = len(r)
            f, i = w, 0
            while i < L:
                v = cells[(f - 1) * ng + r[i]]
                if v <= 0:
                    break
                f, i = v, i + 1
            if i == L:
                if f != w:
                    return Contradiction("relator", w, (r, f))
                continue
            b, j = w, L
            while j > i:
                v = cells[(b - 1) * ng + inv[r[j - 1]]]
                if v <= 0:
                    break
                b, j = v, j - 1
            if j == i and f != b:
                return Contradiction("relator", w, (r, f, b))
    return None


def check_stays(table: PartialCosetTable, data: JumpData, deduce: bool = False):
    """Trace every stay from every cement cell; ``None`` when consistent.

    With ``deduce`` an undefined endpoint cell of a fully traced stay is
    filled with the forced cement point.
    """
    cells, ng, nc = table.cells, table.ng, table.nc
    xi = data.cement.xi
    changed = True
    while changed:
        changed = False
        for code, idx in sorted(table.loc.items(), key=lambda kv: kv[1]):
            c, j = decode_cement(code, nc)
            w = idx // ng + 1
            for st in data.stays_from(c):
                p = w
                complete = True
                for y in st.word:
                    v = cells[(p - 1) * ng + y]
                    if v == 0:
                        complete = False
                        break
                    if v < 0:
                        return Contradiction("stay", w, (st, "cement inside trace"))
                    p = v
                if not complete:
                    continue
                e = cells[(p - 1) * ng + xi[st.end]]
                want = cement_code(st.end, j, nc)
                if e == want:
                    continue
                if e > 0:
                    return Contradiction("stay", w, (st, "ends at a point entry", p))
                if e < 0:
                    return Contradiction("stay", w, (st, "ends at other cement", p))
                if deduce:
                    if want in table.loc:
                        return Contradiction("stay", w, (st, "forced cement already used", p))
                    table.set_cement(p, xi[st.end], st.end, j)
                    changed = True
                    break
            if changed:
                break
    return None


# ---------------------------------------------------------------------------
# candidates and cell selection


def enumerate_candidates(table: PartialCosetTable, cell, config: SearchConfig,
                         data: Optional[JumpData]) -> list:
    """Possible entries for an undefined cell, in trial order.

    Points ``w'`` with free mirror cell, then the new point ``N+1`` (within the
    bound), then cement points reusing a copy index of the handle type,
    then one fresh copy index per applicable piece.
    """
    w, x = cell
    ng, cells, N = table.ng, table.cells, table.n_rows
    ix = table.inv[x]
    out: list = [v for v in range(1, N + 1) if cells[(v - 1) * ng + ix] == 0]
    if N < config.bound:
        out.append(N + 1)
    if config.initial_cement is None or data is None:
        return out
    pieces = [c for c in range(len(data.cement)) if data.cement.xi[c] == x]
    ht = data.handles.class_of
    for c in pieces:
        for j in range(1, table.jmax[ht[c]] + 1):
            if cement_code(c, j, table.nc) not in table.loc:
                out.append(Cement(c, j))
    for c in pieces:
        out.append(Cement(c, table.jmax[ht[c]] + 1))
    return out


def _near_complete_cells(table: PartialCosetTable, pres: Presentation,
                         data: Optional[JumpData]) -> dict:
    """Undefined cells that are the last gap of a relator or stay trace.

    Maps the cell to the set of values that would close the trace.
    """
    cells, ng, inv = table.cells, table.ng, table.inv
    hot: dict = {}
    for w in range(1, table.n_rows + 1):
        for r in pres.relators:
            L = len(r)
            f, i = w, 0
            while i < L:
                v = cells[(f - 1) * ng + r[i]]
                if v <= 0:
                    break
                f, i = v, i + 1
            if i == L or v < 0:
                continue
            b, j = w, L
            while j > i + 1:
                v = cells[(b - 1) * ng + inv[r[j - 1]]]
                if v <= 0:
                    break
                b, j = v, j - 1
            if j == i + 1:
                hot.setdefault((f, r[i]), set()).add(b)
    if data is not None:
        nc, xi = table.nc, data.cement.xi
        for code, idx in table.loc.items():
            c, j = decode_cement(code, nc)
            for st in data.stays_from(c):
                p = idx // ng + 1
                for y in st.word:
                    v = cells[(p - 1) * ng + y]
                    if v <= 0:
                        p = None
                        break
                    p = v
                if p is None:
                    continue
                if cells[(p - 1) * ng + xi[st.end]] == 0:
                    hot.setdefault((p, xi[st.end]), set()).add(Cement(st.end, j))
    return hot


def select_disjoin_cell(table: PartialCosetTable, config: SearchConfig,
                        data: Optional[JumpData] = None,
                        pres: Optional[Presentation] = None):
    """The undefined cell with the fewest candidates.

    Cells at which a relator or stay trace is one step from completion are
    preferred at equal counts; remaining ties go to the least
    ``(row, symbol)``.  Returns ``None`` for a complete table.
    """
    undefined = table.undefined_cells()
    if not undefined:
        return None
    hot = _near_complete_cells(table, pres, data) if pres is not None else {}
    best, best_key = None, None
    for cell in undefined:
        n = _legal_count(table, cell, config, data, hot.get(cell))
        key = (n, 0 if cell in hot else 1, cell)
        if best_key is None or key < best_key:
            best, best_key = cell, key
    return best


def _legal_count(table, cell, config, data, forced) -> int:
    cands = enumerate_candidates(table, cell, config, data)
    if not forced:
        return len(cands)
    # a near-complete relator trace admits only its closing point, or cement
    return sum(1 for v in cands if not isinstance(v, int) or v in forced)


# ---------------------------------------------------------------------------
# bricks


@dataclass
class Brick:
    size: int
    ngens: int
    ncement: int
    cells: tuple  # flat encoded table, row-major
    handle_counts: tuple
    handles: dict  # (type, copy) -> {piece: row}
    names: Optional[tuple] = None  # symbol names, for display
    cement_names: Optional[tuple] = None
    inverse: Optional[tuple] = None
    _canon: Optional[tuple] = field(default=None, repr=False, compare=False)

    @property
    def shape(self) -> tuple:
        return (self.size, self.handle_counts)

    def entry(self, row: int, x: int):
        v = self.cells[(row - 1) * self.ngens + x]
        return v if v > 0 else decode_cement(v, self.ncement)

    def image(self, row: int, x: int) -> Optional[int]:
        """``row`` moved by ``x`` inside the brick, or ``None`` at a cement cell."""
        v = self.cells[(row - 1) * self.ngens + x]
        return v if v > 0 else None

    def cement_cell(self, c: int, j: int) -> tuple:
        """The cell ``(row, symbol)`` holding the cement point ``(c, j)``."""
        code = cement_code(c, j, self.ncement)
        i = self.cells.index(code)
        return (i // self.ngens + 1, i % self.ngens)

    def cement_cells(self) -> dict:
        ng = self.ngens
        return {decode_cement(v, self.ncement): (i // ng + 1, i % ng)
                for i, v in enumerate(self.cells) if v < 0}

    def fixed_points(self) -> tuple:
        ng = self.ngens
        return tuple(sum(1 for w in range(1, self.size + 1)
                         if self.cells[(w - 1) * ng + x] == w) for x in range(ng))

    def invariants(self) -> tuple:
        return brick_invariants(self)

    def canonical_form(self) -> tuple:
        if self._canon is None:
            self._canon = canonical_form(self.cells, self.size, self.ngens, self.ncement,
                                         _type_map(self))
        return self._canon

    def rows(self) -> list:
        return [tuple(self.entry(w, x) for x in range(self.ngens))
                for w in range(1, self.size + 1)]

    def evaluate(self, row: int, word) -> Optional[int]:
        """Follow ``word`` from ``row`` while it stays within the brick."""
        ng, cells = self.ngens, self.cells
        for x in word:
            v = cells[(row - 1) * ng + x]
            if v <= 0:
                return None
            row = v
        return row

    def format_table(self) -> str:
        names = self.names or tuple(str(x) for x in range(self.ngens))
        cn = self.cement_names or tuple(f"c{c + 1}" for c in range(self.ncement))
        width = max(4, len(str(self.size)) + 1)
        lines = [" " * width + "".join(f"{n:>{width + 3}}" for n in names)]
        for w in range(1, self.size + 1):
            row = []
            for x in range(self.ngens):
                e = self.entry(w, x)
                row.append(str(e) if isinstance(e, int) else f"{cn[e.piece]}.{e.copy}")
            lines.append(f"{w:>{width}}" + "".join(f"{s:>{width + 3}}" for s in row))
        return "\n".join(lines)


def _type_map(brick: Brick) -> tuple:
    # handle type of each cement piece, recovered from the handle records
    tm = [0] * brick.ncement
    for (t, _j), theta in brick.handles.items():
        for c in theta:
            tm[c] = t
    return tuple(tm)


def canonical_form(cells, size: int, ng: int, nc: int, type_of) -> tuple:
    """Relabelling-invariant form of a complete table.

    Breadth-first relabel from each start row (copy indices renumbered per
    handle type in order of appearance); the lexicographically least
    result is returned.
    """
    best = None
    for start in range(1, size + 1):
        label = {start: 1}
        order = [start]
        copies: dict = {}
        out = []
        k = 0
        abort = False
        while k < len(order):
            w = order[k]
            k += 1
            base = (w - 1) * ng
            for x in range(ng):
                v = cells[base + x]
                if v > 0:
                    lv = label.get(v)
                    if lv is None:
                        lv = len(order) + 1
                        label[v] = lv
                        order.append(v)
                    out.append(lv)
                else:
                    c, j = decode_cement(v, nc)
                    key = (type_of[c], j)
                    nj = copies.get(key)
                    if nj is None:
                        nj = sum(1 for t, _ in copies if t == type_of[c]) + 1
                        copies[key] = nj
                    out.append(cement_code(c, nj, nc))
            if best is not None and len(out) >= ng * 2:
                # prune once this prefix is already larger
                pre = best[:len(out)]
                if tuple(out) > pre:
                    abort = True
                    break
        if abort:
            continue
        if len(order) != size:
            raise BrickInvariantError("table is not transitive")
        cand = tuple(out)
        if best is None or cand < best:
            best = cand
    return best


def brick_invariants(b: Brick) -> tuple:
    """``(shape, fixed-point counts per generator)``."""
    return (b.shape, b.fixed_points())


def extract_brick(table: PartialCosetTable, data: Optional[JumpData],
                  pres: Optional[Presentation] = None) -> Brick:
    """Turn a completed table into a :class:`Brick`, verifying the brick conditions."""
    if not table.is_complete():
        raise BrickInvariantError("table has undefined entries")
    ng, nc, N = table.ng, table.nc, table.n_rows
    cells = tuple(table.cells[:N * ng])
    problems = table.check_invariants()
    if problems:
        raise BrickInvariantError("; ".join(problems))
    if data is None:
        if any(v < 0 for v in cells):
            raise BrickInvariantError("cement in a table without jump data")
        counts, handles = (), {}
        names = pres.alphabet.names if pres else None
        return Brick(N, ng, nc, cells, counts, handles, names, None, table.inv)
    xi = data.cement.xi
    classes = data.handles.classes
    cls_of = data.handles.class_of
    placed: dict = {}
    for i, v in enumerate(cells):
        if v < 0:
            c, j = decode_cement(v, nc)
            if xi[c] != i % ng:
                raise BrickInvariantError(f"cement {c} in column {i % ng} but xi={xi[c]}")
            placed[(c, j)] = i // ng + 1
    counts = []
    for t, cls in enumerate(classes):
        js = {j for (c, j) in placed if cls_of[c] == t}
        h = max(js, default=0)
        for c in cls:
            for j in range(1, h + 1):
                if (c, j) not in placed:
                    raise BrickInvariantError(f"handle {t},{j} lacks piece {c}")
        counts.append(h)
    handles = {}
    for t, cls in enumerate(classes):
        for j in range(1, counts[t] + 1):
            handles[(t, j)] = {c: placed[(c, j)] for c in cls}
    b = Brick(N, ng, nc, cells, tuple(counts), handles,
              data.alphabet.names, data.cement.names, table.inv)
    # (B1)(b): stays inside each handle land where the handle says
    for (t, j), theta in handles.items():
        for st in data.handles.graphs[t]:
            end = b.evaluate(theta[st.start], st.word)
            if end is None or end != theta[st.end]:
                raise BrickInvariantError(f"stay {st} broken in handle {t},{j}")
    return b


def verify_brick(b: Brick, pres: Presentation, data: Optional[JumpData]) -> list:
    """Independent check of a finished brick; returns the list of problems."""
    problems = []
    ng = b.ngens
    for w in range(1, b.size + 1):
        for r in pres.relators:
            p = w
            for x in r:
                p = b.image(p, x)
                if p is None:
                    break
            if p is not None and p != w:
                problems.append(f"relator {pres.alphabet.format(r)} moves {w}")
    for w in range(1, b.size + 1):
        for x in range(ng):
            v = b.image(w, x)
            if v is not None and b.image(v, pres.alphabet.inverse[x]) != w:
                problems.append(f"({w},{x}) not inverted")
    if data is not None:
        expected = sum(h * len(cls) for h, cls in zip(b.handle_counts, data.handles.classes))
        if len(b.cement_cells()) != expected:
            problems.append("cement cells do not match the handle counts")
        for (t, j), theta in b.handles.items():
            for c, w in theta.items():
                if b.cells[(w - 1) * ng + data.cement.xi[c]] != cement_code(c, j, b.ncement):
                    problems.append(f"handle {t},{j} piece {c} not at its cell")
            for st in data.handles.graphs[t]:
                p = theta[st.start]
                for x in st.word:
                    p = b.image(p, x)
                    if p is None:
                        break
                if p != theta[st.end]:
                    problems.append(f"stay {data.format_stay(st)} fails in handle {t},{j}")
    seen = {1}
    todo = [1]
    while todo:
        w = todo.pop()
        for x in range(ng):
            v = b.image(w, x)
            if v is not None and v not in seen:
                seen.add(v)
                todo.append(v)
    if len(seen) != b.size:
        problems.append("not transitive")
    return problems


# ---------------------------------------------------------------------------
# the search engine


class BrickFinder:
    """Depth-first search over partial coset tables.

    Iterate :meth:`run` for the bricks; afterwards ``bound_hit`` tells
    whether the point bound ever cut off a new-point candidate.
    """

    def __init__(self, pres: Presentation, data: Optional[JumpData], config: SearchConfig,
                 on_node=None):
        self.pres = pres
        self.config = config
        self.low_index = config.initial_cement is None
        self.data = data
        if not self.low_index:
            if data is None:
                raise ValueError("an initial cement piece needs jump data")
            derive_groupoid_relators(data, pres)  # refuses incompatible data
        self.on_node = on_node
        self.bound_hit = False
        self.nodes = 0
        self.emitted = 0
        alph = pres.alphabet
        ng = len(alph)
        self.ng = ng
        self.inv = alph.inverse
        self.rels_by_first = [tuple(pres.relators_starting_with(x)) for x in range(ng)]
        nc = len(data.cement) if data is not None else 0
        self.nc = nc
        if self.low_index:
            cementable = [False] * ng
        else:
            cementable = [x in data.cementable for x in range(ng)]
        self.cementable = cementable
        deduction = config.deduction
        self.deduce_rel = [deduction == "full" and not cementable[x] for x in range(ng)]
        self.deduce_stays = deduction in ("stays", "full")
        if data is not None and not self.low_index:
            xi = data.cement.xi
            self.stays_from = [tuple((st.word, st.end, xi[st.end]) for st in data.stays_from(c))
                               for c in range(nc)]
            self.pieces_for = [tuple(c for c in range(nc) if xi[c] == x) for x in range(ng)]
            self.type_of = data.handles.class_of
        else:
            self.stays_from = []
            self.pieces_for = [()] * ng
            self.type_of = ()

    # -- state ----------------------------------------------------------
    def _new_table(self) -> PartialCosetTable:
        data = None if self.low_index else self.data
        return PartialCosetTable.for_data(self.pres, data, self.config.bound)

    def _seed(self, t: PartialCosetTable) -> bool:
        self.queue = []
        if self.low_index:
            return True
        c = self.config.initial_cement
        t.set_cement(1, self.data.cement.xi[c], c, 1)
        return self._propagate(t)

    def _assign(self, t: PartialCosetTable, cell: int, cand) -> bool:
        ng = self.ng
        w, x = cell // ng + 1, cell % ng
        if type(cand) is int:
            if cand > t.n_rows:
                t.add_row()
            if t.cells[(cand - 1) * ng + self.inv[x]] != 0 or t.cells[cell] != 0:
                return False
            t.set_point(w, x, cand)
            self.queue.append((w, x))
        else:
            t.set_cement(w, x, cand.piece, cand.copy)
        return self._propagate(t)

    def _propagate(self, t: PartialCosetTable) -> bool:
        cells, ng, inv = t.cells, self.ng, self.inv
        queue = self.queue
        rels_by_first = self.rels_by_first
        deduce_rel = self.deduce_rel
        cementable = self.cementable
        while True:
            while queue:
                w, x = queue.pop()
                for r in rels_by_first[x]:
                    L = len(r)
                    f, i = w, 0
                    v = 0
                    while i < L:
                        v = cells[(f - 1) * ng + r[i]]
                        if v <= 0:
                            break
                        f = v
                        i += 1
                    if i == L:
                        if f != w:
                            queue.clear()
                            return False
                        continue
                    # backward from w; b is the point before letter j+1
                    b, j = w, L - 1
                    while j > i:
                        v2 = cells[(b - 1) * ng + inv[r[j]]]
                        if v2 <= 0:
                            break
                        b = v2
                        j -= 1
                    if j > i:
                        continue
                    y = r[i]
                    iy = inv[y]
                    back = cells[(b - 1) * ng + iy]
                    if back > 0:
                        # the rotation starting at `back` is fully traced and ends at f
                        queue.clear()
                        return False
                    if v < 0:
                        continue
                    if back < 0:
                        if not cementable[y]:
                            queue.clear()
                            return False
                        continue
                    if deduce_rel[y]:
                        a = (f - 1) * ng + y
                        cells[a] = b
                        t.trail.append(a)
                        t.defined += 1
                        m = (b - 1) * ng + iy
                        if m != a:
                            cells[m] = f
                            t.trail.append(m)
                            t.defined += 1
                        queue.append((f, y))
            if self.low_index:
                return True
            status = self._stays(t)
            if status is False:
                queue.clear()
                return False
            if not queue:
                return True

    def _stays(self, t: PartialCosetTable):
        cells, ng, nc = t.cells, self.ng, self.nc
        loc = t.loc
        stays_from = self.stays_from
        deduce = self.deduce_stays
        again = True
        while again:
            again = False
            for code, idx in list(loc.items()):
                v = -code - 1
                c = v % nc
                j = v // nc + 1
                w0 = idx // ng + 1
                for word, end, xend in stays_from[c]:
                    p = w0
                    for y in word:
                        v = cells[(p - 1) * ng + y]
                        if v <= 0:
                            if v < 0:
                                return False
                            p = 0
                            break
                        p = v
                    if p == 0:
                        continue
                    e = cells[(p - 1) * ng + xend]
                    want = -(1 + end + nc * (j - 1))
                    if e == want:
                        continue
                    if e != 0:
                        return False
                    if want in loc:
                        return False
                    if deduce:
                        t.set_cement(p, xend, end, j)
                        again = True
        return True

    def _candidates(self, t: PartialCosetTable, cell: int) -> list:
        ng = self.ng
        x = cell % ng
        ix = self.inv[x]
        cells = t.cells
        N = t.n_rows
        out = [v for v in range(1, N + 1) if cells[(v - 1) * ng + ix] == 0]
        if N < self.config.bound:
            out.append(N + 1)
        else:
            self.bound_hit = True
        pieces = self.pieces_for[x]
        if pieces:
            nc, loc, jmax, type_of = self.nc, t.loc, t.jmax, self.type_of
            for c in pieces:
                for j in range(1, jmax[type_of[c]] + 1):
                    if -(1 + c + nc * (j - 1)) not in loc:
                        out.append(Cement(c, j))
            for c in pieces:
                out.append(Cement(c, jmax[type_of[c]] + 1))
        return out

    def _select(self, t: PartialCosetTable, lo: int):
        """Index of the next cell to disjoin, or -1 if the table is complete."""
        if t.defined == t.n_rows * self.ng:
            return -1
        if self.config.strategy == "first":
            cells = t.cells
            i = lo
            while cells[i] != 0:
                i += 1
            return i
        data = None if self.low_index else self.data
        w, x = select_disjoin_cell(t, self.config, data, self.pres)
        return (w - 1) * self.ng + x

    def _emit(self, t: PartialCosetTable) -> Brick:
        self.emitted += 1
        return extract_brick(t, None if self.low_index else self.data, self.pres)

    # -- driving --------------------------------------------------------
    def _dfs(self, t: PartialCosetTable, lo: int, path=(), max_depth=None):
        """Yield ``("brick", path, Brick)`` and, at ``max_depth``, ``("job", path, None)``."""
        cell = self._select(t, lo)
        if cell < 0:
            yield ("brick", path, self._emit(t))
            return
        stack = [[cell, self._candidates(t, cell), 0, len(t.trail), list(path)]]
        max_nodes = self.config.max_nodes
        on_node = self.on_node
        while stack:
            frame = stack[-1]
            cell, cands, k, mark, fpath = frame
            t.undo(mark)
            if k >= len(cands):
                stack.pop()
                continue
            frame[2] = k + 1
            cand = cands[k]
            self.nodes += 1
            if max_nodes is not None and self.nodes > max_nodes:
                raise SearchAborted(self.nodes)
            if not self._assign(t, cell, cand):
                continue
            if on_node is not None:
                on_node(t)
            npath = fpath + [(cell, cand)]
            nxt = self._select(t, cell)
            if nxt < 0:
                yield ("brick", npath, self._emit(t))
                continue
            if max_depth is not None and len(npath) >= max_depth:
                yield ("job", npath, None)
                continue
            stack.append([nxt, self._candidates(t, nxt), 0, len(t.trail), npath])

    def replay(self, path) -> Optional[PartialCosetTable]:
        t = self._new_table()
        if not self._seed(t):
            return None
        for cell, cand in path:
            if not self._assign(t, cell, cand):
                return None
        return t

    def raw_bricks(self) -> Iterator[Brick]:
        """All bricks in search order, without deduplication."""
        if self.config.jobs > 1:
            yield from self._parallel()
            return
        t = self._new_table()
        if not self._seed(t):
            return
        for _kind, _path, b in self._dfs(t, 0):
            yield b

    def run(self) -> Iterator[Brick]:
        mode = self.config.dedup
        seen = set()
        for b in self.raw_bricks():
            if mode == "all":
                yield b
                continue
            key = brick_invariants(b) if mode == "invariants" else (b.shape, b.canonical_form())
            if key in seen:
                continue
            seen.add(key)
            yield b

    def _parallel(self) -> Iterator[Brick]:
        from concurrent.futures import ProcessPoolExecutor

        t = self._new_table()
        if not self._seed(t):
            return
        items = list(self._dfs(t, 0, max_depth=self.config.split_depth))
        jobs = [p for kind, p, _ in items if kind == "job"]
        results = {}
        with ProcessPoolExecutor(max_workers=self.config.jobs) as ex:
            futs = {i: ex.submit(_run_subtree, self.pres, self.data, self.config, p)
                    for i, p in enumerate(jobs)}
            for i, f in futs.items():
                results[i] = f.result()
        ji = 0
        for kind, _p, b in items:
            if kind == "brick":
                yield b
            else:
                bricks, bound_hit, nodes = results[ji]
                ji += 1
                self.bound_hit |= bound_hit
                self.nodes += nodes
                yield from bricks


class SearchAborted(RuntimeError):
    """The node budget of a search ran out."""


def _run_subtree(pres, data, config, path):
    f = BrickFinder(pres, data, config)
    t = f.replay(path)
    out = []
    if t is not None:
        lo = path[-1][0] if path else 0
        out = [b for _k, _p, b in f._dfs(t, lo, path)]
    return out, f.bound_hit, f.nodes


def run_search(pres: Presentation, data: Optional[JumpData], config: SearchConfig) -> Iterator[Brick]:
    """Stream the bricks found for ``config`` (deduplicated per ``config.dedup``)."""
    return BrickFinder(pres, data, config).run()


@dataclass
class SearchResult:
    bricks: list
    bound_hit: bool
    nodes: int


def find_bricks(pres: Presentation, data: Optional[JumpData], config: SearchConfig,
                on_node=None) -> SearchResult:
    f = BrickFinder(pres, data, config, on_node=on_node)
    bricks = list(f.run())
    return SearchResult(bricks, f.bound_hit, f.nodes)


__all__ = [
    "Brick", "BrickFinder", "BrickInvariantError", "Cement", "Contradiction",
    "IncompatibleJumpData", "PartialCosetTable", "SearchAborted", "SearchConfig",
    "SearchResult", "brick_invariants", "canonical_form", "check_relators", "check_stays",
    "enumerate_candidates", "extract_brick", "find_bricks", "run_search",
    "select_disjoin_cell", "verify_brick",
]
