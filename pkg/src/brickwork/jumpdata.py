"""Jump data: cement, stays, handle types and the groupoid relators.

The jump set is not stored; it is determined by the cement pieces, their
involution ``bar`` and the label map ``xi``.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .presentation import (Alphabet, MalformedInput, Presentation, cyclic_shift,
                           positions)

Stay = namedtuple("Stay", "start word end")


class JumpDataError(MalformedInput):
    """Jump data violating one of the structural conditions.

    ``kind`` is one of ``"involution"``, ``"xi"``, ``"word"``, ``"closure"``,
    ``"consistency"``.
    """

    def __init__(self, kind: str, message: str, detail=None):
        super().__init__(message)
        self.kind = kind
        self.detail = detail


class IncompatibleJumpData(Exception):
    """A relator shift admits no compatible factorisation."""

    def __init__(self, relator, cement, shift, offset, message):
        super().__init__(message)
        self.relator = relator
        self.cement = cement
        self.shift = shift
        self.offset = offset


@dataclass(frozen=True)
class CementSet:
    names: tuple
    bar: tuple  # cement index -> cement index
    xi: tuple  # cement index -> symbol index

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise MalformedInput(f"unknown cement piece {name!r}") from None


@dataclass(frozen=True)
class HandleTypePartition:
    classes: tuple  # tuple of sorted tuples of cement indices
    graphs: tuple  # per class, the stays internal to it
    class_of: tuple  # cement index -> class index

    def __len__(self):
        return len(self.classes)


@dataclass(frozen=True)
class JumpData:
    alphabet: Alphabet
    cement: CementSet
    stays: tuple  # of Stay, sorted
    handles: HandleTypePartition
    _from: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        by_start: dict = {c: [] for c in range(len(self.cement))}
        for st in self.stays:
            by_start[st.start].append(st)
        object.__setattr__(self, "_from", {c: tuple(v) for c, v in by_start.items()})

    def stays_from(self, c: int) -> tuple:
        return self._from[c]

    def token(self, stay: Stay) -> tuple:
        """The stay word followed by the label of its end piece."""
        return tuple(stay.word) + (self.cement.xi[stay.end],)

    @property
    def cementable(self) -> frozenset:
        return frozenset(self.cement.xi)

    def handle_type(self, c: int) -> int:
        return self.handles.class_of[c]

    def format_stay(self, st: Stay) -> str:
        n = self.cement.names
        return f"({n[st.start]}, {self.alphabet.format(st.word)}, {n[st.end]})"


@dataclass(frozen=True)
class GroupoidRelator:
    pieces: tuple  # cement indices c_1..c_s, denoting j(c_1)...j(c_s)
    relator: tuple  # originating relator
    cement: int
    shift: int


def _is_prefix(a: Sequence, b: Sequence) -> bool:
    return len(a) <= len(b) and tuple(b[:len(a)]) == tuple(a)


def close_stays(alphabet: Alphabet, stays: Iterable) -> tuple:
    """Add the inverse ``(c', w^-1, c)`` of every stay."""
    out = set()
    for c, w, d in stays:
        w = tuple(w)
        out.add(Stay(c, w, d))
        out.add(Stay(d, alphabet.invert(w), c))
    return tuple(sorted(out))


def compute_handle_types(ncement: int, stays: Iterable) -> HandleTypePartition:
    parent = list(range(ncement))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    stays = tuple(stays)
    for st in stays:
        a, b = find(st.start), find(st.end)
        if a != b:
            parent[max(a, b)] = min(a, b)
    roots: dict = {}
    for c in range(ncement):
        roots.setdefault(find(c), []).append(c)
    classes = tuple(sorted(tuple(v) for v in roots.values()))
    class_of = [0] * ncement
    for i, cls in enumerate(classes):
        for c in cls:
            class_of[c] = i
    graphs = tuple(tuple(st for st in stays if class_of[st.start] == i)
                   for i in range(len(classes)))
    return HandleTypePartition(classes, graphs, tuple(class_of))


def validate_jump_data(alphabet: Alphabet, cement: CementSet, stays: Iterable) -> JumpData:
    """Check the cement and stay conditions and compute the handle types.

    Raises :class:`JumpDataError` on the first violation.

    The consistency condition is checked on the tokens ``w xi(c')`` of the
    stays ``(c, w, c')`` sharing a first piece; see :meth:`JumpData.token`.
    """
    nc = len(cement)
    if not (len(cement.bar) == len(cement.xi) == nc):
        raise JumpDataError("involution", "cement tables differ in length")
    for c in range(nc):
        b = cement.bar[c]
        if not 0 <= b < nc or cement.bar[b] != c:
            raise JumpDataError("involution", f"bar is not an involution at {cement.names[c]}")
        if not 0 <= cement.xi[c] < len(alphabet):
            raise JumpDataError("xi", f"xi({cement.names[c]}) is not a symbol")
        if cement.xi[b] != alphabet.inverse[cement.xi[c]]:
            raise JumpDataError(
                "xi", f"xi({cement.names[b]}) != xi({cement.names[c]})^-1",
                (c, b))
    stays = tuple(sorted(Stay(c, tuple(w), d) for c, w, d in stays))
    for st in stays:
        if not (0 <= st.start < nc and 0 <= st.end < nc):
            raise JumpDataError("word", f"stay {st} refers to unknown cement")
        if any(not 0 <= x < len(alphabet) for x in st.word):
            raise JumpDataError("word", f"stay {st} uses an unknown symbol")
        if not alphabet.is_reduced(st.word):
            raise JumpDataError("word", f"stay word {alphabet.format(st.word)} is not reduced")
    present = set(stays)
    names = cement.names
    for st in stays:
        inv = Stay(st.end, alphabet.invert(st.word), st.start)
        if inv not in present:
            raise JumpDataError(
                "closure",
                f"stay ({names[st.start]}, {alphabet.format(st.word)}, {names[st.end]}) "
                f"lacks its inverse ({names[inv.start]}, {alphabet.format(inv.word)}, "
                f"{names[inv.end]})", inv)
    for i, a in enumerate(stays):
        ta = a.word + (cement.xi[a.end],)
        for b in stays[i + 1:]:
            if b.start != a.start:
                continue
            tb = b.word + (cement.xi[b.end],)
            if _is_prefix(ta, tb) or _is_prefix(tb, ta):
                short, long_ = (a, b) if len(ta) <= len(tb) else (b, a)
                raise JumpDataError(
                    "consistency",
                    f"stays from {names[a.start]} are not prefix-incomparable: "
                    f"{alphabet.format(short.word)} is a prefix of {alphabet.format(long_.word)}",
                    (a, b))
    handles = compute_handle_types(nc, stays)
    return JumpData(alphabet, cement, stays, handles)


def factorize_shift(data: JumpData, r: Sequence[int], c: int, k: int) -> list:
    """Factorise the ``k``-th shift of ``r`` starting with the jump at ``c``.

    Returns ``[(c_1, w_1), ..., (c_s, w_s)]`` with ``c_1 == c`` such that the
    shift equals ``xi(c_1) w_1 ... xi(c_s) w_s`` and every
    ``(bar(c_j), w_j, c_{j+1})`` is a stay (indices mod ``s``).
    """
    rk = cyclic_shift(r, k)
    xi, bar = data.cement.xi, data.cement.bar
    if rk[0] != xi[c]:
        raise ValueError(f"position {k} of the relator does not carry xi(c)")
    out = []
    cur, pos = c, 1
    while True:
        remaining = rk[pos:] + rk[:1]
        for st in data.stays_from(bar[cur]):
            tok = st.word + (xi[st.end],)
            if _is_prefix(tok, remaining):
                break
        else:
            fmt = data.alphabet.format
            raise IncompatibleJumpData(
                r, c, k, pos,
                f"relator {fmt(r)} shift {k} at {data.cement.names[c]}: "
                f"no stay from {data.cement.names[bar[cur]]} matches {fmt(rk[pos:])} "
                f"(offset {pos})")
        out.append((cur, st.word))
        if len(tok) == len(remaining):
            if st.end != c:
                fmt = data.alphabet.format
                raise IncompatibleJumpData(
                    r, c, k, pos,
                    f"relator {fmt(r)} shift {k} at {data.cement.names[c]}: "
                    f"factorisation closes at {data.cement.names[st.end]}")
            return out
        pos += len(tok)
        cur = st.end


def min_rotation(seq: Sequence) -> tuple:
    seq = tuple(seq)
    return min(seq[i:] + seq[:i] for i in range(len(seq)))


def derive_groupoid_relators(data: JumpData, pres: Presentation) -> tuple:
    """All groupoid relators, one per rotation class.

    Raises :class:`IncompatibleJumpData` for the first relator shift
    without a compatible factorisation.
    """
    found: dict = {}
    xi = data.cement.xi
    cls = data.handles.class_of
    bar = data.cement.bar
    for r in pres.relators:
        for c in range(len(data.cement)):
            for k in sorted(positions(xi[c], r)):
                fac = factorize_shift(data, r, c, k)
                pieces = tuple(p for p, _ in fac)
                for a, b in zip(pieces, pieces[1:] + pieces[:1]):
                    assert cls[bar[a]] == cls[b], "factorisation is not composable"
                key = min_rotation(pieces)
                if key not in found:
                    found[key] = GroupoidRelator(key, r, c, k)
    return tuple(found[k] for k in sorted(found, key=lambda p: (len(p), p)))


def format_groupoid_relator(data: JumpData, rel) -> str:
    pieces = rel.pieces if isinstance(rel, GroupoidRelator) else rel
    return "".join(f"j({data.cement.names[c]})" for c in pieces)
