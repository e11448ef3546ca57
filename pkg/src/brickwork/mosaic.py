"""Gluing placed bricks into permutation representations.

A placement puts a copy of a brick at each position ``λ = 0..M-1``.  The
handles of type ``i`` across all positions form the index set ``D_i`` of
pairs ``(λ, j)``.  A construction instruction gives, for every cement piece
``c``, a bijection ``ζ(c): D(c) -> D(c̄)``; following a cement entry
``(c, j)`` at position ``λ`` jumps to the handle ``(λ, j)·ζ(c)`` and lands
on the point that carries ``(c̄, j')`` there.

Positions are 0-based in code; mosaic points are numbered ``1..n`` in
placement order (bricks in ``λ`` order, rows in order inside a brick).
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .jumpdata import GroupoidRelator, JumpData
from .presentation import Alphabet, MalformedInput, Presentation


class InstructionError(ValueError):
    """A ζ(c) is defined on the wrong set, or a precondition fails."""


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    witness: object = None


@dataclass(frozen=True)
class Placement:
    beta: tuple  # position -> key into the brick collection

    def __len__(self):
        return len(self.beta)


@dataclass(frozen=True)
class HandleIndexSets:
    sets: tuple  # handle type -> tuple of (λ, j)
    type_of: tuple  # cement piece -> handle type

    def domain(self, c: int) -> tuple:
        return self.sets[self.type_of[c]]


def handle_index_sets(bricks: Mapping, placement: Placement, data: JumpData) -> HandleIndexSets:
    ntypes = len(data.handles)
    sets = []
    for i in range(ntypes):
        d = []
        for lam, key in enumerate(placement.beta):
            counts = bricks[key].handle_counts
            h = counts[i] if counts else 0
            d.extend((lam, j) for j in range(1, h + 1))
        sets.append(tuple(d))
    return HandleIndexSets(tuple(sets), data.handles.class_of)


@dataclass(frozen=True)
class ConstructionInstruction:
    zeta: dict  # piece -> {(λ, j): (λ', j')}

    @classmethod
    def from_maps(cls, data: JumpData, maps: Mapping) -> "ConstructionInstruction":
        """Fill in ``ζ(c̄)`` as the inverse of ``ζ(c)`` wherever only one is given."""
        bar = data.cement.bar
        zeta = {c: dict(m) for c, m in maps.items()}
        for c, m in list(zeta.items()):
            if bar[c] not in zeta:
                zeta[bar[c]] = {v: k for k, v in m.items()}
        return cls(zeta)

    def __getitem__(self, c):
        return self.zeta.get(c, {})


def _check_domains(inst: ConstructionInstruction, sets: HandleIndexSets, data: JumpData):
    bar = data.cement.bar
    for c in range(len(data.cement)):
        dom, cod = set(sets.domain(c)), set(sets.domain(bar[c]))
        z = inst[c]
        if set(z) != dom:
            extra = sorted(set(z) - dom)
            missing = sorted(dom - set(z))
            raise InstructionError(
                f"ζ({data.cement.names[c]}) is defined on the wrong set"
                f" (extra {extra}, missing {missing})")
        stray = sorted(set(z.values()) - cod)
        if stray:
            raise InstructionError(
                f"ζ({data.cement.names[c]}) maps outside D({data.cement.names[bar[c]]}): {stray}")


def verify_instruction(inst: ConstructionInstruction, sets: HandleIndexSets, data: JumpData,
                       relators: Sequence) -> list:
    """Violations of bijectivity, ``ζ(c̄) = ζ(c)^-1`` and the groupoid relators.

    An empty list means the instruction is valid.  Relator violations are
    reported for the first start handle that is not returned to itself.
    Raises :class:`InstructionError` when a domain does not match.
    """
    _check_domains(inst, sets, data)
    names, bar = data.cement.names, data.cement.bar
    out = []
    for c in range(len(data.cement)):
        z = inst[c]
        if len(set(z.values())) != len(z):
            out.append(Violation("bijection", f"ζ({names[c]}) is not injective", c))
    if out:
        return out
    for c in range(len(data.cement)):
        zc, zb = inst[c], inst[bar[c]]
        for d in sorted(zc):
            if zb.get(zc[d]) != d:
                out.append(Violation(
                    "inverse", f"ζ({names[bar[c]]}) is not the inverse of ζ({names[c]}) at {d}",
                    (c, d)))
                break
    for rel in relators:
        pieces = rel.pieces if isinstance(rel, GroupoidRelator) else tuple(rel)
        for d in sorted(inst[pieces[0]]):
            e = d
            for c in pieces:
                e = inst[c].get(e)
                if e is None:
                    break
            if e != d:
                text = "".join(f"j({names[c]})" for c in pieces)
                out.append(Violation("relator", f"{text} moves handle {d} to {e}", (pieces, d)))
                break
    return out


def make_circle_instruction(bricks: Mapping, placement: Placement, data: JumpData, piece,
                            relators: Sequence = ()) -> ConstructionInstruction:
    """Join the placed bricks in a circle through ``piece``.

    ``ζ(piece)`` sends ``(λ, 1)`` to ``(λ+1 mod M, 1)`` and ``ζ(piece̅)`` goes
    back.  Pieces tied to these by a two-letter groupoid relator
    ``j(a)j(b)`` get ``ζ(b) = ζ(a)^-1``; any other piece whose handle type
    is present must have ``c̄`` of the same type and is given the identity.
    """
    if isinstance(piece, str):
        piece = data.cement.index(piece)
    bar = data.cement.bar
    t_of = data.handles.class_of
    M = len(placement)
    if M == 0:
        raise InstructionError("empty placement")
    for lam, key in enumerate(placement.beta):
        counts = bricks[key].handle_counts
        for t in {t_of[piece], t_of[bar[piece]]}:
            if counts[t] != 1:
                raise InstructionError(
                    f"brick at position {lam + 1} has {counts[t]} handles of type {t + 1}, needs 1")
    step = {(lam, 1): ((lam + 1) % M, 1) for lam in range(M)}
    return complete_instruction(bricks, placement, data, {piece: step}, relators)


def complete_instruction(bricks: Mapping, placement: Placement, data: JumpData, maps: Mapping,
                         relators: Sequence = ()) -> ConstructionInstruction:
    """Extend partial ``ζ`` maps to every cement piece.

    ``ζ(c̄)`` defaults to the inverse of ``ζ(c)``; a two-letter relator
    ``j(a)j(b)`` gives ``ζ(b) = ζ(a)^-1``.  A piece still without a rule gets
    the identity, which needs ``c`` and ``c̄`` to share a handle type.
    """
    bar = data.cement.bar
    t_of = data.handles.class_of
    known = {}
    for c, m in maps.items():
        known[c] = dict(m)
    for c in list(known):
        known.setdefault(bar[c], {v: k for k, v in known[c].items()})
    pairs = [tuple(r.pieces if isinstance(r, GroupoidRelator) else r) for r in relators]
    pairs = [p for p in pairs if len(p) == 2]
    changed = True
    while changed:
        changed = False
        for a, b in pairs:
            for x, y in ((a, b), (b, a)):
                if x in known and y not in known:
                    known[y] = {v: k for k, v in known[x].items()}
                    known.setdefault(bar[y], dict(known[x]))
                    changed = True
    sets = handle_index_sets(bricks, placement, data)
    for c in range(len(data.cement)):
        if c in known:
            continue
        dom = sets.domain(c)
        if dom and t_of[bar[c]] != t_of[c]:
            raise InstructionError(
                f"no rule for ζ({data.cement.names[c]}) between different handle types")
        known[c] = {d: d for d in dom}
    return ConstructionInstruction(known)


@dataclass
class Mosaic:
    alphabet: Alphabet
    degree: int
    blocks: tuple  # per position: (first point, size)
    phi: tuple  # per symbol: 0-based image array
    provenance: dict = field(default_factory=dict, repr=False)

    def block_of(self, p: int) -> int:
        """0-based position of the brick copy holding point ``p``."""
        starts = [s for s, _ in self.blocks]
        return bisect.bisect_right(starts, p) - 1

    def image(self, p: int, x) -> int:
        if isinstance(x, str):
            x = self.alphabet.index(x)
        return int(self.phi[x][p - 1]) + 1

    def permutation(self, x) -> np.ndarray:
        if isinstance(x, str):
            x = self.alphabet.index(x)
        return self.phi[x]

    def cycles(self, x) -> str:
        return cycle_string(self.permutation(x))

    def perm_group(self):
        from .permanalysis import PermGroup

        return PermGroup.from_mosaic(self)


def cycle_string(perm) -> str:
    """Cycle notation (1-based, fixed points omitted); ``()`` for the identity."""
    perm = np.asarray(perm)
    seen = np.zeros(len(perm), dtype=bool)
    parts = []
    for i in range(len(perm)):
        if seen[i] or perm[i] == i:
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j + 1)
            j = int(perm[j])
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) or "()"


def parse_cycles(text: str, n: Optional[int] = None) -> list:
    """Parse ``"(1 2 3)(4 5)"`` into a 0-based image list of length ``n``."""
    cycles = []
    for m in re.finditer(r"\(([^()]*)\)", text):
        body = m.group(1).replace(",", " ").split()
        cycles.append([int(v) for v in body])
    if re.sub(r"\([^()]*\)|\s", "", text):
        raise MalformedInput(f"bad cycle notation {text!r}")
    top = max((v for c in cycles for v in c), default=0)
    n = max(n or 0, top)
    perm = list(range(n))
    seen = set()
    for c in cycles:
        for k, v in enumerate(c):
            if v < 1 or v in seen:
                raise MalformedInput(f"bad cycle notation {text!r}")
            seen.add(v)
            perm[v - 1] = c[(k + 1) % len(c)] - 1
    return perm


def build_mosaic(bricks: Mapping, placement: Placement, inst: ConstructionInstruction,
                 data: JumpData, pres: Presentation, verify: bool = True) -> Mosaic:
    """Assemble the mosaic.

    With ``verify`` (the default) the instruction is checked first, raising
    :class:`InstructionError` if it is invalid, and the result is run through
    :func:`verify_mosaic`, raising ``AssertionError`` on failure.  Without it
    the bricks are glued as instructed, which is useful for testing.
    """
    alph = pres.alphabet
    if verify:
        sets = handle_index_sets(bricks, placement, data)
        bad = verify_instruction(inst, sets, data, _groupoid_relators(data, pres))
        if bad:
            raise InstructionError(bad[0].message)
    offsets, blocks, start = [], [], 1
    for key in placement.beta:
        b = bricks[key]
        if b.ngens != len(alph):
            raise InstructionError("brick and presentation have different alphabets")
        offsets.append(start - 1)
        blocks.append((start, b.size))
        start += b.size
    n = start - 1
    phi = [np.empty(n, dtype=np.int64) for _ in range(len(alph))]
    for lam, key in enumerate(placement.beta):
        b = bricks[key]
        off = offsets[lam]
        for w in range(1, b.size + 1):
            for x in range(len(alph)):
                e = b.entry(w, x)
                if isinstance(e, int):
                    phi[x][off + w - 1] = off + e - 1
                    continue
                c, j = e
                lam2, j2 = inst[c][(lam, j)]
                cb = data.cement.bar[c]
                w2, col = bricks[placement.beta[lam2]].cement_cell(cb, j2)
                assert col == alph.inverse[x], "cement label does not match"
                phi[x][off + w - 1] = offsets[lam2] + w2 - 1
    m = Mosaic(alph, n, tuple(blocks), tuple(phi),
               {"bricks": bricks, "placement": placement, "instruction": inst,
                "presentation": pres})
    if verify:
        bad = verify_mosaic(m, pres)
        if bad:
            raise AssertionError(f"mosaic failed verification: {bad[0].message}")
    return m


def _groupoid_relators(data: JumpData, pres: Presentation) -> tuple:
    from .jumpdata import derive_groupoid_relators

    return derive_groupoid_relators(data, pres)


def _relator_reps(pres: Presentation) -> list:
    # one word per rotation-and-inversion class is enough when every point is checked
    seen, reps = set(), []
    alph = pres.alphabet
    for r in pres.relators:
        if r in seen:
            continue
        reps.append(r)
        for v in (r, alph.invert(r)):
            seen.update(v[k:] + v[:k] for k in range(len(v)))
    return reps


def verify_mosaic(m: Mosaic, pres: Presentation) -> list:
    """Check bijectivity, ``φ(x)φ(x^-1) = 1`` and every relator on every point.

    Returns a list of :class:`Violation` with a witness point (1-based).
    """
    alph = pres.alphabet
    n = m.degree
    ident = np.arange(n)
    out = []
    for x, p in enumerate(m.phi):
        if len(p) != n or np.any(p < 0) or np.any(p >= n) or len(np.unique(p)) != n:
            out.append(Violation("bijection", f"φ({alph.names[x]}) is not a permutation", x))
    if out:
        return out
    for x, p in enumerate(m.phi):
        q = m.phi[alph.inverse[x]][p]
        bad = np.nonzero(q != ident)[0]
        if len(bad):
            w = int(bad[0]) + 1
            out.append(Violation(
                "inverse", f"φ({alph.names[x]})φ({alph.names[alph.inverse[x]]}) moves point {w}", w))
    for r in _relator_reps(pres):
        q = ident
        for x in r:
            q = m.phi[x][q]
        bad = np.nonzero(q != ident)[0]
        if len(bad):
            w = int(bad[0]) + 1
            out.append(Violation(
                "relator", f"relator {alph.format(r)} moves point {w} to {int(q[w - 1]) + 1}",
                (r, w)))
    return out


@dataclass(frozen=True)
class ConnectivityGraph:
    nodes: tuple
    edges: frozenset  # unordered pairs of positions
    components: tuple

    @property
    def connected(self) -> bool:
        return len(self.components) <= 1


def connectivity_graph(m: Mosaic) -> ConnectivityGraph:
    """Positions joined whenever some ζ(c) sends a handle of one to a handle of the other."""
    inst = m.provenance.get("instruction")
    M = len(m.blocks)
    parent = list(range(M))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    edges = set()
    if inst is not None:
        for z in inst.zeta.values():
            for (l1, _j1), (l2, _j2) in z.items():
                if l1 != l2:
                    edges.add((min(l1, l2), max(l1, l2)))
                parent[find(l1)] = find(l2)
    comps: dict = {}
    for lam in range(M):
        comps.setdefault(find(lam), []).append(lam)
    return ConnectivityGraph(tuple(range(M)), frozenset(edges),
                             tuple(sorted(tuple(v) for v in comps.values())))


def mosaic_to_json(m: Mosaic) -> dict:
    return {
        "degree": m.degree,
        "blocks": [list(b) for b in m.blocks],
        "generators": {name: m.cycles(x) for x, name in enumerate(m.alphabet.names)},
    }


def mosaic_from_json(doc: dict, pres: Presentation) -> Mosaic:
    alph = pres.alphabet
    n = int(doc["degree"])
    gens = doc["generators"]
    phi = []
    for x, name in enumerate(alph.names):
        if name not in gens:
            raise MalformedInput(f"mosaic lacks generator {name!r}")
        perm = parse_cycles(gens[name], n)
        if len(perm) != n:
            raise MalformedInput(f"generator {name!r} moves points beyond degree {n}")
        phi.append(np.asarray(perm, dtype=np.int64))
    blocks = tuple(tuple(b) for b in doc.get("blocks", [[1, n]]))
    return Mosaic(alph, n, blocks, tuple(phi))


__all__ = [
    "ConnectivityGraph", "ConstructionInstruction", "HandleIndexSets", "InstructionError",
    "Mosaic", "Placement", "Violation", "build_mosaic", "connectivity_graph", "cycle_string",
    "complete_instruction", "handle_index_sets", "make_circle_instruction", "mosaic_from_json", "mosaic_to_json",
    "parse_cycles", "verify_instruction", "verify_mosaic",
]
