"""Permutation groups given by generators: orbits, blocks, order, Jordan certificates.

Permutations are 0-based numpy image arrays and act on the right, so the
product ``p*q`` (first ``p``, then ``q``) is ``q[p]``.  Points are 1-based
in everything a caller sees.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .presentation import Alphabet, MalformedInput

CONTAINS_ALT = "contains_Alt"
IS_ALT = "is_Alt"
IS_SYM = "is_Sym"
NO_CERTIFICATE = "no_certificate"


class NotTransitive(ValueError):
    pass


def identity(n: int) -> np.ndarray:
    return np.arange(n, dtype=np.int64)


def mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """``p`` then ``q``."""
    return q[p]


def inverse(p: np.ndarray) -> np.ndarray:
    inv = np.empty_like(p)
    inv[p] = np.arange(len(p), dtype=p.dtype)
    return inv


def power(p: np.ndarray, e: int) -> np.ndarray:
    """``p**e`` computed cycle by cycle."""
    n = len(p)
    out = np.empty_like(p)
    seen = np.zeros(n, dtype=bool)
    for i in range(n):
        if seen[i]:
            continue
        cyc = [i]
        seen[i] = True
        j = int(p[i])
        while j != i:
            cyc.append(j)
            seen[j] = True
            j = int(p[j])
        L = len(cyc)
        s = e % L
        for k, v in enumerate(cyc):
            out[v] = cyc[(k + s) % L]
    return out


def cycle_type(p: np.ndarray) -> list:
    """Cycle lengths, fixed points included."""
    n = len(p)
    seen = np.zeros(n, dtype=bool)
    out = []
    for i in range(n):
        if seen[i]:
            continue
        L = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = int(p[j])
            L += 1
        out.append(L)
    return out


def is_even(p: np.ndarray) -> bool:
    return sum(L - 1 for L in cycle_type(p)) % 2 == 0


def is_prime(k: int) -> bool:
    if k < 2:
        return False
    return all(k % d for d in range(2, math.isqrt(k) + 1))


@dataclass
class PermGroup:
    degree: int
    gens: tuple  # 0-based image arrays
    labels: tuple = ()
    alphabet: Optional[Alphabet] = field(default=None, repr=False)

    def __post_init__(self):
        self.gens = tuple(np.asarray(g, dtype=np.int64) for g in self.gens)
        for g in self.gens:
            if len(g) != self.degree or len(np.unique(g)) != self.degree:
                raise MalformedInput("generator is not a permutation of the points")
        if not self.labels:
            self.labels = tuple(f"g{k + 1}" for k in range(len(self.gens)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Sequence, labels=()) -> "PermGroup":
        """Generators in 1-based cycle notation, e.g. ``[[(1, 2, 3)], [(1, 2)]]`` or strings."""
        from .mosaic import parse_cycles

        gens = []
        for g in cycles:
            if isinstance(g, str):
                gens.append(parse_cycles(g, n))
                continue
            p = list(range(n))
            for cyc in g:
                for k, v in enumerate(cyc):
                    p[v - 1] = cyc[(k + 1) % len(cyc)] - 1
            gens.append(p)
        return cls(n, tuple(gens), tuple(labels))

    @classmethod
    def from_mosaic(cls, m) -> "PermGroup":
        return cls(m.degree, tuple(m.phi), tuple(m.alphabet.names), m.alphabet)

    def restricted(self, points: Sequence[int]) -> "PermGroup":
        """The action on an invariant set of 1-based points, renumbered in the given order."""
        pts = np.asarray(points, dtype=np.int64) - 1
        pos = np.full(self.degree, -1, dtype=np.int64)
        pos[pts] = np.arange(len(pts))
        gens = []
        for g in self.gens:
            img = pos[g[pts]]
            if np.any(img < 0):
                raise ValueError("point set is not invariant")
            gens.append(img)
        return PermGroup(len(pts), tuple(gens), self.labels)


def orbits(g: PermGroup) -> list:
    """The orbits as sorted tuples of 1-based points, ordered by least point."""
    n = g.degree
    if n == 0:
        return []
    src = np.concatenate([np.arange(n)] * len(g.gens)) if g.gens else np.zeros(0, dtype=np.int64)
    dst = np.concatenate(g.gens) if g.gens else np.zeros(0, dtype=np.int64)
    graph = coo_matrix((np.ones(len(src)), (src, dst)), shape=(n, n))
    k, lab = connected_components(graph, directed=True, connection="weak")
    groups: dict = {}
    for p, c in enumerate(lab):
        groups.setdefault(int(c), []).append(p + 1)
    return sorted((tuple(v) for v in groups.values()), key=lambda o: o[0])


def is_transitive(g: PermGroup) -> bool:
    return len(orbits(g)) == 1


def _block_from_pair(g: PermGroup, a: int, b: int) -> list:
    """The finest block system in which ``a`` and ``b`` (0-based) share a block."""
    n = g.degree
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    gens = [gg.tolist() for gg in g.gens]
    queue = [(a, b)]
    parent[find(b)] = find(a)
    while queue:
        x, y = queue.pop()
        for gg in gens:
            u, v = find(gg[x]), find(gg[y])
            if u != v:
                parent[v] = u
                queue.append((u, v))
    blocks: dict = {}
    for p in range(n):
        blocks.setdefault(find(p), []).append(p + 1)
    return sorted((tuple(v) for v in blocks.values()), key=lambda bl: bl[0])


def minimal_block_system(g: PermGroup, seed: Optional[tuple] = None):
    """Blocks of imprimitivity, or ``None`` when ``g`` is primitive.

    With ``seed = (a, b)`` returns the finest block system joining ``a`` and
    ``b`` (possibly the trivial single block).  Without a seed every pair
    ``(1, k)`` is tried and the first non-trivial system (smallest blocks
    first) is returned.
    """
    if not is_transitive(g):
        raise NotTransitive("group is not transitive")
    n = g.degree
    if seed is not None:
        a, b = seed
        return _block_from_pair(g, a - 1, b - 1)
    best = None
    for k in range(1, n):
        bl = _block_from_pair(g, 0, k)
        if len(bl) > 1 and (best is None or len(bl[0]) < len(best[0])):
            best = bl
            if len(bl[0]) == 2:
                break
    return best


def is_primitive(g: PermGroup) -> bool:
    return g.degree <= 2 or minimal_block_system(g) is None


# ---------------------------------------------------------------------------
# stabiliser chains


class _Level:
    __slots__ = ("base", "gens", "trans")

    def __init__(self, base: int):
        self.base = base
        self.gens: list = []
        self.trans: dict = {}

    def rebuild(self, n):
        e = identity(n)
        trans = {self.base: e}
        todo = [self.base]
        while todo:
            x = todo.pop()
            ux = trans[x]
            for s in self.gens:
                y = int(s[x])
                if y not in trans:
                    trans[y] = mul(ux, s)
                    todo.append(y)
        self.trans = trans


class StabilizerChain:
    """Base and strong generators built by Schreier–Sims."""

    def __init__(self, n: int):
        self.n = n
        self.levels: list = []

    def order(self) -> int:
        return math.prod(len(lv.trans) for lv in self.levels)

    def sift(self, g: np.ndarray, start: int = 0):
        for i in range(start, len(self.levels)):
            lv = self.levels[i]
            x = int(g[lv.base])
            u = lv.trans.get(x)
            if u is None:
                return g, i
            g = mul(g, inverse(u))
        return g, len(self.levels)

    def contains(self, g: np.ndarray) -> bool:
        h, _ = self.sift(np.asarray(g, dtype=np.int64))
        return bool(np.all(h == np.arange(self.n)))

    def _add(self, h: np.ndarray, level: int, first: int = 0):
        """Add ``h``, which fixes the first ``level`` base points, to levels ``first..level``."""
        if level == len(self.levels):
            moved = np.nonzero(h != np.arange(self.n))[0]
            self.levels.append(_Level(int(moved[0])))
        for i in range(first, level + 1):
            self.levels[i].gens.append(h)
            self.levels[i].rebuild(self.n)

    def _sift_in(self, g: np.ndarray) -> bool:
        h, lvl = self.sift(g)
        if np.all(h == np.arange(self.n)):
            return False
        self._add(h, lvl)
        return True


def _is_id(p):
    return bool(np.all(p == np.arange(len(p))))


def stabilizer_chain(g: PermGroup) -> StabilizerChain:
    """Deterministic Schreier–Sims: every Schreier generator sifts to the identity."""
    n = g.degree
    chain = StabilizerChain(n)
    for s in g.gens:
        if not _is_id(s):
            chain._sift_in(s)
    i = len(chain.levels) - 1
    while i >= 0:
        lv = chain.levels[i]
        restart = None
        for x, ux in list(lv.trans.items()):
            for s in list(lv.gens):
                y = int(s[x])
                h = mul(mul(ux, s), inverse(lv.trans[y]))
                if _is_id(h):
                    continue
                r, lvl = chain.sift(h, i + 1)
                if not _is_id(r):
                    chain._add(r, lvl, i + 1)
                    restart = lvl
                    break
            if restart is not None:
                break
        if restart is None:
            i -= 1
        else:
            i = restart
    return chain


def random_schreier_sims(g: PermGroup, target: int, rng: random.Random,
                         attempts: int = 20000) -> StabilizerChain:
    """Build a chain from random elements until its order reaches ``target``.

    The chain order is always a lower bound for the group order, so
    reaching ``target`` proves ``|g| >= target``.
    """
    n = g.degree
    chain = StabilizerChain(n)
    for s in g.gens:
        if not _is_id(s):
            chain._sift_in(s)
    pr = ProductReplacement(g, rng)
    for _ in range(attempts):
        if chain.order() >= target:
            break
        chain._sift_in(pr.next()[0])
    return chain


def group_order(g: PermGroup, target: Optional[int] = None, seed: int = 1) -> int:
    """Exact group order.

    With ``target`` given and ``g`` known to lie in a group of that order
    (say ``Alt(n)`` for even generators), a randomised chain is tried
    first; reaching the target settles it.  Otherwise the deterministic
    chain decides.
    """
    if g.degree == 0:
        return 1
    if target is not None:
        chain = random_schreier_sims(g, target, random.Random(seed))
        if chain.order() == target:
            return target
    return stabilizer_chain(g).order()


# ---------------------------------------------------------------------------
# random elements and Jordan certificates


class ProductReplacement:
    """Random group elements with a straight-line program for each."""

    def __init__(self, g: PermGroup, rng: random.Random, slots: int = 10, warmup: int = 50):
        self.rng = rng
        self.slp: list = [("gen", k) for k in range(len(g.gens))]
        gens = list(g.gens) or [identity(g.degree)]
        if not g.gens:
            self.slp = [("id",)]
        self.state = []
        for k in range(max(slots, len(gens))):
            self.state.append((gens[k % len(gens)], k % len(gens)))
        self.acc = (identity(g.degree), None)
        for _ in range(warmup):
            self.next()

    def _push(self, op) -> int:
        self.slp.append(op)
        return len(self.slp) - 1

    def next(self):
        st = self.state
        i, j = self.rng.sample(range(len(st)), 2)
        pi, si = st[i]
        pj, sj = st[j]
        if self.rng.random() < 0.5:
            new = (mul(pi, pj), self._push(("mul", si, sj)))
        else:
            new = (mul(pi, inverse(pj)), self._push(("muli", si, sj)))
        st[i] = new
        acc, sa = self.acc
        if sa is None:
            self.acc = (new[0], new[1])
        else:
            self.acc = (mul(acc, new[0]), self._push(("mul", sa, new[1])))
        return self.acc


def evaluate_slp(g: PermGroup, slp: Sequence, index: int) -> np.ndarray:
    vals: list = []
    for op in slp[:index + 1]:
        if op[0] == "gen":
            vals.append(g.gens[op[1]])
        elif op[0] == "id":
            vals.append(identity(g.degree))
        elif op[0] == "mul":
            vals.append(mul(vals[op[1]], vals[op[2]]))
        else:
            vals.append(mul(vals[op[1]], inverse(vals[op[2]])))
    return vals[index]


@dataclass(frozen=True)
class JordanCertificate:
    prime: int
    slp: tuple
    index: int
    exponent: int
    blocks_checked: bool = True


@dataclass(frozen=True)
class AltResult:
    verdict: str
    certificate: Optional[JordanCertificate] = None
    attempts: int = 0


def _usable_prime(q: int, n: int) -> bool:
    # Jordan: a prime cycle with q <= n-3; 3-cycles and transpositions work at any degree
    return is_prime(q) and (q <= n - 3 or q <= 3)


def _prime_cycle_power(p: np.ndarray, n: int):
    """``(q, m)`` when ``p**m`` is a single ``q``-cycle for a usable prime ``q``."""
    lengths = [L for L in cycle_type(p) if L > 1]
    for q in sorted(set(lengths), reverse=True):
        if not _usable_prime(q, n) or lengths.count(q) != 1:
            continue
        others = [L for L in lengths if L != q]
        if any(L % q == 0 for L in others):
            continue
        m = math.lcm(*others) if others else 1
        return q, m
    return None


def check_certificate(g: PermGroup, cert: JordanCertificate) -> bool:
    """Re-derive everything a certificate claims, independently of the search."""
    n = g.degree
    if not _usable_prime(cert.prime, n):
        return False
    h = power(evaluate_slp(g, cert.slp, cert.index), cert.exponent)
    lengths = [L for L in cycle_type(h) if L > 1]
    if lengths != [cert.prime]:
        return False
    return is_transitive(g) and is_primitive(g)


def contains_alternating(g: PermGroup, attempts: int = 2000, seed: int = 1) -> AltResult:
    """Look for a Jordan certificate: a primitive group holding a prime cycle.

    The cycle length ``q`` must satisfy ``q <= n-3``, or be 2 or 3, for which
    the conclusion holds at every degree.

    ``no_certificate`` is inconclusive.  Positive answers are re-checked
    with :func:`check_certificate` before they are returned.
    """
    if not is_transitive(g):
        raise NotTransitive("group is not transitive")
    n = g.degree
    if n < 3 or not is_primitive(g):
        return AltResult(NO_CERTIFICATE)
    rng = random.Random(seed)
    pr = ProductReplacement(g, rng)
    cands = [(s, k) for k, s in enumerate(g.gens)]
    for k in range(attempts):
        if cands:
            p, idx = cands.pop()
        else:
            p, idx = pr.next()
        hit = _prime_cycle_power(p, n)
        if hit is None:
            continue
        q, m = hit
        slp = tuple(pr.slp) if idx >= len(g.gens) else tuple(("gen", i) for i in range(len(g.gens)))
        cert = JordanCertificate(q, slp, idx, m)
        if not check_certificate(g, cert):
            raise AssertionError("Jordan certificate failed its re-check")
        verdict = IS_ALT if all(is_even(s) for s in g.gens) else IS_SYM
        return AltResult(verdict, cert, k + 1)
    return AltResult(NO_CERTIFICATE, None, attempts)


# ---------------------------------------------------------------------------
# words


def evaluate_word(g: PermGroup, w) -> np.ndarray:
    """The permutation of a word; symbols are labels, alphabet indices or a word string."""
    if isinstance(w, str):
        if g.alphabet is None:
            raise MalformedInput("a word string needs the group's alphabet")
        w = g.alphabet.parse(w)
    p = identity(g.degree)
    for x in w:
        if isinstance(x, str):
            if x not in g.labels:
                raise MalformedInput(f"unknown symbol {x!r}")
            x = g.labels.index(x)
        if not 0 <= x < len(g.gens):
            raise MalformedInput(f"unknown symbol {x!r}")
        p = g.gens[x][p]
    return p


def is_identity(p: np.ndarray) -> bool:
    return _is_id(p)


def support(p: np.ndarray) -> list:
    return [int(i) + 1 for i in np.nonzero(p != np.arange(len(p)))[0]]


@dataclass(frozen=True)
class ExtensionReport:
    fixes_outside: bool
    alternating_on_y: bool
    generators_meet_y: bool
    order_on_y: int
    failing_generator: Optional[str] = None

    @property
    def applies(self) -> bool:
        return self.fixes_outside and self.alternating_on_y and self.generators_meet_y

    @property
    def verdict(self) -> str:
        return CONTAINS_ALT if self.applies else NO_CERTIFICATE


def alternating_extension_check(g: PermGroup, u_gens: Sequence, Y: Sequence[int],
                                seed: int = 1) -> ExtensionReport:
    """Check that ``U = <u_gens>`` is ``Alt(Y)`` fixing the rest and that every generator meets ``Y``.

    When all three hold, the transitive group ``g`` contains the
    alternating group on all of its points.  ``u_gens`` are words in ``g``;
    permutations are accepted too, after a membership test in ``g``.
    """
    Y = sorted(set(int(y) for y in Y))
    if len(Y) < 5:
        raise ValueError("Y needs at least 5 points")
    if not is_transitive(g):
        raise NotTransitive("group is not transitive")
    us = [evaluate_word(g, w) if not isinstance(w, np.ndarray) else w for w in u_gens]
    if any(isinstance(w, np.ndarray) for w in u_gens):
        chain = stabilizer_chain(g)
        for u in us:
            if not chain.contains(u):
                raise ValueError("a generator of U is not an element of g")
    ymask = np.zeros(g.degree, dtype=bool)
    ymask[np.asarray(Y) - 1] = True
    outside = np.nonzero(~ymask)[0]
    fixes = all(bool(np.all(u[outside] == outside)) for u in us)
    order = 0
    alt = False
    if fixes:
        U = PermGroup(g.degree, tuple(us)).restricted(Y)
        target = math.factorial(len(Y)) // 2
        if all(is_even(u) for u in U.gens):
            order = group_order(U, target=target, seed=seed)
            alt = order == target
        else:
            order = group_order(U)
    failing = None
    for label, s in zip(g.labels, g.gens):
        if not np.any(ymask[s[ymask]]):
            failing = label
            break
    return ExtensionReport(fixes, alt, failing is None, order, failing)


# ---------------------------------------------------------------------------
# realizable degrees


@dataclass(frozen=True)
class DegreeSets:
    a1: frozenset
    a2: frozenset
    a12: frozenset

    @classmethod
    def of(cls, a1, a2=None, a12=()):
        a1 = frozenset(a1)
        return cls(a1, frozenset(a2) if a2 is not None else a1, frozenset(a12))


@dataclass(frozen=True)
class DegreeReport:
    achievable: frozenset
    limit: int
    modulus: Optional[int] = None
    class_minima: Optional[dict] = None  # residue -> least achievable value (None if none)
    bound: Optional[int] = None  # largest class minimum
    threshold: Optional[int] = None  # every N >= threshold is achievable

    def missing(self, lo: int = 1, hi: Optional[int] = None) -> list:
        hi = self.limit if hi is None else hi
        return [N for N in range(lo, hi + 1) if N not in self.achievable]


def realizable_degrees(sets: DegreeSets, limit: int) -> DegreeReport:
    """Degrees ``a + b + Σc_j`` (``s >= 0``) and ``Σc_j`` (``s >= 1``) up to ``limit``.

    With ``A12`` non-empty also reports, for each residue mod ``c = min(A12)``,
    the least achievable value; their maximum ``b`` bounds the degrees that
    might be missing.
    """
    if limit < 1:
        raise ValueError("limit must be positive")
    a12 = sorted(v for v in sets.a12 if v > 0)
    sums = np.zeros(limit + 1, dtype=bool)  # multiset sums of A12, s >= 0
    sums[0] = True
    for c in a12:
        for v in range(c, limit + 1):
            if sums[v - c]:
                sums[v] = True
    ach = set(int(v) for v in np.nonzero(sums)[0] if v > 0)
    pairs = {a + b for a in sets.a1 for b in sets.a2}
    for ab in pairs:
        for v in np.nonzero(sums[:max(0, limit - ab + 1)])[0]:
            ach.add(ab + int(v))
    if not a12:
        return DegreeReport(frozenset(ach), limit)
    c = a12[0]
    best = {r: None for r in range(c)}
    heap = [(v, v % c) for v in set(a12) | pairs]
    heapq.heapify(heap)
    while heap:
        v, r = heapq.heappop(heap)
        if best[r] is not None:
            continue
        best[r] = v
        for d in a12:
            r2 = (v + d) % c
            if best[r2] is None:
                heapq.heappush(heap, (v + d, r2))
    if any(v is None for v in best.values()):
        return DegreeReport(frozenset(ach), limit, c, best, None, None)
    b = max(best.values())
    return DegreeReport(frozenset(ach), limit, c, best, b, max(1, b - c + 1))


def exact_threshold(report: DegreeReport, low_index_degrees) -> Optional[int]:
    """Least ``M`` with a transitive action of every degree ``>= M``.

    ``low_index_degrees`` must list every degree below ``report.threshold``
    that occurs (a complete low-index search up to ``threshold - 1``).
    """
    if report.threshold is None:
        return None
    have = set(low_index_degrees) | set(report.achievable)
    missing = [N for N in range(1, report.threshold) if N not in have]
    return max(missing) + 1 if missing else 1


__all__ = [
    "AltResult", "CONTAINS_ALT", "DegreeReport", "DegreeSets", "ExtensionReport", "IS_ALT",
    "IS_SYM", "JordanCertificate", "NO_CERTIFICATE", "NotTransitive", "PermGroup",
    "ProductReplacement", "StabilizerChain", "alternating_extension_check", "check_certificate",
    "contains_alternating", "cycle_type", "evaluate_word", "exact_threshold", "group_order",
    "identity", "inverse", "is_even", "is_identity", "is_primitive", "is_transitive",
    "minimal_block_system", "mul", "orbits", "power", "realizable_degrees", "stabilizer_chain",
    "support",
]
