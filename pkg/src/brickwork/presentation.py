"""Inv-tab alphabets, words and finite presentations.

Symbols are small integers; an :class:`Alphabet` carries the names and the
inverse table.  Words are tuples of symbol indices.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

log = logging.getLogger(__name__)

Word = tuple  # tuple[int, ...]


class MalformedInput(ValueError):
    """Raised for input that does not describe a valid object."""


@dataclass(frozen=True)
class Alphabet:
    names: tuple
    inverse: tuple
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if len(self.names) != len(self.inverse):
            raise MalformedInput("names and inverse table differ in length")
        if len(set(self.names)) != len(self.names):
            raise MalformedInput("duplicate symbol names")
        n = len(self.names)
        for x, y in enumerate(self.inverse):
            if not 0 <= y < n or self.inverse[y] != x:
                raise MalformedInput(
                    f"inverse table is not an involution at {self.names[x]!r}")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.names)})

    @classmethod
    def from_pairs(cls, pairs: Iterable) -> "Alphabet":
        """Build from ``(name, inverse_name)`` pairs; ``(t, t)`` declares an involution.

        Each pair may be given once; the inverse symbol is appended after
        its partner if it has not been named yet.
        """
        names: list = []
        partner: dict = {}
        for a, b in pairs:
            for s in (a, b):
                if s not in partner and s not in names:
                    names.append(s)
            if partner.get(a, b) != b or partner.get(b, a) != a:
                raise MalformedInput(f"conflicting inverse for {a!r}/{b!r}")
            partner[a] = b
            partner[b] = a
        missing = [s for s in names if s not in partner]
        if missing:
            raise MalformedInput(f"no inverse declared for {missing}")
        idx = {s: i for i, s in enumerate(names)}
        return cls(tuple(names), tuple(idx[partner[s]] for s in names))

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise MalformedInput(f"unknown symbol {name!r}") from None

    def is_involution(self, x: int) -> bool:
        return self.inverse[x] == x

    def invert(self, w: Sequence[int]) -> Word:
        inv = self.inverse
        return tuple(inv[x] for x in reversed(w))

    def reduce(self, w: Sequence[int]) -> Word:
        """Free reduction in the inv-tab group."""
        inv = self.inverse
        out: list = []
        for x in w:
            if out and out[-1] == inv[x]:
                out.pop()
            else:
                out.append(x)
        return tuple(out)

    def is_reduced(self, w: Sequence[int]) -> bool:
        inv = self.inverse
        return all(inv[a] != b for a, b in zip(w, w[1:]))

    def format(self, w: Sequence[int], sep: str = "") -> str:
        if not w:
            return "1"
        if not sep and any(len(s) > 1 for s in self.names):
            sep = " "
        return sep.join(self.names[x] for x in w)

    def parse(self, text: str) -> Word:
        """Parse a word such as ``"s(ts)^5"``, ``"a b c^-1"`` or ``"1"``."""
        return _WordParser(self, text).parse()


class _WordParser:
    _sep = re.compile(r"[\s.*]+")

    def __init__(self, alphabet: Alphabet, text: str):
        self.alphabet = alphabet
        self.text = text
        self.pos = 0
        # longest match first
        self.names = sorted(alphabet.names, key=len, reverse=True)

    def error(self, msg):
        raise MalformedInput(f"{msg} at offset {self.pos} in word {self.text!r}")

    def skip(self):
        m = self._sep.match(self.text, self.pos)
        if m:
            self.pos = m.end()

    def parse(self) -> Word:
        stripped = self.text.strip()
        if stripped in ("", "1", "ε", "eps") and stripped not in self.alphabet.names:
            return ()
        w = self.seq()
        self.skip()
        if self.pos != len(self.text):
            self.error("unexpected character")
        return w

    def seq(self) -> Word:
        out: list = []
        while True:
            self.skip()
            if self.pos >= len(self.text) or self.text[self.pos] == ")":
                return tuple(out)
            out.extend(self.item())

    def item(self) -> Word:
        t = self.text
        if t[self.pos] == "(":
            self.pos += 1
            w = self.seq()
            if self.pos >= len(t) or t[self.pos] != ")":
                self.error("missing ')'")
            self.pos += 1
        else:
            for name in self.names:
                if t.startswith(name, self.pos):
                    self.pos += len(name)
                    w = (self.alphabet.index(name),)
                    break
            else:
                m = re.match(r"\w+", t[self.pos:])
                bad = m.group(0) if m else t[self.pos]
                raise MalformedInput(
                    f"unknown symbol {bad!r} at offset {self.pos} in word {t!r}")
        self.skip()
        if self.pos < len(t) and t[self.pos] == "^":
            self.pos += 1
            m = re.compile(r"\s*(-?\d+)").match(t, self.pos)
            if not m:
                self.error("bad exponent")
            self.pos = m.end()
            e = int(m.group(1))
            if e < 0:
                w = self.alphabet.invert(w)
                e = -e
            w = w * e
        return w


def cyclic_reduce(alphabet: Alphabet, w: Sequence[int]) -> Word:
    w = alphabet.reduce(w)
    inv = alphabet.inverse
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == inv[w[j - 1]]:
        i += 1
        j -= 1
    return tuple(w[i:j])


def rotations(w: Sequence[int]) -> list:
    w = tuple(w)
    return [w[k:] + w[:k] for k in range(len(w))]


def rotation_class(w: Sequence[int]) -> set:
    """The set of cyclic shifts of ``w``; has as many elements as the primitive root is long."""
    return set(rotations(w))


def primitive_power_decompose(r: Sequence[int]) -> tuple:
    """Return ``(root, m)`` with ``r == root * m`` and ``root`` not a proper power."""
    r = tuple(r)
    n = len(r)
    if n == 0:
        raise MalformedInput("empty word has no primitive root")
    for d in range(1, n + 1):
        if n % d == 0 and r[:d] * (n // d) == r:
            return r[:d], n // d
    raise AssertionError("unreachable")


def positions(x: int, r: Sequence[int]) -> set:
    """1-based positions of ``x`` in the primitive root of ``r``."""
    root, _ = primitive_power_decompose(r)
    return {i + 1 for i, y in enumerate(root) if y == x}


def cyclic_shift(r: Sequence[int], k: int) -> Word:
    """The ``k``-th shift ``(x_k ... x_t x_1 ... x_{k-1})^m`` of ``r`` (1-based ``k``)."""
    root, m = primitive_power_decompose(r)
    if not 1 <= k <= len(root):
        raise ValueError(f"position {k} out of range 1..{len(root)}")
    return (root[k - 1:] + root[:k - 1]) * m


def length_lex(w: Sequence[int]):
    return (len(w), tuple(w))


@dataclass(frozen=True)
class Presentation:
    alphabet: Alphabet
    relators: tuple  # of Words, closed under rotation and inversion

    def relators_starting_with(self, x: int) -> list:
        return [r for r in self.relators if r[0] == x]

    def format_relators(self) -> list:
        return [self.alphabet.format(r) for r in self.relators]


def normalize_presentation(alphabet: Alphabet, raw_relators: Iterable) -> Presentation:
    """Reduce the relators and close them under inversion and rotation.

    ``raw_relators`` may hold words (sequences of indices) or strings.
    Relators that reduce to the empty word, such as ``t^2`` for an
    involution ``t``, are dropped.
    """
    closed: set = set()
    for raw in raw_relators:
        w = alphabet.parse(raw) if isinstance(raw, str) else tuple(raw)
        for x in w:
            if not isinstance(x, int) or not 0 <= x < len(alphabet):
                raise MalformedInput(f"unknown symbol {x!r} in relator")
        w = cyclic_reduce(alphabet, w)
        if not w:
            log.info("relator %r is trivial in the inv-tab group; dropped", raw)
            continue
        for v in (w, alphabet.invert(w)):
            closed.update(rotations(v))
    return Presentation(alphabet, tuple(sorted(closed, key=length_lex)))
