"""The finite regex sub-language over the binary alphabet.

A pattern is a non-empty sequence of atoms, each one of the character classes
``0``, ``1``, ``[01]`` under one of the quantifiers ``*``, ``+``, ``{1}``,
``{2}``.  Matching is anchored at both ends.  The module also enumerates the
grammar in a fixed order, samples concept pools, and renders plain-language
explanations of a pattern.
"""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidArgument, RegexSyntaxError


class CharClass(Enum):
    ZERO = "0"
    ONE = "1"
    ZERO_OR_ONE = "[01]"

    @property
    def chars(self) -> str:
        return "01" if self is CharClass.ZERO_OR_ONE else self.value


class Quant(Enum):
    STAR = "*"
    PLUS = "+"
    EXACTLY1 = "{1}"
    EXACTLY2 = "{2}"


# Enumeration order of atoms: class-major, quantifier-minor.
_CLASS_ORDER = list(CharClass)
_QUANT_ORDER = list(Quant)


@dataclass(frozen=True)
class Atom:
    char_class: CharClass
    quant: Quant


@dataclass(frozen=True)
class RegexAst:
    atoms: tuple[Atom, ...]

    def __post_init__(self):
        if not self.atoms:
            raise InvalidArgument("a pattern needs at least one atom")

    def __str__(self) -> str:
        return render(self)


def render(ast: RegexAst) -> str:
    """Canonical spelling, e.g. ``[01]*0{2}``."""
    return "".join(a.char_class.value + a.quant.value for a in ast.atoms)


def parse(text: str) -> RegexAst:
    """Parse canonical pattern text; raises RegexSyntaxError with the offset
    of the first offending token."""
    atoms: list[Atom] = []
    i = 0
    n = len(text)
    if n == 0:
        raise RegexSyntaxError("empty pattern", 0)
    while i < n:
        ch = text[i]
        if ch == "0":
            char_class = CharClass.ZERO
            i += 1
        elif ch == "1":
            char_class = CharClass.ONE
            i += 1
        elif ch == "[":
            if text[i : i + 4] != "[01]":
                raise RegexSyntaxError("expected character class '[01]'", i)
            char_class = CharClass.ZERO_OR_ONE
            i += 4
        else:
            raise RegexSyntaxError(f"unexpected character {ch!r}", i)
        if i >= n:
            raise RegexSyntaxError("missing quantifier", i)
        op = text[i]
        if op == "*":
            quant = Quant.STAR
            i += 1
        elif op == "+":
            quant = Quant.PLUS
            i += 1
        elif op == "{":
            if text[i : i + 3] == "{1}":
                quant = Quant.EXACTLY1
            elif text[i : i + 3] == "{2}":
                quant = Quant.EXACTLY2
            else:
                raise RegexSyntaxError("unsupported quantifier", i)
            i += 3
        else:
            raise RegexSyntaxError(f"expected quantifier, found {op!r}", i)
        atoms.append(Atom(char_class, quant))
    return RegexAst(tuple(atoms))


class _Machine:
    """Epsilon-free view of the pattern's NFA with states packed into an int
    bitmask.  Subsets reached during matching are memoized, so repeated
    matching against many strings settles into DFA-speed dictionary lookups.
    """

    __slots__ = ("start", "accept_bit", "move", "_memo")

    def __init__(self, ast: RegexAst):
        # One state per "position": state k is "first k-ish obligations done".
        # Each atom appends transitions; eps-closure is folded in at build
        # time by tracking, per atom, the set of entry states.
        eps: list[set[int]] = []
        trans: list[dict[str, set[int]]] = []

        def new_state() -> int:
            eps.append(set())
            trans.append({"0": set(), "1": set()})
            return len(eps) - 1

        start = new_state()
        cur = start
        for atom in ast.atoms:
            chars = atom.char_class.chars
            if atom.quant is Quant.EXACTLY1:
                nxt = new_state()
                for c in chars:
                    trans[cur][c].add(nxt)
            elif atom.quant is Quant.EXACTLY2:
                mid = new_state()
                nxt = new_state()
                for c in chars:
                    trans[cur][c].add(mid)
                    trans[mid][c].add(nxt)
            elif atom.quant is Quant.PLUS:
                nxt = new_state()
                for c in chars:
                    trans[cur][c].add(nxt)
                    trans[nxt][c].add(nxt)
            else:  # STAR: skippable, then loop in place
                nxt = new_state()
                eps[cur].add(nxt)
                for c in chars:
                    trans[nxt][c].add(nxt)
            cur = nxt
        accept = cur

        # Transitive epsilon closure per state, as a bitmask.
        nstates = len(eps)
        closure = [1 << s for s in range(nstates)]
        for s in range(nstates - 1, -1, -1):
            for t in eps[s]:
                closure[s] |= closure[t]

        # Closed move tables: move[c][s] = closure of every target of s on c.
        self.move = {}
        for c in "01":
            table = []
            for s in range(nstates):
                mask = 0
                for t in trans[s][c]:
                    mask |= closure[t]
                table.append(mask)
            self.move[c] = table

        self.start = closure[start]
        self.accept_bit = 1 << accept
        self._memo: dict[tuple[int, str], int] = {}

    def step(self, states: int, c: str) -> int:
        key = (states, c)
        nxt = self._memo.get(key)
        if nxt is None:
            nxt = 0
            table = self.move[c]
            b = states
            while b:
                low = b & -b
                nxt |= table[low.bit_length() - 1]
                b ^= low
            self._memo[key] = nxt
        return nxt

    def fullmatch(self, s: str) -> bool:
        states = self.start
        for c in s:
            states = self.step(states, c)
            if not states:
                return False
        return bool(states & self.accept_bit)


@functools.lru_cache(maxsize=None)
def _machine(ast: RegexAst) -> _Machine:
    return _Machine(ast)


def matches(ast: RegexAst, s: str) -> bool:
    """Anchored full-string match of ``s`` (over {'0','1'}) against ``ast``."""
    return _machine(ast).fullmatch(s)


def enumerate_grammar(max_atoms: int, limit: int | None = None) -> list[RegexAst]:
    """All patterns with 1..max_atoms atoms, in a fixed deterministic order:
    ascending atom count, then lexicographic by (char_class, quant)."""
    if max_atoms < 1:
        raise InvalidArgument("max_atoms must be >= 1")
    alphabet = [Atom(c, q) for c in _CLASS_ORDER for q in _QUANT_ORDER]
    out: list[RegexAst] = []
    for count in range(1, max_atoms + 1):
        for combo in itertools.product(alphabet, repeat=count):
            out.append(RegexAst(combo))
            if limit is not None and len(out) >= limit:
                return out
    return out


def sample_concepts(pool: list[RegexAst], k: int, seed: int) -> list[RegexAst]:
    """k distinct pool members via a seeded partial Fisher-Yates shuffle."""
    if k > len(pool):
        raise InvalidArgument(f"cannot sample {k} from a pool of {len(pool)}")
    items = list(pool)
    rng = random.Random(seed)
    for i in range(k):
        j = rng.randrange(i, len(items))
        items[i], items[j] = items[j], items[i]
    return items[:k]


_QUANT_PHRASE = {
    Quant.STAR: "zero or more",
    Quant.PLUS: "one or more",
    Quant.EXACTLY1: "exactly one",
    Quant.EXACTLY2: "exactly two",
}


def _class_phrase(atom: Atom) -> str:
    singular = atom.quant is Quant.EXACTLY1
    if atom.char_class is CharClass.ZERO_OR_ONE:
        return "character, either '0' or '1'" if singular else "characters, each '0' or '1'"
    ch = atom.char_class.value
    return f"'{ch}'" if singular else f"'{ch}'s"


def explain(ast: RegexAst) -> str:
    """Plain-language description, one clause per atom, joined in order."""
    clauses = [f"{_QUANT_PHRASE[a.quant]} {_class_phrase(a)}" for a in ast.atoms]
    return ", then ".join(clauses)
