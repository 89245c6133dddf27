"""Reference-game domains: utterance universe, meaning matrix, signed rows.

A meaning matrix relates a fixed concept list to a fixed utterance list.
Rows are utterance-major bitsets over concept indices (plain Python ints),
so conjunction over examples is an AND-and-popcount loop.  Concepts are
usually RegexAst values but any hashable label works, which keeps the
inference layer generic.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import regexlang
from .errors import InvalidArgument, InvalidString, UnknownUtterance
from .regexlang import RegexAst

DEFAULT_MAX_LEN = 10
DEFAULT_POOL_MAX_ATOMS = 4
DEFAULT_POOL_LIMIT = 10_000
DEFAULT_SAMPLE_SIZE = 350
DEFAULT_DOMAIN_SEED = 7

MATRIX_FORMAT_VERSION = 1


class Sign(Enum):
    POSITIVE = "+"
    NEGATIVE = "-"
    UNSIGNED = ""


@dataclass(frozen=True)
class Utterance:
    s: str
    sign: Sign = Sign.UNSIGNED

    def label(self) -> str:
        if self.sign is Sign.UNSIGNED:
            return self.s
        return f"({self.s}, {self.sign.value})"


def validate_binary_string(s: str, max_len: int = DEFAULT_MAX_LEN) -> str:
    """Check the binary-string invariants; returns s unchanged."""
    if len(s) > max_len:
        raise InvalidString(f"string longer than {max_len} characters")
    if any(c not in "01" for c in s):
        raise InvalidString("string may contain only '0' and '1'")
    return s


def utterance_universe(max_len: int) -> list[str]:
    """All binary strings of length 0..max_len, by length then lexicographic.

    Size is 2^(max_len+1) - 1; the empty string comes first.
    """
    if max_len < 0:
        raise InvalidArgument("max_len must be >= 0")
    out = [""]
    frontier = [""]
    for _ in range(max_len):
        # Extending a sorted level in '0','1' order keeps each level sorted.
        frontier = [s + c for s in frontier for c in "01"]
        out.extend(frontier)
    return out


def concept_label(concept) -> str:
    """Canonical display string for a concept (regex text for RegexAst)."""
    if isinstance(concept, RegexAst):
        return regexlang.render(concept)
    return str(concept)


@dataclass
class MeaningMatrix:
    """Consistency relation between concepts (columns) and utterances (rows)."""

    concepts: list
    utterances: list[Utterance]
    rows: list[int]
    max_len: int = DEFAULT_MAX_LEN
    signed: bool = field(init=False)

    def __post_init__(self):
        if len(self.rows) != len(self.utterances):
            raise InvalidArgument("one row per utterance required")
        signs = {u.sign for u in self.utterances}
        if signs == {Sign.UNSIGNED}:
            self.signed = False
        elif Sign.UNSIGNED not in signs:
            self.signed = True
        else:
            raise InvalidArgument("utterance signs must be all unsigned or all signed")

    @property
    def num_concepts(self) -> int:
        return len(self.concepts)

    @property
    def full_mask(self) -> int:
        return (1 << self.num_concepts) - 1

    @cached_property
    def _row_index(self) -> dict[Utterance, int]:
        return {u: i for i, u in enumerate(self.utterances)}

    def row_index(self, u: Utterance) -> int:
        try:
            return self._row_index[u]
        except KeyError:
            raise UnknownUtterance(f"utterance {u.label()!r} is not in the universe") from None

    def cell(self, utterance_idx: int, concept_idx: int) -> bool:
        return bool(self.rows[utterance_idx] >> concept_idx & 1)

    @cached_property
    def bool_matrix(self) -> np.ndarray:
        """Rows as a (num_utterances, num_concepts) boolean array."""
        n = self.num_concepts
        nbytes = (n + 7) // 8
        packed = b"".join(r.to_bytes(nbytes, "little") for r in self.rows)
        bits = np.unpackbits(np.frombuffer(packed, dtype=np.uint8), bitorder="little")
        return bits.reshape(len(self.rows), nbytes * 8)[:, :n].astype(bool)

    @cached_property
    def float_matrix(self) -> np.ndarray:
        return self.bool_matrix.astype(np.float64)

    def concept_index(self, label: str) -> int:
        for j, c in enumerate(self.concepts):
            if concept_label(c) == label:
                return j
        raise InvalidArgument(f"no concept {label!r} in this matrix")


def build_matrix(
    concepts: Sequence[RegexAst], strings: Sequence[str], max_len: int = DEFAULT_MAX_LEN
) -> MeaningMatrix:
    """Unsigned matrix: rows[i] bit j set iff concepts[j] matches strings[i]."""
    if not concepts or not strings:
        raise InvalidArgument("concepts and strings must be non-empty")
    rows = []
    for s in strings:
        mask = 0
        for j, ast in enumerate(concepts):
            if regexlang.matches(ast, s):
                mask |= 1 << j
        rows.append(mask)
    utterances = [Utterance(s, Sign.UNSIGNED) for s in strings]
    return MeaningMatrix(list(concepts), utterances, rows, max_len=max_len)


def sign_extend(m: MeaningMatrix) -> MeaningMatrix:
    """Signed matrix with interleaved rows (u,+),(u,-) per base utterance.

    The negative row is the bitwise complement of the positive row over the
    concept set.
    """
    if m.signed:
        raise InvalidArgument("matrix is already signed")
    full = m.full_mask
    utterances: list[Utterance] = []
    rows: list[int] = []
    for u, row in zip(m.utterances, m.rows):
        utterances.append(Utterance(u.s, Sign.POSITIVE))
        rows.append(row)
        utterances.append(Utterance(u.s, Sign.NEGATIVE))
        rows.append(row ^ full)
    return MeaningMatrix(list(m.concepts), utterances, rows, max_len=m.max_len)


def consistent_set(m: MeaningMatrix, examples: Iterable[Utterance]) -> int:
    """Bitset of concepts consistent with every example (all-ones when empty)."""
    mask = m.full_mask
    for u in examples:
        mask &= m.rows[m.row_index(u)]
    return mask


def mask_to_indices(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


# ---------------------------------------------------------------------------
# Serialization


def matrix_to_artifact(m: MeaningMatrix) -> dict:
    """Versioned JSON-ready form; rows are hex bitsets over concept indices."""
    artifact = {
        "format_version": MATRIX_FORMAT_VERSION,
        "concepts": [concept_label(c) for c in m.concepts],
        "max_len": m.max_len,
        "signed": m.signed,
        "strings": [u.s for u in m.utterances[:: 2 if m.signed else 1]],
        "rows": [format(r, "x") for r in m.rows],
    }
    return artifact


def matrix_from_artifact(artifact: dict) -> MeaningMatrix:
    version = artifact.get("format_version")
    if version != MATRIX_FORMAT_VERSION:
        raise InvalidArgument(f"unsupported matrix format version {version!r}")
    concepts = [regexlang.parse(text) for text in artifact["concepts"]]
    rows = [int(r, 16) for r in artifact["rows"]]
    if artifact["signed"]:
        utterances = []
        for s in artifact["strings"]:
            utterances.append(Utterance(s, Sign.POSITIVE))
            utterances.append(Utterance(s, Sign.NEGATIVE))
    else:
        utterances = [Utterance(s, Sign.UNSIGNED) for s in artifact["strings"]]
    return MeaningMatrix(concepts, utterances, rows, max_len=artifact["max_len"])


def save_matrix(m: MeaningMatrix, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(matrix_to_artifact(m), fh, indent=1)
        fh.write("\n")


def load_matrix(path: str) -> MeaningMatrix:
    with open(path, encoding="utf-8") as fh:
        return matrix_from_artifact(json.load(fh))


def matrix_to_csv(m: MeaningMatrix, fh) -> None:
    """Human-readable export: header of concept strings, leading utterance
    column, cells '0'/'1'."""
    writer = csv.writer(fh)
    writer.writerow(["utterance"] + [concept_label(c) for c in m.concepts])
    for u, row in zip(m.utterances, m.rows):
        cells = [str(row >> j & 1) for j in range(m.num_concepts)]
        writer.writerow([u.label()] + cells)


# ---------------------------------------------------------------------------
# Bundled domains


@dataclass
class Domain:
    """A concept sample plus both matrix variants over the string universe."""

    concepts: list[RegexAst]
    strings: list[str]
    max_len: int
    seed: int
    unsigned: MeaningMatrix
    signed: MeaningMatrix

    def matrix(self, signed: bool) -> MeaningMatrix:
        return self.signed if signed else self.unsigned

    def describe(self) -> dict:
        return {
            "num_concepts": len(self.concepts),
            "num_strings": len(self.strings),
            "max_len": self.max_len,
            "seed": self.seed,
        }


def make_domain(
    sample_size: int = DEFAULT_SAMPLE_SIZE,
    max_len: int = DEFAULT_MAX_LEN,
    seed: int = DEFAULT_DOMAIN_SEED,
    pool_max_atoms: int = DEFAULT_POOL_MAX_ATOMS,
    pool_limit: int = DEFAULT_POOL_LIMIT,
) -> Domain:
    """Sample a concept set from the enumerated pool and build both matrices."""
    pool = regexlang.enumerate_grammar(pool_max_atoms, limit=pool_limit)
    concepts = regexlang.sample_concepts(pool, sample_size, seed)
    strings = utterance_universe(max_len)
    unsigned = build_matrix(concepts, strings, max_len=max_len)
    return Domain(
        concepts=concepts,
        strings=strings,
        max_len=max_len,
        seed=seed,
        unsigned=unsigned,
        signed=sign_extend(unsigned),
    )


def full_domain(seed: int = DEFAULT_DOMAIN_SEED) -> Domain:
    """The full-scale default: 350 concepts over all strings up to length 10."""
    return make_domain(DEFAULT_SAMPLE_SIZE, DEFAULT_MAX_LEN, seed)


def desk_domain(seed: int = DEFAULT_DOMAIN_SEED) -> Domain:
    """Small domain for experiments that should run in seconds."""
    return make_domain(sample_size=50, max_len=6, seed=seed)
