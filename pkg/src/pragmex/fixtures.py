"""Small hand-checkable domains used in tests and the demo server preset."""

from __future__ import annotations

from .domain import MeaningMatrix, Utterance, build_matrix, sign_extend
from .regexlang import parse

DEMO_CONCEPTS = ("[01]+0+", "1*0+1*", "0*1+0*", "[01]*")
DEMO_STRINGS = ("1100", "0000", "0010", "0111")
DEMO_MAX_LEN = 4


def demo_matrix(signed: bool = False) -> MeaningMatrix:
    """4 concepts x 4 strings; every cell is checkable by eye."""
    m = build_matrix(
        [parse(c) for c in DEMO_CONCEPTS], list(DEMO_STRINGS), max_len=DEMO_MAX_LEN
    )
    return sign_extend(m) if signed else m


class _NamedConcept:
    """Concept whose meaning is an explicit row, for non-regex matrices."""

    def __init__(self, name: str):
        self.name = name

    def __str__(self) -> str:
        return self.name


def matrix_from_rows(
    concepts: list[str], strings: list[str], cells: list[list[int]]
) -> MeaningMatrix:
    """Build a matrix directly from 0/1 cells (utterance-major)."""
    rows = []
    for i in range(len(strings)):
        row = 0
        for j in range(len(concepts)):
            if cells[i][j]:
                row |= 1 << j
        rows.append(row)
    max_len = max((len(s) for s in strings), default=0)
    return MeaningMatrix(
        concepts=[_NamedConcept(c) for c in concepts],
        utterances=[Utterance(s) for s in strings],
        rows=rows,
        max_len=max_len,
    )


def face_game_matrix() -> MeaningMatrix:
    """Three faces, three single-word clues.

    Concepts: plain face, glasses-only face, glasses-and-hat face.  Clues:
    "nothing" fits only the plain face, "glasses" fits both bespectacled
    faces, "hat" fits only the hatted one.  Saying "glasses" should
    pragmatically point at the glasses-only face.
    """
    return matrix_from_rows(
        concepts=["plain", "glasses", "glasses+hat"],
        strings=["nothing", "glasses", "hat"],
        cells=[
            [1, 0, 0],
            [0, 1, 1],
            [0, 0, 1],
        ],
    )
