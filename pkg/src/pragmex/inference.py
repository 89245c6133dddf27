"""Listener and speaker models over a meaning matrix.

The chain is: a literal listener that is uniform over consistent concepts, an
incremental speaker that scores each next example by how much it steers the
literal listener toward the target (normalized over every utterance in the
matrix, including ones already used), and a pragmatic listener proportional
to the speaker's probability of producing the whole example sequence.  All
probabilities are double precision in linear space.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .domain import MeaningMatrix, Utterance, concept_label, consistent_set
from .errors import InconsistentSpec, InvalidArgument

# Two probabilities tie when |a - b| <= TIE_RTOL * max(a, b); this separates
# analytically equal scores from float noise.
TIE_RTOL = 1e-9

ExampleSequence = Sequence[Utterance]


@dataclass(frozen=True)
class Posterior:
    """Probability vector aligned with the matrix's concept list."""

    probs: np.ndarray
    examples: tuple[Utterance, ...]

    def support(self) -> list[int]:
        return [int(i) for i in np.nonzero(self.probs)[0]]


def _uniform(n: int, examples: ExampleSequence) -> Posterior:
    return Posterior(np.full(n, 1.0 / n), tuple(examples))


def literal_listener(m: MeaningMatrix, examples: ExampleSequence) -> Posterior:
    """Uniform posterior over the concepts consistent with every example."""
    mask = consistent_set(m, examples)
    if mask == 0:
        raise InconsistentSpec("no concept is consistent with the examples")
    probs = np.zeros(m.num_concepts)
    count = mask.bit_count()
    j = 0
    while mask:
        if mask & 1:
            probs[j] = 1.0 / count
        mask >>= 1
        j += 1
    return Posterior(probs, tuple(examples))


def _prefix_mask_vector(m: MeaningMatrix, prefix: ExampleSequence) -> np.ndarray:
    mask = consistent_set(m, prefix)
    out = np.zeros(m.num_concepts, dtype=bool)
    for j in mask_bits(mask):
        out[j] = True
    return out


def mask_bits(mask: int):
    j = 0
    while mask:
        if mask & 1:
            yield j
        mask >>= 1
        j += 1


def _per_utterance_inverse_counts(bools: np.ndarray, alive: np.ndarray) -> np.ndarray:
    """1 / |row ∩ alive| per utterance, 0 where the intersection is empty."""
    counts = (bools & alive).sum(axis=1)
    inv = np.zeros(len(counts))
    np.divide(1.0, counts, out=inv, where=counts > 0)
    return inv


def speaker_step_normalizer(m: MeaningMatrix, concept: int, prefix: ExampleSequence) -> float:
    """The speaker's normalizing sum for a target concept after the given
    prefix: the literal listener's probability of that concept, summed over
    every candidate next utterance (used or not)."""
    alive = _prefix_mask_vector(m, prefix)
    if not alive[concept]:
        raise InconsistentSpec("concept is inconsistent with the prefix")
    inv = _per_utterance_inverse_counts(m.bool_matrix, alive)
    return float(inv @ m.float_matrix[:, concept])


def speaker_step(
    m: MeaningMatrix, concept: int, prefix: ExampleSequence, utterance: Utterance
) -> float:
    """Incremental probability that the speaker gives this utterance next."""
    alive = _prefix_mask_vector(m, prefix)
    if not alive[concept]:
        raise InconsistentSpec("concept is inconsistent with the prefix")
    bools = m.bool_matrix
    inv = _per_utterance_inverse_counts(bools, alive)
    denom = float(inv @ m.float_matrix[:, concept])
    if denom == 0.0:
        # Only reachable for a concept with no consistent utterance at all.
        raise InconsistentSpec("concept has no consistent utterance")
    i = m.row_index(utterance)
    if not bools[i, concept]:
        return 0.0
    return float(inv[i]) / denom


def _chain_scores(m: MeaningMatrix, examples: ExampleSequence) -> np.ndarray:
    """Unnormalized speaker chain products, one entry per concept.

    Concepts inconsistent with any prefix of the sequence score exactly 0.
    """
    n = m.num_concepts
    bools = m.bool_matrix
    floats = m.float_matrix
    scores = np.ones(n)
    alive = np.ones(n, dtype=bool)
    for ex in examples:
        i = m.row_index(ex)
        inv = _per_utterance_inverse_counts(bools, alive)
        denom = inv @ floats  # per concept: listener mass summed over next utterances
        nxt = alive & bools[i]
        numer = np.where(nxt, inv[i], 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            factor = np.where(nxt, numer / denom, 0.0)
        scores = scores * factor
        alive = nxt
        if not alive.any():
            break
    return scores


def speaker_sequence_prob(m: MeaningMatrix, concept: int, examples: ExampleSequence) -> float:
    """Chain product of incremental speaker steps; 0 once the concept drops out."""
    if not examples:
        return 1.0
    return float(_chain_scores(m, examples)[concept])


def speaker_step_distribution(
    m: MeaningMatrix, concept: int, prefix: ExampleSequence
) -> np.ndarray:
    """Distribution over ALL utterances for the speaker's next example."""
    alive = _prefix_mask_vector(m, prefix)
    if not alive[concept]:
        raise InconsistentSpec("concept is inconsistent with the prefix")
    inv = _per_utterance_inverse_counts(m.bool_matrix, alive)
    numer = inv * m.float_matrix[:, concept]
    total = numer.sum()
    if total == 0.0:
        raise InconsistentSpec("concept has no consistent utterance")
    return numer / total


def pragmatic_listener(m: MeaningMatrix, examples: ExampleSequence) -> Posterior:
    """Posterior proportional to the speaker's chain probability of the
    sequence; its support equals the literal listener's."""
    if not examples:
        return _uniform(m.num_concepts, examples)
    if consistent_set(m, examples) == 0:
        raise InconsistentSpec("no concept is consistent with the examples")
    scores = _chain_scores(m, examples)
    return Posterior(scores / scores.sum(), tuple(examples))


class ListenerKind(Enum):
    LITERAL = "literal"
    PRAGMATIC = "pragmatic"


def posterior(m: MeaningMatrix, examples: ExampleSequence, kind: ListenerKind) -> Posterior:
    if kind is ListenerKind.LITERAL:
        return literal_listener(m, examples)
    return pragmatic_listener(m, examples)


class TiePolicy(Enum):
    RANDOM_UNIFORM = "random"
    LOWEST_INDEX = "lowest"


def tie_set(p: Posterior) -> list[int]:
    """Indices whose probability ties the maximum within TIE_RTOL."""
    mx = float(p.probs.max())
    return [int(i) for i in np.nonzero(mx - p.probs <= TIE_RTOL * mx)[0]]


def best_guess(
    p: Posterior,
    policy: TiePolicy = TiePolicy.RANDOM_UNIFORM,
    rng: random.Random | None = None,
) -> int:
    """Index of a maximal-probability concept under the tie policy."""
    ties = tie_set(p)
    if policy is TiePolicy.LOWEST_INDEX or len(ties) == 1:
        return ties[0]
    if rng is None:
        raise InvalidArgument("random tie-breaking needs an rng")
    return ties[rng.randrange(len(ties))]


def derive_tie_rng(seed: int, examples: ExampleSequence, salt: str = "") -> random.Random:
    """Deterministic tie-break stream for (seed, example multiset).

    Repeated guesses on an unchanged example set never churn; changing the
    set may re-draw.  A salt yields an independent stream for the same set,
    for callers that want per-update resampling while staying replayable.
    """
    canon = sorted((ex.s, ex.sign.value) for ex in examples)
    digest = hashlib.sha256(f"{seed}|{canon}|{salt}".encode()).digest()
    return random.Random(digest)


def posterior_to_json(m: MeaningMatrix, p: Posterior) -> list[dict]:
    """Ordered export: [{concept, prob}] descending by probability."""
    order = sorted(range(m.num_concepts), key=lambda j: (-p.probs[j], j))
    return [
        {"concept": concept_label(m.concepts[j]), "prob": float(p.probs[j])}
        for j in order
    ]
