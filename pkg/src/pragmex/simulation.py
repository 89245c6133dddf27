"""Closed-loop games between simulated speakers and the two listeners.

A game gives the speaker a target concept and lets it feed examples to a
listener until the listener's best guess hits the target, the example
budget runs out, or the speaker has nothing left to say.  Experiments
aggregate many games; paired experiments run both listeners over the same
seeded targets so differences are attributable to the listener alone.
"""

from __future__ import annotations

import csv
import hashlib
import json
import random
import statistics
from dataclasses import dataclass, field
from enum import Enum

from .domain import MeaningMatrix, Sign, Utterance, concept_label
from .errors import Exhausted, InvalidArgument
from .inference import (
    TIE_RTOL,
    ListenerKind,
    TiePolicy,
    best_guess,
    derive_tie_rng,
    posterior,
    speaker_step_distribution,
)


class SpeakerKind(Enum):
    RANDOM_CONSISTENT = "random_consistent"
    PRAGMATIC_ARGMAX = "pragmatic_argmax"
    PRAGMATIC_SAMPLE = "pragmatic_sample"


def _child_rng(seed: int, *parts: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}|{'|'.join(parts)}".encode()).digest()
    return random.Random(digest)


def _unseen_indices(m: MeaningMatrix, prefix, allow_negative: bool) -> list[int]:
    used = {m.row_index(u) for u in prefix}
    out = []
    for i, u in enumerate(m.utterances):
        if i in used:
            continue
        if not allow_negative and u.sign is Sign.NEGATIVE:
            continue
        out.append(i)
    return out


def random_consistent_speaker(
    m: MeaningMatrix,
    target: int,
    prefix,
    rng: random.Random,
    allow_negative: bool = True,
) -> Utterance:
    """Uniform draw over unseen utterances consistent with the target."""
    pool = [i for i in _unseen_indices(m, prefix, allow_negative) if m.cell(i, target)]
    if not pool:
        raise Exhausted("no unused consistent utterance for the target")
    return m.utterances[pool[rng.randrange(len(pool))]]


def pragmatic_speaker_choose(
    m: MeaningMatrix,
    target: int,
    prefix,
    mode: SpeakerKind,
    rng: random.Random,
    allow_negative: bool = True,
) -> Utterance:
    """Next example from the incremental speaker distribution over unseen
    utterances, either by argmax (ties to lowest index) or by sampling."""
    if mode is SpeakerKind.RANDOM_CONSISTENT:
        raise InvalidArgument("mode must be argmax or sample")
    candidates = [i for i in _unseen_indices(m, prefix, allow_negative) if m.cell(i, target)]
    if not candidates:
        # covers both a used-up utterance supply and a target with no
        # consistent utterance at all (possible in small universes)
        raise Exhausted("no unused consistent utterance for the target")
    dist = speaker_step_distribution(m, target, prefix)
    if mode is SpeakerKind.PRAGMATIC_ARGMAX:
        top = max(dist[i] for i in candidates)
        for i in candidates:
            if top - dist[i] <= TIE_RTOL * top:
                return m.utterances[i]
    total = sum(dist[i] for i in candidates)
    x = rng.random() * total
    acc = 0.0
    for i in candidates:
        acc += dist[i]
        if x < acc:
            return m.utterances[i]
    return m.utterances[candidates[-1]]


@dataclass(frozen=True)
class GameConfig:
    matrix: MeaningMatrix
    target: int
    listener_kind: ListenerKind
    speaker_kind: SpeakerKind
    example_budget: int
    allow_negative: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.example_budget < 1:
            raise InvalidArgument("example_budget must be >= 1")
        if not 0 <= self.target < self.matrix.num_concepts:
            raise InvalidArgument("target is not a concept index")


@dataclass
class GameResult:
    target: int
    success: bool
    reason: str  # "solved" | "budget" | "exhausted"
    examples_used: int
    trace: list[tuple[Utterance, int]] = field(default_factory=list)


def _speak(cfg: GameConfig, prefix, rng: random.Random) -> Utterance:
    if cfg.speaker_kind is SpeakerKind.RANDOM_CONSISTENT:
        return random_consistent_speaker(
            cfg.matrix, cfg.target, prefix, rng, cfg.allow_negative
        )
    return pragmatic_speaker_choose(
        cfg.matrix, cfg.target, prefix, cfg.speaker_kind, rng, cfg.allow_negative
    )


def run_game(cfg: GameConfig) -> GameResult:
    """Play one game to completion; deterministic given cfg."""
    m = cfg.matrix
    speaker_rng = _child_rng(cfg.seed, "speaker")
    examples: list[Utterance] = []
    trace: list[tuple[Utterance, int]] = []

    def current_guess() -> int:
        p = posterior(m, examples, cfg.listener_kind)
        return best_guess(p, TiePolicy.RANDOM_UNIFORM, derive_tie_rng(cfg.seed, examples))

    if current_guess() == cfg.target:
        return GameResult(cfg.target, True, "solved", 0, trace)
    while len(examples) < cfg.example_budget:
        try:
            u = _speak(cfg, examples, speaker_rng)
        except Exhausted:
            return GameResult(cfg.target, False, "exhausted", len(examples), trace)
        examples.append(u)
        g = current_guess()
        trace.append((u, g))
        if g == cfg.target:
            return GameResult(cfg.target, True, "solved", len(examples), trace)
    return GameResult(cfg.target, False, "budget", len(examples), trace)


# ---------------------------------------------------------------------------
# Experiments


@dataclass
class Report:
    config: dict
    per_game: list[dict]
    aggregate: dict

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "per_game": self.per_game,
            "aggregate": self.aggregate,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def write_csv(self, fh) -> None:
        writer = csv.writer(fh)
        writer.writerow(["game", "target", "success", "reason", "examples_used"])
        for row in self.per_game:
            writer.writerow(
                [row["game"], row["target"], int(row["success"]), row["reason"], row["examples_used"]]
            )


def _aggregate(results: list[GameResult]) -> dict:
    used = [r.examples_used for r in results if r.success]
    return {
        "games": len(results),
        "success_rate": sum(r.success for r in results) / len(results),
        "mean_examples": statistics.mean(used) if used else None,
        "median_examples": statistics.median(used) if used else None,
    }


def _draw_targets(m: MeaningMatrix, games: int, seed: int) -> list[int]:
    rng = _child_rng(seed, "targets")
    return [rng.randrange(m.num_concepts) for _ in range(games)]


def _game_seed(seed: int, i: int) -> int:
    return int.from_bytes(hashlib.sha256(f"{seed}|game|{i}".encode()).digest()[:8], "big")


def _run_games(
    m: MeaningMatrix,
    targets: list[int],
    listener_kind: ListenerKind,
    speaker_kind: SpeakerKind,
    budget: int,
    allow_negative: bool,
    seed: int,
) -> list[GameResult]:
    results = []
    for i, target in enumerate(targets):
        cfg = GameConfig(
            matrix=m,
            target=target,
            listener_kind=listener_kind,
            speaker_kind=speaker_kind,
            example_budget=budget,
            allow_negative=allow_negative,
            seed=_game_seed(seed, i),
        )
        results.append(run_game(cfg))
    return results


def _per_game_rows(m: MeaningMatrix, results: list[GameResult]) -> list[dict]:
    return [
        {
            "game": i,
            "target": concept_label(m.concepts[r.target]),
            "success": r.success,
            "reason": r.reason,
            "examples_used": r.examples_used,
        }
        for i, r in enumerate(results)
    ]


def run_experiment(
    m: MeaningMatrix,
    games: int,
    listener_kind: ListenerKind,
    speaker_kind: SpeakerKind,
    budget: int = 10,
    allow_negative: bool = True,
    seed: int = 0,
) -> Report:
    """Independent games with seeded uniform targets; reproducible output."""
    if games < 1:
        raise InvalidArgument("games must be >= 1")
    targets = _draw_targets(m, games, seed)
    results = _run_games(m, targets, listener_kind, speaker_kind, budget, allow_negative, seed)
    config = {
        "games": games,
        "listener": listener_kind.value,
        "speaker": speaker_kind.value,
        "budget": budget,
        "allow_negative": allow_negative,
        "seed": seed,
        "num_concepts": m.num_concepts,
        "num_utterances": len(m.utterances),
        "signed": m.signed,
    }
    return Report(config, _per_game_rows(m, results), _aggregate(results))


@dataclass
class PairedReport:
    config: dict
    literal: Report
    pragmatic: Report
    paired: dict

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "conditions": {
                "literal": self.literal.to_dict(),
                "pragmatic": self.pragmatic.to_dict(),
            },
            "paired": self.paired,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def run_paired_experiment(
    m: MeaningMatrix,
    games: int,
    speaker_kind: SpeakerKind,
    budget: int = 10,
    allow_negative: bool = True,
    seed: int = 0,
) -> PairedReport:
    """Both listener kinds on the same seeded targets and speaker streams."""
    if games < 1:
        raise InvalidArgument("games must be >= 1")
    targets = _draw_targets(m, games, seed)
    by_kind = {}
    for kind in (ListenerKind.LITERAL, ListenerKind.PRAGMATIC):
        results = _run_games(m, targets, kind, speaker_kind, budget, allow_negative, seed)
        config = {
            "games": games,
            "listener": kind.value,
            "speaker": speaker_kind.value,
            "budget": budget,
            "allow_negative": allow_negative,
            "seed": seed,
            "num_concepts": m.num_concepts,
            "num_utterances": len(m.utterances),
            "signed": m.signed,
        }
        by_kind[kind] = (results, Report(config, _per_game_rows(m, results), _aggregate(results)))

    lit_results, lit_report = by_kind[ListenerKind.LITERAL]
    prag_results, prag_report = by_kind[ListenerKind.PRAGMATIC]
    shared = [
        i for i in range(games) if lit_results[i].success and prag_results[i].success
    ]
    paired = {
        "shared_successes": len(shared),
        "mean_examples_literal": (
            statistics.mean(lit_results[i].examples_used for i in shared) if shared else None
        ),
        "mean_examples_pragmatic": (
            statistics.mean(prag_results[i].examples_used for i in shared) if shared else None
        ),
    }
    config = {
        "games": games,
        "speaker": speaker_kind.value,
        "budget": budget,
        "allow_negative": allow_negative,
        "seed": seed,
    }
    return PairedReport(config, lit_report, prag_report, paired)
