import io
import random

import pytest

from pragmex.domain import Sign, Utterance, build_matrix, make_domain, utterance_universe
from pragmex.errors import Exhausted, InvalidArgument
from pragmex.fixtures import demo_matrix
from pragmex.inference import ListenerKind, TiePolicy, best_guess, derive_tie_rng, posterior
from pragmex.regexlang import parse
from pragmex.simulation import (
    GameConfig,
    SpeakerKind,
    pragmatic_speaker_choose,
    random_consistent_speaker,
    run_experiment,
    run_game,
    run_paired_experiment,
)

U0, U1, U2, U3 = (Utterance(s) for s in ("1100", "0000", "0010", "0111"))


# --- speakers


def test_random_speaker_draws_from_consistent_unseen():
    m = demo_matrix()
    seen = set()
    rng = random.Random(5)
    for _ in range(200):
        seen.add(random_consistent_speaker(m, 0, [], rng).s)
    assert seen == {"1100", "0000", "0010"}


def test_random_speaker_exhausts():
    m = demo_matrix()
    with pytest.raises(Exhausted):
        random_consistent_speaker(m, 0, [U0, U1, U2], random.Random(0))


def test_random_speaker_signed_eligibility():
    m = demo_matrix(signed=True)
    seen = set()
    rng = random.Random(5)
    for _ in range(400):
        seen.add(random_consistent_speaker(m, 0, [], rng, allow_negative=True).label())
    assert seen == {"(1100, +)", "(0000, +)", "(0010, +)", "(0111, -)"}


def test_random_speaker_positive_only_filter():
    m = demo_matrix(signed=True)
    rng = random.Random(5)
    for _ in range(100):
        u = random_consistent_speaker(m, 0, [], rng, allow_negative=False)
        assert u.sign is Sign.POSITIVE


def test_pragmatic_argmax_first_move():
    # step probabilities for the target: 3/11, 4/11, 4/11, 0; the tie between
    # the two best goes to the lower index
    u = pragmatic_speaker_choose(m := demo_matrix(), 0, [], SpeakerKind.PRAGMATIC_ARGMAX, random.Random(0))
    assert u.s == "0000"


def test_pragmatic_argmax_second_move():
    m = demo_matrix()
    u = pragmatic_speaker_choose(m, 0, [U1], SpeakerKind.PRAGMATIC_ARGMAX, random.Random(0))
    assert u.s == "0010"


def test_pragmatic_speaker_exhausts():
    m = demo_matrix()
    with pytest.raises(Exhausted):
        pragmatic_speaker_choose(m, 0, [U0, U1, U2], SpeakerKind.PRAGMATIC_ARGMAX, random.Random(0))


def test_pragmatic_speaker_rejects_random_mode():
    with pytest.raises(InvalidArgument):
        pragmatic_speaker_choose(demo_matrix(), 0, [], SpeakerKind.RANDOM_CONSISTENT, random.Random(0))


def test_pragmatic_sample_frequencies():
    m = demo_matrix()
    rng = random.Random(77)
    n = 10_000
    counts = {s: 0 for s in ("1100", "0000", "0010", "0111")}
    for _ in range(n):
        counts[pragmatic_speaker_choose(m, 0, [], SpeakerKind.PRAGMATIC_SAMPLE, rng).s] += 1
    assert counts["0111"] == 0
    assert counts["1100"] / n == pytest.approx(3 / 11, abs=0.02)
    assert counts["0000"] / n == pytest.approx(4 / 11, abs=0.02)
    assert counts["0010"] / n == pytest.approx(4 / 11, abs=0.02)


# --- single games


def _cfg(**kw):
    base = dict(
        matrix=demo_matrix(),
        target=0,
        listener_kind=ListenerKind.PRAGMATIC,
        speaker_kind=SpeakerKind.PRAGMATIC_ARGMAX,
        example_budget=4,
        allow_negative=False,
        seed=0,
    )
    base.update(kw)
    return GameConfig(**base)


def test_run_game_demo_succeeds_quickly():
    r = run_game(_cfg())
    assert r.success
    assert r.reason == "solved"
    assert r.examples_used <= 2


def test_run_game_single_concept_domain():
    m = build_matrix([parse("0*")], ["", "0"], max_len=1)
    r = run_game(_cfg(matrix=m, target=0, example_budget=1))
    assert r.success
    assert r.examples_used <= 1


def test_game_config_validation():
    with pytest.raises(InvalidArgument):
        _cfg(example_budget=0)
    with pytest.raises(InvalidArgument):
        _cfg(target=4)


def test_run_game_exhaustion_reason():
    # the target's single consistent string runs out before the literal
    # listener's tie draw lands on it
    concepts = [parse(t) for t in ("0{2}", "0*", "[01]*", "0+")]
    m = build_matrix(concepts, utterance_universe(2), max_len=2)
    cfg = GameConfig(
        matrix=m,
        target=0,
        listener_kind=ListenerKind.LITERAL,
        speaker_kind=SpeakerKind.RANDOM_CONSISTENT,
        example_budget=10,
        allow_negative=False,
        seed=0,
    )
    r = run_game(cfg)
    assert not r.success
    assert r.reason == "exhausted"
    assert [u.s for u, _ in r.trace] == ["00"]


def test_run_game_indescribable_target_exhausts_immediately():
    # a concept needing longer strings than the universe holds cannot be
    # communicated at all; the game fails as exhausted, not as an error
    concepts = [parse(t) for t in ("0{2}0{2}", "0*", "[01]*", "1*")]
    m = build_matrix(concepts, utterance_universe(2), max_len=2)
    for speaker in (SpeakerKind.RANDOM_CONSISTENT, SpeakerKind.PRAGMATIC_ARGMAX):
        cfg = GameConfig(
            matrix=m,
            target=0,
            listener_kind=ListenerKind.LITERAL,
            speaker_kind=speaker,
            example_budget=5,
            allow_negative=False,
            seed=0,  # frozen: the no-example tie draw must miss the target
        )
        r = run_game(cfg)
        assert (r.success, r.reason, r.examples_used) == (False, "exhausted", 0)


def test_run_game_deterministic():
    a = run_game(_cfg(seed=123))
    b = run_game(_cfg(seed=123))
    assert (a.success, a.reason, a.examples_used, a.trace) == (
        b.success,
        b.reason,
        b.examples_used,
        b.trace,
    )


def test_run_game_budget_and_soundness():
    d = make_domain(sample_size=12, max_len=4, seed=11)
    for seed in range(30):
        for kind in (ListenerKind.LITERAL, ListenerKind.PRAGMATIC):
            cfg = GameConfig(
                matrix=d.unsigned,
                target=seed % 12,
                listener_kind=kind,
                speaker_kind=SpeakerKind.RANDOM_CONSISTENT,
                example_budget=5,
                allow_negative=False,
                seed=seed,
            )
            r = run_game(cfg)
            assert r.examples_used <= cfg.example_budget
            assert r.examples_used == len(r.trace)
            if r.success and r.trace:
                assert r.trace[-1][1] == cfg.target
                # recompute the final guess offline from the trace alone
                examples = [u for u, _ in r.trace]
                p = posterior(d.unsigned, examples, kind)
                g = best_guess(p, TiePolicy.RANDOM_UNIFORM, derive_tie_rng(cfg.seed, examples))
                assert g == cfg.target


# --- experiments


def test_run_experiment_report_shape():
    d = make_domain(sample_size=10, max_len=3, seed=2)
    rep = run_experiment(
        d.unsigned,
        games=25,
        listener_kind=ListenerKind.PRAGMATIC,
        speaker_kind=SpeakerKind.RANDOM_CONSISTENT,
        budget=6,
        allow_negative=False,
        seed=4,
    )
    assert len(rep.per_game) == 25
    assert rep.aggregate["games"] == 25
    assert 0.0 <= rep.aggregate["success_rate"] <= 1.0
    assert set(rep.per_game[0]) == {"game", "target", "success", "reason", "examples_used"}
    assert all(row["reason"] in ("solved", "budget", "exhausted") for row in rep.per_game)


def test_run_experiment_single_game():
    d = make_domain(sample_size=5, max_len=3, seed=2)
    rep = run_experiment(
        d.unsigned, 1, ListenerKind.LITERAL, SpeakerKind.RANDOM_CONSISTENT, seed=9
    )
    assert len(rep.per_game) == 1


def test_run_experiment_rejects_zero_games():
    d = make_domain(sample_size=5, max_len=3, seed=2)
    with pytest.raises(InvalidArgument):
        run_experiment(d.unsigned, 0, ListenerKind.LITERAL, SpeakerKind.RANDOM_CONSISTENT)


def test_report_json_byte_deterministic():
    d = make_domain(sample_size=10, max_len=3, seed=2)
    args = dict(
        games=20,
        listener_kind=ListenerKind.LITERAL,
        speaker_kind=SpeakerKind.PRAGMATIC_SAMPLE,
        budget=5,
        allow_negative=False,
        seed=31,
    )
    assert run_experiment(d.unsigned, **args).to_json() == run_experiment(d.unsigned, **args).to_json()


def test_report_csv_export():
    d = make_domain(sample_size=8, max_len=3, seed=2)
    rep = run_experiment(
        d.unsigned, 10, ListenerKind.PRAGMATIC, SpeakerKind.RANDOM_CONSISTENT, seed=1
    )
    buf = io.StringIO()
    rep.write_csv(buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "game,target,success,reason,examples_used"
    assert len(lines) == 11


def test_paired_experiment_shares_targets():
    d = make_domain(sample_size=10, max_len=4, seed=6)
    pr = run_paired_experiment(
        d.unsigned, 30, SpeakerKind.RANDOM_CONSISTENT, budget=6, allow_negative=False, seed=3
    )
    lit_targets = [row["target"] for row in pr.literal.per_game]
    prag_targets = [row["target"] for row in pr.pragmatic.per_game]
    assert lit_targets == prag_targets
    assert pr.paired["shared_successes"] <= min(
        sum(r["success"] for r in pr.literal.per_game),
        sum(r["success"] for r in pr.pragmatic.per_game),
    )
    assert pr.to_json() == run_paired_experiment(
        d.unsigned, 30, SpeakerKind.RANDOM_CONSISTENT, budget=6, allow_negative=False, seed=3
    ).to_json()
