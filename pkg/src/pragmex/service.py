"""Live communication sessions: target assignment, example edits, guesses.

Every state change is recorded as an event; replaying a session's event
stream rebuilds it exactly, which is also how persisted sessions are
restored.  Guess tie-breaking is sticky per example set (see
derive_tie_rng), so pressing Guess repeatedly never churns.
"""

from __future__ import annotations

import json
import random
import threading
import time
import uuid
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .config import ServerConfig, build_domain
from .domain import (
    Domain,
    MeaningMatrix,
    Sign,
    Utterance,
    concept_label,
    consistent_set,
    validate_binary_string,
)
from .errors import (
    DuplicateExample,
    InconsistentSpec,
    InvalidArgument,
    InvalidState,
    InvalidString,
    NotFound,
    RegexSyntaxError,
    SignNotAllowed,
    UnknownConcept,
)
from .inference import ListenerKind, TiePolicy, best_guess, derive_tie_rng, posterior
from .regexlang import explain, parse, render


class UiMode(Enum):
    POSITIVE_ONLY = "positive_only"
    POSITIVE_NEGATIVE = "positive_negative"


class Robot(Enum):
    GREEN = "green"
    BLUE = "blue"


class SessionStatus(Enum):
    ACTIVE = "active"
    SOLVED = "solved"
    ABANDONED = "abandoned"


@dataclass
class EventRecord:
    session_id: str
    seq: int
    kind: str
    payload: dict
    ts: float

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "seq": self.seq,
            "kind": self.kind,
            "payload": self.payload,
            "ts": self.ts,
        }


@dataclass
class Session:
    id: str
    ui_mode: UiMode
    robot: Robot
    listener_kind: ListenerKind
    target: int
    seed: int
    examples: list[Utterance] = field(default_factory=list)
    status: SessionStatus = SessionStatus.ACTIVE
    guess: int = -1  # no guess computed yet
    posterior_size: int = 0
    updates: int = 0  # guess recomputations, salts the resample-ties stream
    created_at: float = 0.0
    updated_at: float = 0.0
    events: list[EventRecord] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


@dataclass
class GuessUpdate:
    guess: str
    solved: bool
    posterior_size: int


def _sign_for(mode: UiMode, sign: str | None) -> Sign:
    """Map a request sign ('+', '-', None) to the matrix sign convention."""
    if sign not in (None, "", "+", "-"):
        raise InvalidArgument(f"sign must be '+' or '-', got {sign!r}")
    if mode is UiMode.POSITIVE_ONLY:
        if sign == "-":
            raise SignNotAllowed("this session accepts only positive examples")
        return Sign.UNSIGNED
    return Sign.NEGATIVE if sign == "-" else Sign.POSITIVE


def _sign_out(sign: Sign) -> str | None:
    return None if sign is Sign.UNSIGNED else sign.value


class SessionService:
    """Owns all live sessions over one shared domain.

    Mutations on a session are serialized by a per-session lock; the
    meaning matrices are read-only and shared.
    """

    def __init__(self, domain: Domain, config: ServerConfig | None = None):
        self.domain = domain
        self.config = config or ServerConfig()
        self._sessions: dict[str, Session] = {}
        self._registry_lock = threading.Lock()
        self._seed_rng = random.Random()
        self._persist_dir: Path | None = None
        if self.config.persist_dir:
            self._persist_dir = Path(self.config.persist_dir)
            self._persist_dir.mkdir(parents=True, exist_ok=True)

    # -- plumbing

    def matrix_for(self, mode: UiMode) -> MeaningMatrix:
        return self.domain.matrix(signed=mode is UiMode.POSITIVE_NEGATIVE)

    def get_session(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise NotFound(f"no session {session_id!r}") from None

    def session_ids(self) -> list[str]:
        return list(self._sessions)

    def _emit(self, sess: Session, kind: str, payload: dict) -> None:
        record = EventRecord(sess.id, len(sess.events), kind, payload, time.time())
        sess.events.append(record)
        sess.updated_at = record.ts
        if self._persist_dir is not None:
            with open(self._persist_dir / f"{sess.id}.jsonl", "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")

    def _snapshot_index(self) -> None:
        if self._persist_dir is None:
            return
        index = {
            sid: {"status": s.status.value, "events": len(s.events)}
            for sid, s in self._sessions.items()
        }
        tmp = self._persist_dir / "index.json.tmp"
        tmp.write_text(json.dumps(index, sort_keys=True, indent=1))
        tmp.replace(self._persist_dir / "index.json")

    def _recompute(self, sess: Session) -> None:
        """Refresh guess, posterior size, and solved status from examples."""
        m = self.matrix_for(sess.ui_mode)
        p = posterior(m, sess.examples, sess.listener_kind)
        sess.updates += 1
        salt = str(sess.updates) if self.config.resample_ties_per_update else ""
        rng = derive_tie_rng(sess.seed, sess.examples, salt)
        previous = sess.guess
        sess.guess = best_guess(p, TiePolicy.RANDOM_UNIFORM, rng)
        sess.posterior_size = len(p.support())
        if sess.guess != previous:
            self._emit(sess, "guess_changed", {"guess": self._guess_text(sess)})
        if sess.status is not SessionStatus.ABANDONED:
            solved_now = sess.guess == sess.target
            if solved_now and sess.status is not SessionStatus.SOLVED:
                sess.status = SessionStatus.SOLVED
                self._emit(sess, "solved", {"guess": self._guess_text(sess)})
            elif not solved_now:
                sess.status = SessionStatus.ACTIVE

    def _guess_text(self, sess: Session) -> str:
        return concept_label(self.domain.concepts[sess.guess])

    def _update(self, sess: Session) -> GuessUpdate:
        return GuessUpdate(
            guess=self._guess_text(sess),
            solved=sess.status is SessionStatus.SOLVED,
            posterior_size=sess.posterior_size,
        )

    def _resolve_target(self, text: str | None, seed: int) -> int:
        if text is None:
            rng = random.Random(f"{seed}|target")
            return rng.randrange(len(self.domain.concepts))
        try:
            canonical = render(parse(text))
        except RegexSyntaxError:
            raise UnknownConcept(f"{text!r} is not a concept in this domain") from None
        for j, c in enumerate(self.domain.concepts):
            if concept_label(c) == canonical:
                return j
        raise UnknownConcept(f"{canonical!r} is not a concept in this domain")

    # -- operations

    def create_session(
        self,
        ui_mode: UiMode,
        robot: Robot,
        seed: int | None = None,
        target: str | None = None,
    ) -> Session:
        if seed is None:
            seed = self._seed_rng.getrandbits(32)
        target_idx = self._resolve_target(target, seed)
        sess = Session(
            id=uuid.uuid4().hex,
            ui_mode=ui_mode,
            robot=robot,
            listener_kind=self.config.listener_for(robot.value),
            target=target_idx,
            seed=seed,
        )
        with self._registry_lock:
            self._sessions[sess.id] = sess
        with sess.lock:
            self._emit(
                sess,
                "created",
                {
                    "ui_mode": ui_mode.value,
                    "robot": robot.value,
                    "listener": sess.listener_kind.value,
                    "seed": seed,
                    "target": target_idx,
                    "target_text": concept_label(self.domain.concepts[target_idx]),
                },
            )
            # replay reads created_at off the first event, so keep them equal
            sess.created_at = sess.events[0].ts
            self._recompute(sess)
            self._snapshot_index()
        return sess

    def add_example(self, session_id: str, s: str, sign: str | None = None) -> GuessUpdate:
        sess = self.get_session(session_id)
        with sess.lock:
            if sess.status is not SessionStatus.ACTIVE:
                raise InvalidState(f"cannot add examples to a {sess.status.value} session")
            if s == "" and not self.config.allow_empty_example:
                raise InvalidString("the empty string is not accepted as an example")
            validate_binary_string(s, self.domain.max_len)
            u = Utterance(s, _sign_for(sess.ui_mode, sign))
            if u in sess.examples:
                raise DuplicateExample(f"example {u.label()!r} already given")
            m = self.matrix_for(sess.ui_mode)
            m.row_index(u)  # UnknownUtterance for strings outside the universe
            if consistent_set(m, sess.examples + [u]) == 0:
                # reject rather than store: the session never holds a spec no
                # concept can satisfy, so a guess is always defined
                raise InconsistentSpec("no consistent program for these examples")
            sess.examples.append(u)
            self._emit(sess, "example_added", {"string": s, "sign": _sign_out(u.sign)})
            self._recompute(sess)
            self._snapshot_index()
            return self._update(sess)

    def remove_example(self, session_id: str, s: str, sign: str | None = None) -> GuessUpdate:
        sess = self.get_session(session_id)
        with sess.lock:
            if sess.status is SessionStatus.ABANDONED:
                raise InvalidState("cannot edit an abandoned session")
            try:
                u = Utterance(s, _sign_for(sess.ui_mode, sign))
            except SignNotAllowed:
                # a sign the mode forbids cannot be present
                raise NotFound(f"example ({s!r}, {sign!r}) is not in this session") from None
            if u not in sess.examples:
                raise NotFound(f"example {u.label()!r} is not in this session")
            sess.examples.remove(u)
            self._emit(sess, "example_removed", {"string": s, "sign": _sign_out(u.sign)})
            self._recompute(sess)
            self._snapshot_index()
            return self._update(sess)

    def request_guess(self, session_id: str) -> GuessUpdate:
        sess = self.get_session(session_id)
        with sess.lock:
            self._emit(sess, "guess_requested", {"guess": self._guess_text(sess)})
            return self._update(sess)

    def abandon_session(self, session_id: str) -> Session:
        sess = self.get_session(session_id)
        with sess.lock:
            if sess.status is not SessionStatus.ACTIVE:
                raise InvalidState(f"cannot abandon a {sess.status.value} session")
            sess.status = SessionStatus.ABANDONED
            self._emit(sess, "abandoned", {})
            self._snapshot_index()
        return sess

    def session_view(self, sess: Session) -> dict:
        """API shape; deliberately omits the listener kind (robot blinding)."""
        return {
            "id": sess.id,
            "ui_mode": sess.ui_mode.value,
            "robot": sess.robot.value,
            "status": sess.status.value,
            "target": concept_label(self.domain.concepts[sess.target]),
            "target_explanation": explain(self.domain.concepts[sess.target]),
            "examples": [
                {"string": u.s, "sign": _sign_out(u.sign)} for u in sess.examples
            ],
            "guess": self._guess_text(sess),
            "solved": sess.status is SessionStatus.SOLVED,
            "posterior_size": sess.posterior_size,
            "created_at": sess.created_at,
            "updated_at": sess.updated_at,
        }

    # -- replay and persistence

    def replay_session(self, records: list[EventRecord]) -> Session:
        """Rebuild a session purely from its event stream."""
        if not records or records[0].kind != "created":
            raise InvalidState("event stream must start with a created event")
        head = records[0].payload
        mode = UiMode(head["ui_mode"])
        sess = Session(
            id=records[0].session_id,
            ui_mode=mode,
            robot=Robot(head["robot"]),
            listener_kind=ListenerKind(head["listener"]),
            target=head["target"],
            seed=head["seed"],
            created_at=records[0].ts,
        )
        sess.events = list(records)
        abandoned = False
        for rec in records[1:]:
            if rec.kind == "example_added":
                u = Utterance(rec.payload["string"], _replayed_sign(mode, rec.payload["sign"]))
                sess.examples.append(u)
                sess.updates += 1
            elif rec.kind == "example_removed":
                u = Utterance(rec.payload["string"], _replayed_sign(mode, rec.payload["sign"]))
                sess.examples.remove(u)
                sess.updates += 1
            elif rec.kind == "abandoned":
                abandoned = True
        if mode is UiMode.POSITIVE_ONLY and any(
            u.sign is Sign.NEGATIVE for u in sess.examples
        ):
            raise InvalidState("positive-only session log contains a negative example")
        sess.updates += 1  # the creation-time recompute
        m = self.matrix_for(mode)
        p = posterior(m, sess.examples, sess.listener_kind)
        salt = str(sess.updates) if self.config.resample_ties_per_update else ""
        sess.guess = best_guess(
            p, TiePolicy.RANDOM_UNIFORM, derive_tie_rng(sess.seed, sess.examples, salt)
        )
        sess.posterior_size = len(p.support())
        if abandoned:
            sess.status = SessionStatus.ABANDONED
        elif sess.guess == sess.target:
            sess.status = SessionStatus.SOLVED
        else:
            sess.status = SessionStatus.ACTIVE
        sess.updated_at = records[-1].ts
        return sess

    def load_persisted(self) -> int:
        """Restore sessions from the persist directory; returns the count."""
        if self._persist_dir is None:
            return 0
        count = 0
        for path in sorted(self._persist_dir.glob("*.jsonl")):
            records = []
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    raw = json.loads(line)
                    records.append(
                        EventRecord(
                            raw["session_id"], raw["seq"], raw["kind"], raw["payload"], raw["ts"]
                        )
                    )
            sess = self.replay_session(records)
            with self._registry_lock:
                self._sessions[sess.id] = sess
            count += 1
        return count


def _replayed_sign(mode: UiMode, sign: str | None) -> Sign:
    if sign is None:
        return Sign.UNSIGNED
    if sign == "-" and mode is UiMode.POSITIVE_ONLY:
        raise InvalidState("positive-only session log contains a negative example")
    return Sign(sign)


def service_from_config(config: ServerConfig) -> SessionService:
    service = SessionService(build_domain(config), config)
    service.load_persisted()
    return service
