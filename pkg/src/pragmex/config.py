"""Server configuration: domain selection, robot mapping, session policies.

Accepts TOML or JSON files with the same flat key set; everything has a
sensible default so the server runs with no config at all (demo domain on
localhost).
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .domain import (
    DEFAULT_DOMAIN_SEED,
    DEFAULT_MAX_LEN,
    DEFAULT_POOL_LIMIT,
    DEFAULT_POOL_MAX_ATOMS,
    DEFAULT_SAMPLE_SIZE,
    Domain,
    desk_domain,
    full_domain,
    make_domain,
)
from .errors import InvalidArgument
from .fixtures import DEMO_CONCEPTS, DEMO_MAX_LEN, DEMO_STRINGS, demo_matrix
from .inference import ListenerKind
from .regexlang import parse

PRESETS = ("demo", "desk", "full", "custom")
ROBOTS = ("green", "blue")
LISTENERS = ("pragmatic", "literal")


def _default_robot_mapping() -> dict[str, str]:
    return {"green": "pragmatic", "blue": "literal"}


@dataclass
class ServerConfig:
    domain_preset: str = "demo"
    sample_size: int = DEFAULT_SAMPLE_SIZE  # the custom-preset knobs
    max_len: int = DEFAULT_MAX_LEN
    domain_seed: int = DEFAULT_DOMAIN_SEED
    pool_max_atoms: int = DEFAULT_POOL_MAX_ATOMS
    pool_limit: int = DEFAULT_POOL_LIMIT
    robot_mapping: dict[str, str] = field(default_factory=_default_robot_mapping)
    allow_empty_example: bool = False
    resample_ties_per_update: bool = False
    host: str = "127.0.0.1"
    port: int = 8000
    persist_dir: str | None = None

    def __post_init__(self):
        if self.domain_preset not in PRESETS:
            raise InvalidArgument(f"unknown domain preset {self.domain_preset!r}")
        if set(self.robot_mapping) != set(ROBOTS):
            raise InvalidArgument("robot_mapping needs exactly the keys 'green' and 'blue'")
        for robot, listener in self.robot_mapping.items():
            if listener not in LISTENERS:
                raise InvalidArgument(
                    f"robot {robot!r} mapped to unknown listener {listener!r}"
                )

    def listener_for(self, robot: str) -> ListenerKind:
        return ListenerKind(self.robot_mapping[robot])


def load_config(path: str) -> ServerConfig:
    p = Path(path)
    if p.suffix == ".toml":
        with open(p, "rb") as fh:
            raw = tomllib.load(fh)
    elif p.suffix == ".json":
        with open(p, encoding="utf-8") as fh:
            raw = json.load(fh)
    else:
        raise InvalidArgument(f"config must be .toml or .json, got {p.suffix!r}")
    if not isinstance(raw, dict):
        raise InvalidArgument("config root must be a table/object")
    known = {f.name for f in fields(ServerConfig)}
    unknown = set(raw) - known
    if unknown:
        raise InvalidArgument(f"unknown config keys: {sorted(unknown)}")
    return ServerConfig(**raw)


def demo_domain() -> Domain:
    """The fixed 4-concept reference game; its universe is just the four
    fixture strings, so it stays hand-checkable end to end."""
    return Domain(
        concepts=[parse(t) for t in DEMO_CONCEPTS],
        strings=list(DEMO_STRINGS),
        max_len=DEMO_MAX_LEN,
        seed=0,
        unsigned=demo_matrix(),
        signed=demo_matrix(signed=True),
    )


def build_domain(cfg: ServerConfig) -> Domain:
    if cfg.domain_preset == "demo":
        return demo_domain()
    if cfg.domain_preset == "desk":
        return desk_domain(cfg.domain_seed)
    if cfg.domain_preset == "full":
        return full_domain(cfg.domain_seed)
    return make_domain(
        sample_size=cfg.sample_size,
        max_len=cfg.max_len,
        seed=cfg.domain_seed,
        pool_max_atoms=cfg.pool_max_atoms,
        pool_limit=cfg.pool_limit,
    )
