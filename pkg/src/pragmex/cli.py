"""Command-line entry points: domain building, one-shot inference,
simulation runs, matrix export, and the HTTP server."""

from __future__ import annotations

import argparse
import contextlib
import json
import sys

from .config import PRESETS, ServerConfig, build_domain, load_config
from .domain import Sign, Utterance, matrix_to_csv, save_matrix
from .errors import InvalidArgument, PragmexError
from .inference import ListenerKind, posterior, posterior_to_json
from .simulation import SpeakerKind, run_experiment, run_paired_experiment


def _add_domain_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=PRESETS, default="demo")
    p.add_argument("--sample-size", type=int, default=None)
    p.add_argument("--max-len", type=int, default=None)
    p.add_argument("--seed", type=int, default=None, dest="domain_seed")


def _domain_from_args(args: argparse.Namespace):
    overrides = {"domain_preset": args.preset}
    if args.sample_size is not None:
        overrides["sample_size"] = args.sample_size
    if args.max_len is not None:
        overrides["max_len"] = args.max_len
    if args.domain_seed is not None:
        overrides["domain_seed"] = args.domain_seed
    # any size/seed override implies the custom builder
    if args.preset != "custom" and len(overrides) > 1:
        overrides["domain_preset"] = "custom"
    return build_domain(ServerConfig(**overrides))


def _parse_examples(m, tokens: list[str]) -> list[Utterance]:
    """Tokens are binary strings, optionally prefixed +/-; bare means positive."""
    out = []
    for tok in tokens:
        if tok.startswith("-"):
            sign, s = Sign.NEGATIVE, tok[1:]
        elif tok.startswith("+"):
            sign, s = Sign.POSITIVE, tok[1:]
        else:
            sign, s = (Sign.POSITIVE if m.signed else Sign.UNSIGNED), tok
        u = Utterance(s, sign)
        m.row_index(u)  # validates against the universe
        out.append(u)
    return out


@contextlib.contextmanager
def _open_out(path: str | None):
    if path:
        with open(path, "w") as fh:
            yield fh
    else:
        yield sys.stdout


def cmd_build_domain(args: argparse.Namespace) -> int:
    dom = _domain_from_args(args)
    if args.out:
        save_matrix(dom.matrix(signed=args.signed), args.out)
    print(json.dumps(dom.describe(), sort_keys=True))
    return 0


def cmd_infer(args: argparse.Namespace) -> int:
    dom = _domain_from_args(args)
    signed = args.signed or any(t.startswith(("-", "+")) for t in args.examples)
    m = dom.matrix(signed=signed)
    examples = _parse_examples(m, args.examples)
    p = posterior(m, examples, ListenerKind(args.listener))
    rows = posterior_to_json(m, p)
    if args.top:
        rows = rows[: args.top]
    print(json.dumps(rows))
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    dom = _domain_from_args(args)
    m = dom.matrix(signed=args.allow_negative)
    speaker = SpeakerKind(args.speaker)
    if args.listener == "both":
        report = run_paired_experiment(
            m, args.games, speaker,
            budget=args.budget, allow_negative=args.allow_negative, seed=args.run_seed,
        )
    else:
        report = run_experiment(
            m, args.games, ListenerKind(args.listener), speaker,
            budget=args.budget, allow_negative=args.allow_negative, seed=args.run_seed,
        )
        if args.csv:
            with open(args.csv, "w") as fh:
                report.write_csv(fh)
    with _open_out(args.out) as fh:
        fh.write(report.to_json() + "\n")
    return 0


def cmd_export_matrix(args: argparse.Namespace) -> int:
    if args.format != "csv":
        raise InvalidArgument(f"unsupported format: {args.format}")
    dom = _domain_from_args(args)
    with _open_out(args.out) as fh:
        matrix_to_csv(dom.matrix(signed=args.signed), fh)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import create_app
    from .service import service_from_config

    cfg = load_config(args.config) if args.config else ServerConfig()
    if args.host:
        cfg.host = args.host
    if args.port is not None:
        cfg.port = args.port
    service = service_from_config(cfg)
    uvicorn.run(create_app(service), host=cfg.host, port=cfg.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pragmex")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-domain", help="build a concept/utterance domain")
    _add_domain_args(p)
    p.add_argument("--signed", action="store_true", help="save the signed matrix")
    p.add_argument("--out", default=None, help="write the matrix artifact here")
    p.set_defaults(func=cmd_build_domain)

    p = sub.add_parser("infer", help="posterior over concepts for a fixed example set")
    _add_domain_args(p)
    p.add_argument("--listener", choices=["literal", "pragmatic"], required=True)
    p.add_argument(
        "--examples", nargs="+", required=True, metavar="EX",
        help="binary strings; prefix with - for negative (use -- before a leading -EX)",
    )
    p.add_argument("--signed", action="store_true", help="force the signed matrix")
    p.add_argument("--top", type=int, default=None, help="print only the best N rows")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("simulate", help="run seeded speaker/listener games")
    _add_domain_args(p)
    p.add_argument("--games", type=int, required=True)
    p.add_argument("--listener", choices=["literal", "pragmatic", "both"], default="both")
    p.add_argument(
        "--speaker", choices=[k.value for k in SpeakerKind],
        default=SpeakerKind.RANDOM_CONSISTENT.value,
    )
    p.add_argument("--budget", type=int, default=10)
    p.add_argument("--allow-negative", action="store_true")
    p.add_argument("--run-seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.add_argument("--csv", default=None, help="also write per-game rows (single listener only)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("export-matrix", help="dump a matrix as CSV")
    _add_domain_args(p)
    p.add_argument("--format", choices=["csv"], default="csv")
    p.add_argument("--signed", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_export_matrix)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--config", default=None, help="TOML or JSON server config")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(func=cmd_serve)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PragmexError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
