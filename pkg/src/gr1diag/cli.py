"""Command-line entry point.

Exit codes: 0 synthesizable, 2 unsatisfiable, 3 unrealizable, 1 any
error (parse failure, resource limits, bad arguments).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .arena import DEFAULT_STATE_CAP
from .engine import (
    DEFAULT_BUDGET_MS,
    DEFAULT_MAX_DEPTH,
    Diagnosis,
    diagnose,
)
from .errors import Gr1DiagError
from .parser import parse_spec

_EXIT_BY_VERDICT = {
    "Synthesizable": 0,
    "Unsatisfiable": 2,
    "Unrealizable": 3,
}


def _load_spec(args):
    with open(args.spec_path, encoding="utf-8") as fh:
        source = fh.read()
    if args.map:
        with open(args.map, encoding="utf-8") as fh:
            map_text = fh.read()
        has_topology = any(
            line.split("#", 1)[0].strip() == "[TOPOLOGY]"
            for line in source.splitlines()
        )
        if has_topology:
            raise Gr1DiagError(
                "--map given but the specification already has a "
                "[TOPOLOGY] section"
            )
        source = source.rstrip("\n") + "\n[TOPOLOGY]\n" + map_text
    return parse_spec(source), source


def _write_dumps(args, diag: Diagnosis) -> None:
    art = diag.artifacts
    if args.dump_cnf:
        chunks = []
        if art is not None:
            for i, cnf in enumerate(art.cnfs):
                chunks.append(f"c instance {i}\n" + cnf.to_dimacs())
        with open(args.dump_cnf, "w", encoding="utf-8") as fh:
            fh.write("".join(chunks))
    if args.dump_counterstrategy:
        text = ""
        if art is not None and art.counterstrategy is not None:
            text = art.counterstrategy.dump()
        with open(args.dump_counterstrategy, "w", encoding="utf-8") as fh:
            fh.write(text)


def _verdict_line(diag: Diagnosis, spec) -> str:
    if diag.verdict == "Synthesizable":
        return "SYNTHESIZABLE"
    mode = f" ({diag.failure_mode.lower()})" if diag.failure_mode else ""
    line = diag.verdict.upper() + mode
    if diag.livelocked_goal is not None:
        line += f", goal: {spec.statement(diag.livelocked_goal).text}"
    return line


def _print_human(diag: Diagnosis, spec, full: bool) -> None:
    print(_verdict_line(diag, spec))
    if diag.bad_init is not None:
        true_props = sorted(n for n, v in diag.bad_init if v)
        print(f"losing initial state: {{{', '.join(true_props)}}}")
    if not full:
        return
    if diag.core:
        print("the statements that cause the problem are:")
        for c in diag.core:
            tag = f" [{', '.join(c.tags)}]" if c.tags else ""
            print(f"  line {c.span[0]}: {c.text}{tag}")
    if diag.method:
        print(f"method: {diag.method}")
    if diag.depth_used is not None:
        print(f"depth used: {diag.depth_used}")
    for flag in diag.flags:
        print(f"flag: {flag}")
    for note in diag.notes:
        print(f"note: {note}")
    for warning in diag.warnings:
        print(f"warning: {warning}")


def cmd_check(args) -> int:
    spec, _ = _load_spec(args)
    diag = diagnose(
        spec, max_depth=args.max_depth, budget_ms=args.budget_ms,
        state_cap=args.state_cap,
    )
    _write_dumps(args, diag)
    if args.format == "report":
        print(json.dumps(diag.to_report(), indent=2))
    else:
        _print_human(diag, spec, full=False)
    return _EXIT_BY_VERDICT[diag.verdict]


def cmd_explain(args) -> int:
    spec, _ = _load_spec(args)
    diag = diagnose(
        spec, max_depth=args.max_depth, budget_ms=args.budget_ms,
        state_cap=args.state_cap,
    )
    _write_dumps(args, diag)
    if args.format == "report":
        print(json.dumps(diag.to_report(), indent=2))
    else:
        _print_human(diag, spec, full=True)
    return _EXIT_BY_VERDICT[diag.verdict]


def cmd_game(args) -> int:
    import uvicorn

    from .server import create_app

    _, source = _load_spec(args)
    app = create_app(
        default_spec=source, seed=args.seed, state_cap=args.state_cap
    )
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except SystemExit as exc:  # uvicorn signals bind failures this way
        return int(exc.code or 1)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gr1diag",
        description="Diagnose unsynthesizable GR(1) robot specifications.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("spec_path", help="specification file")
        p.add_argument("--map", help="workspace map file to merge in")
        p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
        p.add_argument("--budget-ms", type=int, default=DEFAULT_BUDGET_MS)
        p.add_argument("--state-cap", type=int, default=DEFAULT_STATE_CAP)
        p.add_argument("--dump-cnf", metavar="PATH")
        p.add_argument("--dump-counterstrategy", metavar="PATH")
        p.add_argument(
            "--format", choices=("text", "report"), default="text"
        )
        p.add_argument("--seed", type=int, default=None)

    p_check = sub.add_parser("check", help="classify the specification")
    common(p_check)
    p_check.set_defaults(fn=cmd_check)

    p_explain = sub.add_parser("explain", help="compute a minimal core")
    common(p_explain)
    p_explain.set_defaults(fn=cmd_explain)

    p_game = sub.add_parser("game", help="serve the interactive game")
    common(p_game)
    p_game.add_argument("--port", type=int, default=8000)
    p_game.add_argument("--host", default="127.0.0.1")
    p_game.set_defaults(fn=cmd_game)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "max_depth", 0) < 0:
        parser.error("--max-depth must be non-negative")
    if args.command == "game" and not 1024 <= args.port <= 65535:
        parser.error("--port must be in 1024..65535")
    try:
        return args.fn(args)
    except Gr1DiagError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
