"""Command line front end.

Subcommands: proto (tournament protocol on stdio), bench, match, serve,
bake (weights -> codebook cache), dump-patterns.  The default weight file
comes from `LINEGOM_WEIGHTS` when set; without it a built-in seeded net is
used.  Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

WEIGHTS_ENV = "LINEGOM_WEIGHTS"


def _base_config(args) -> "EngineConfig":
    from .config import EngineConfig

    weights = getattr(args, "weights", None) or os.environ.get(WEIGHTS_ENV)
    cfg = {"backend": getattr(args, "backend", "alphabeta")}
    if weights:
        cfg["weights"] = weights
    if getattr(args, "cache", None):
        cfg["codebook_cache"] = args.cache
    if getattr(args, "turn_ms", None):
        cfg["turn_time_ms"] = args.turn_ms
    return EngineConfig.from_dict(cfg)


def cmd_proto(args) -> int:
    from .protocol import GomocupProtocol
    GomocupProtocol(_base_config(args)).loop()
    return 0


def cmd_bench(args) -> int:
    from .bench import format_report, run_bench
    report = run_bench(_base_config(args), ab_depth=args.depth,
                       mcts_playouts=args.playouts)
    print(format_report(report))
    return 0


def cmd_match(args) -> int:
    from .engine import Engine
    from .match import load_openings, selfplay_match
    config = _base_config(args)
    book = load_openings(args.book)
    report = selfplay_match(lambda: Engine(config), lambda: Engine(config),
                            book, args.games, budget=args.budget,
                            move_cap=args.move_cap)
    for game in report.games:
        print(game.to_text())
    print(json.dumps(report.summary(), indent=2))
    return 0


def cmd_serve(args) -> int:
    from .service import serve
    serve(_base_config(args), host=args.host, port=args.port)
    return 0


def cmd_bake(args) -> int:
    from .formats import load_weights, weight_digest, write_codebook_cache
    from .mapping import bake_codebook
    mapping, _ = load_weights(args.weights)
    codebook = bake_codebook(mapping)
    write_codebook_cache(args.out, codebook, weight_digest(args.weights))
    print(f"baked {args.weights} -> {args.out}")
    return 0


def cmd_dump_patterns(args) -> int:
    from .patterns import NUM_PATTERNS, pattern_decode
    for pid in args.ids:
        pat = pattern_decode(pid)
        cells = "".join(".xo"[d] for d in pat.cells)
        print(f"{pid}: left={pat.left} right={pat.right} cells={cells}")
    if not args.ids:
        print(f"pattern space size: {NUM_PATTERNS}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linegom")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--weights", help=f"MIXW file (default: ${WEIGHTS_ENV})")
        p.add_argument("--cache", help="MIXC codebook cache path")
        p.add_argument("--backend", choices=("mcts", "alphabeta"), default="alphabeta")
        p.add_argument("--turn-ms", type=int, dest="turn_ms",
                       help="per-turn time budget in milliseconds")

    p = sub.add_parser("proto", help="Gomocup-style protocol on stdin/stdout")
    common(p)
    p.set_defaults(func=cmd_proto)

    p = sub.add_parser("bench", help="throughput report on the fixed suite")
    common(p)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--playouts", type=int, default=200)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("match", help="self-play match with paired openings")
    common(p)
    p.add_argument("--games", type=int, default=20)
    p.add_argument("--budget", type=int, default=2,
                   help="per-move depth (alphabeta) or playouts (mcts)")
    p.add_argument("--move-cap", type=int, dest="move_cap", default=225)
    p.add_argument("--book", help="opening book file (default: bundled)")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("serve", help="JSON analysis service")
    common(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("bake", help="bake a weight file into a codebook cache")
    p.add_argument("--weights", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bake)

    p = sub.add_parser("dump-patterns", help="decode pattern indices")
    p.add_argument("ids", nargs="*", type=int)
    p.set_defaults(func=cmd_dump_patterns)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 130
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
