"""Command-line entry point.

Subcommands: play, bench, train, filter-stats, enumerate, features.
Exit codes: 0 success, 1 usage error, 2 runtime failure.

Option values resolve in three layers: command-line flags beat the --config
JSON file, which beats built-in defaults; the fully resolved values are
embedded in every output artifact's manifest.  The only environment variable
read is TETRISLAB_JOBS (default worker count for --jobs).

Grids are written HEIGHTxWIDTH ("20x10" is the standard 20-row, 10-column
game).  play/enumerate/features default to 20x10; bench, train, and
filter-stats default to the shortened 10x10 game.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from ._version import __version__
from .artifacts import build_manifest, write_csv
from .bench import (
    DEFAULT_PIECE_CAP,
    bench_manifest_fields,
    play_episode_with_trace,
    run_benchmark,
    write_bench_csv,
    write_bench_summary,
)
from .board import BoardState, GameConfig, GameOverVariant, load_board
from .dominance import filter_stats, write_filter_report
from .engine import (
    IidPieceSource,
    MoveOutcome,
    Placement,
    drop,
    legal_placements,
    spawn_blocked,
)
from .features import (
    FeatureContext,
    extract,
    feature_names,
    feature_set_from_name,
)
from .optimize import CeConfig, ce_train, write_train_log
from .pieces import PIECE_BY_INDEX, piece_from_name
from .policy import (
    LinearPolicy,
    resolve_policy,
    save_policy,
    select_action_two_piece,
)


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        h, w = text.lower().split("x")
        return int(h), int(w)
    except ValueError:
        raise ValueError(f"grid must look like 20x10 (HEIGHTxWIDTH), got {text!r}") from None


def _parse_scoring(text: str) -> tuple[float, ...]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 4:
        raise ValueError("scoring needs exactly 4 comma-separated values")
    return tuple(parts)


def _parse_seed_list(text: str) -> list[int]:
    return [int(p) for p in text.split(",") if p.strip()]


def _default_jobs() -> int:
    raw = os.environ.get("TETRISLAB_JOBS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


class _Resolver:
    """Flags > config file > defaults, remembering what was resolved."""

    def __init__(self, args: argparse.Namespace) -> None:
        self.args = args
        self.doc = {}
        if getattr(args, "config", None):
            with open(args.config, "r", encoding="utf-8") as fh:
                self.doc = json.load(fh)
            if not isinstance(self.doc, dict):
                raise ValueError(f"{args.config}: config file must hold a JSON object")
        self.resolved: dict = {}

    def get(self, key: str, default):
        value = getattr(self.args, key, None)
        if value is None:
            value = self.doc.get(key, default)
        self.resolved[key] = value
        return value


def _game_config(res: _Resolver, default_grid: str) -> GameConfig:
    height, width = _parse_grid(str(res.get("grid", default_grid)))
    scoring = res.get("scoring", "1,2,3,4")
    if isinstance(scoring, str):
        scoring = _parse_scoring(scoring)
    else:
        scoring = tuple(float(s) for s in scoring)
    res.resolved["scoring"] = list(scoring)
    variant = str(res.get("variant", "overflow"))
    return GameConfig(
        width=width, height=height, scoring=scoring, game_over_variant=variant
    )


def _add_common(p: argparse.ArgumentParser, default_grid: str) -> None:
    p.add_argument("--config", help="JSON file supplying defaults for any flag")
    p.add_argument("--grid", help=f"HEIGHTxWIDTH (default {default_grid})")
    p.add_argument(
        "--variant",
        choices=["overflow", "spawn_blocked"],
        help="game-over rule (default overflow)",
    )
    p.add_argument("--scoring", help="reward per 1,2,3,4 cleared lines (default 1,2,3,4)")


def _manifest(kind: str, res: _Resolver, config: GameConfig, **extra) -> dict:
    command = {"subcommand": kind}
    command.update(res.resolved)
    fields = {"command": command, "game": config.to_dict()}
    fields.update(extra)
    return build_manifest(kind, **fields)


# --- subcommands -------------------------------------------------------------


def _cmd_play(args: argparse.Namespace) -> int:
    res = _Resolver(args)
    config = _game_config(res, "20x10")
    policy = resolve_policy(str(res.get("policy", "dellacherie")), config)
    seed = int(res.get("seed", 0))
    cap = int(res.get("cap", DEFAULT_PIECE_CAP))
    two_piece = bool(res.get("two_piece", False))
    trace_path = res.get("trace", None)

    if two_piece:
        if trace_path:
            raise ValueError("--trace is only supported for one-piece play")
        lines, pieces, reward, terminal = _play_two_piece(policy, config, seed, cap)
        result_fields = (lines, pieces, reward, terminal)
    else:
        result, trace = play_episode_with_trace(policy, config, seed, piece_cap=cap)
        result_fields = (result.lines, result.pieces, result.reward, result.terminal)
        if trace_path:
            manifest = _manifest("play", res, config, policy=policy.name)
            write_csv(
                trace_path,
                manifest,
                header=("move", "piece", "rotation", "column", "lines", "reward"),
                rows=(
                    (
                        i,
                        PIECE_BY_INDEX[int(row[0])].value,
                        int(row[1]),
                        int(row[2]),
                        int(row[3]),
                        config.reward_for(int(row[3])),
                    )
                    for i, row in enumerate(trace)
                ),
            )
    lines, pieces, reward, terminal = result_fields
    print(f"policy: {policy.name}")
    print(f"grid: {config.height}x{config.width}")
    print(f"lines: {lines}")
    print(f"pieces: {pieces}")
    print(f"reward: {reward}")
    print(f"ended: {'terminal' if terminal else 'piece cap reached'}")
    return 0


def _play_two_piece(
    policy: LinearPolicy, config: GameConfig, seed: int, cap: int
) -> tuple[int, int, float, bool]:
    """Lookahead play on the reference path (roughly 20x slower per move)."""
    source = IidPieceSource(seed)
    board = BoardState.empty(config.width, config.height)
    current = source.next_piece()
    upcoming = source.next_piece()
    lines = 0
    pieces = 0
    reward = 0.0
    terminal = False
    while pieces < cap:
        placement = select_action_two_piece(policy, board, current, upcoming)
        outcome = drop(board, placement)
        if outcome.terminal:
            terminal = True
            break
        board = outcome.post_board
        lines += outcome.lines_cleared
        reward += config.reward_for(outcome.lines_cleared)
        pieces += 1
        current = upcoming
        upcoming = source.next_piece()
        if config.game_over_variant is GameOverVariant.SPAWN_BLOCKED and spawn_blocked(
            board, current, config
        ):
            terminal = True
            break
    return lines, pieces, reward, terminal


def _cmd_bench(args: argparse.Namespace) -> int:
    res = _Resolver(args)
    config = _game_config(res, "10x10")
    policy = resolve_policy(str(res.get("policy", "dellacherie")), config)
    games = int(res.get("games", 30))
    seed = int(res.get("seed", 0))
    seeds_raw = res.get("seeds", None)
    seeds = _parse_seed_list(seeds_raw) if isinstance(seeds_raw, str) else seeds_raw
    cap = int(res.get("cap", DEFAULT_PIECE_CAP))
    jobs = int(res.get("jobs", _default_jobs()))
    out = res.get("out", None)

    report = run_benchmark(
        policy,
        config,
        n_games=None if seeds else games,
        seed=None if seeds else seed,
        seeds=seeds,
        piece_cap=cap,
        jobs=jobs,
    )
    manifest = _manifest("bench", res, config, **bench_manifest_fields(report, jobs=jobs))
    if out:
        write_bench_csv(f"{out}.csv", report, manifest)
        write_bench_summary(f"{out}.txt", report, manifest)
    lo, hi = report.ci95_lines
    print(f"policy: {policy.name}")
    print(f"games: {len(report.results)}  piece_cap: {cap}")
    print(f"mean_lines: {report.mean_lines:.3f}  median_lines: {report.median_lines:.3f}")
    print(f"std_lines: {report.std_lines:.3f}  ci95: [{lo:.3f}, {hi:.3f}]")
    print(f"min/max lines: {report.min_lines}/{report.max_lines}")
    print(f"mean_lines_per_piece: {report.mean_lines_per_piece:.6f}")
    print(f"placements_per_second: {report.placements_per_second:.0f}")
    if out:
        print(f"wrote: {out}.csv {out}.txt")
    return 0


def _cmd_train(args: argparse.Namespace) -> int:
    res = _Resolver(args)
    config = _game_config(res, "10x10")
    set_id = feature_set_from_name(str(res.get("set", "dellacherie")))
    games_value = res.get("games", None)
    cfg = CeConfig(
        population=int(res.get("pop", 100)),
        elite=int(res.get("elite", 10)),
        generations=int(res.get("generations", 50)),
        games_per_candidate=None if games_value is None else int(games_value),
        initial_std=float(res.get("std", 100.0)),
        noise_a=float(res.get("noise_a", 5.0)),
        noise_b=float(res.get("noise_b", 10.0)),
        seed=int(res.get("seed", 0)),
        piece_cap=int(res.get("cap", DEFAULT_PIECE_CAP)),
    )
    if res.resolved.get("games") is None:
        res.resolved["games"] = cfg.resolved_games(config)
    jobs = int(res.get("jobs", _default_jobs()))
    out = res.get("out", None)
    log_path = res.get("log", None)

    def progress(record) -> None:
        print(
            f"gen {record.generation:3d}  best {record.best_score:10.2f}  "
            f"elite_mean {record.elite_mean_score:10.2f}  "
            f"running_best {record.running_best:10.2f}"
        )

    policy, log = ce_train(cfg, config, set_id, jobs=jobs, progress=progress)
    print(f"best policy: {policy.name}  score {log.records[-1].running_best:.2f}")
    manifest = _manifest(
        "train", res, config, feature_set=set_id.value, policy=policy.name
    )
    if out:
        save_policy(policy, str(out), notes=f"cross-entropy, seed {cfg.seed}")
        print(f"wrote: {out}")
    if log_path:
        write_train_log(str(log_path), log, manifest)
        print(f"wrote: {log_path}")
    return 0


def _cmd_filter_stats(args: argparse.Namespace) -> int:
    res = _Resolver(args)
    config = _game_config(res, "10x10")
    policy = resolve_policy(str(res.get("policy", "dellacherie")), config)
    games = int(res.get("games", 6))
    seed = int(res.get("seed", 0))
    cap = int(res.get("cap", 2000))
    standardize = bool(res.get("standardize", False))
    out = res.get("out", None)

    report = filter_stats(
        policy,
        n_games=games,
        seed=seed,
        config=config,
        max_pieces_per_game=cap,
        standardize=standardize,
    )
    if out:
        write_filter_report(
            str(out),
            report,
            manifest_fields={
                "command": {"subcommand": "filter-stats", **res.resolved},
                "game": config.to_dict(),
                "policy": policy.name,
            },
        )
        print(f"wrote: {out}")
    print(f"decisions: {len(report.records)}")
    print(f"median_raw: {report.median_raw}")
    print(f"median_simple: {report.median_simple}")
    print(f"median_cumulative: {report.median_cumulative}")
    return 0


def _cmd_enumerate(args: argparse.Namespace) -> int:
    res = _Resolver(args)
    piece = piece_from_name(str(res.get("piece", "I")))
    board = load_board(str(res.get("board", "")))
    placements = legal_placements(board, piece)
    print("piece,rotation,column")
    for p in placements:
        print(f"{p.piece.value},{p.rotation},{p.column}")
    print(f"# total: {len(placements)}")
    return 0


def _cmd_features(args: argparse.Namespace) -> int:
    if args.action != "dump":
        raise ValueError(f"unknown features action {args.action!r}")
    res = _Resolver(args)
    set_id = feature_set_from_name(str(res.get("set", "dellacherie")))
    board = load_board(str(res.get("board", "")))
    move = str(res.get("move", "none"))
    if move == "none":
        outcome = MoveOutcome(
            post_board=board,
            lines_cleared=0,
            landing_height=0.0,
            eroded_cells=0,
            terminal=False,
        )
    else:
        try:
            piece_name, rot, col = move.split(":")
            placement_piece = piece_from_name(piece_name)
            rotation, column = int(rot), int(col)
        except ValueError:
            raise ValueError(
                f"--move must be 'none' or PIECE:ROTATION:COLUMN, got {move!r}"
            ) from None
        outcome = drop(board, Placement(placement_piece, rotation, column))
        if outcome.terminal:
            raise ValueError("--move overflows the board; no feature context exists")
    ctx = FeatureContext(pre=board, outcome=outcome)
    vector = extract(set_id, ctx)
    for name, value in zip(feature_names(set_id, board.width), vector):
        print(f"{name}={value}")
    return 0


# --- parser ------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(
        prog="tetrislab",
        description="Afterstate Tetris workbench: play, benchmark, train, analyze.",
    )
    parser.add_argument("--version", action="version", version=f"tetrislab {__version__}")
    sub = parser.add_subparsers(dest="subcommand", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("play", help="play one seeded episode")
    _add_common(p, "20x10")
    p.add_argument("--policy", help="built-in name or policy file (default dellacherie)")
    p.add_argument("--seed", type=int, help="episode seed (default 0)")
    p.add_argument("--cap", type=int, help=f"piece cap (default {DEFAULT_PIECE_CAP})")
    p.add_argument(
        "--two-piece",
        dest="two_piece",
        action="store_true",
        default=None,
        help="use next-piece lookahead (reference path, much slower)",
    )
    p.add_argument("--trace", help="write the move list CSV here")
    p.set_defaults(func=_cmd_play)

    p = sub.add_parser("bench", help="run seeded episodes and report statistics")
    _add_common(p, "10x10")
    p.add_argument("--policy", help="built-in name or policy file (default dellacherie)")
    p.add_argument("--games", type=int, help="number of episodes (default 30)")
    p.add_argument("--seed", type=int, help="master seed expanded to per-episode seeds")
    p.add_argument("--seeds", help="explicit comma-separated episode seeds")
    p.add_argument("--cap", type=int, help=f"piece cap (default {DEFAULT_PIECE_CAP})")
    p.add_argument("--jobs", type=int, help="worker threads (default $TETRISLAB_JOBS or 1)")
    p.add_argument("--out", help="write PREFIX.csv and PREFIX.txt")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("train", help="cross-entropy weight search")
    _add_common(p, "10x10")
    p.add_argument("--set", help="feature set (default dellacherie)")
    p.add_argument("--generations", type=int, help="generations (default 50)")
    p.add_argument("--pop", type=int, help="population per generation (default 100)")
    p.add_argument("--elite", type=int, help="elite count (default 10)")
    p.add_argument("--games", type=int, help="games per candidate (default: 1 small grid, 5 large)")
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--cap", type=int, help=f"training piece cap (default {DEFAULT_PIECE_CAP})")
    p.add_argument("--std", type=float, help="initial sampling std (default 100)")
    p.add_argument("--noise-a", dest="noise_a", type=float, help="noise a in max(a-t/b,0) (default 5)")
    p.add_argument("--noise-b", dest="noise_b", type=float, help="noise b in max(a-t/b,0) (default 10)")
    p.add_argument("--jobs", type=int, help="worker threads (default $TETRISLAB_JOBS or 1)")
    p.add_argument("--out", help="write the best policy file here")
    p.add_argument("--log", help="write the per-generation CSV here")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("filter-stats", help="dominance filter reduction experiment")
    _add_common(p, "10x10")
    p.add_argument("--policy", help="built-in name or policy file (default dellacherie)")
    p.add_argument("--games", type=int, help="games to play (default 6)")
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--cap", type=int, help="max pieces per game (default 2000)")
    p.add_argument(
        "--standardize",
        action="store_true",
        default=None,
        help="z-score features per decision before cumulative dominance",
    )
    p.add_argument("--out", help="write the per-decision CSV here")
    p.set_defaults(func=_cmd_filter_stats)

    p = sub.add_parser("enumerate", help="list legal placements of a piece on a board")
    p.add_argument("--config", help="JSON file supplying defaults for any flag")
    p.add_argument("--piece", help="piece letter I,O,T,S,Z,J,L (default I)")
    p.add_argument("--board", help="board file (ASCII, X=full .=empty)")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("features", help="dump feature values for a board")
    p.add_argument("action", choices=["dump"], help="what to do")
    p.add_argument("--config", help="JSON file supplying defaults for any flag")
    p.add_argument("--set", help="feature set name (default dellacherie)")
    p.add_argument("--board", help="board file (ASCII, X=full .=empty)")
    p.add_argument("--move", help="'none' or PIECE:ROTATION:COLUMN (default none)")
    p.set_defaults(func=_cmd_features)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 0
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"tetrislab: error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entry()
