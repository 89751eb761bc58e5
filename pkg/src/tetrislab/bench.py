"""Seeded episode execution, parallel benchmarking, and statistics.

The default execution engine is the JIT kernel; ``engine="reference"``
replays the same episode through the pure-Python modules (one decision at a
time) and must produce an identical trajectory, a contract the test suite
enforces.  Thread workers run kernel episodes with the GIL released; results
land in seed-indexed slots, so every report field except wall-clock is
independent of the worker count.
"""

from __future__ import annotations

import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .artifacts import manifest_line, write_csv
from .board import GameConfig, GameOverVariant
from .engine import CyclePieceSource, expand_seeds, new_episode, step
from .pieces import PieceKind
from .policy import NEG_INF, LinearPolicy, select_action

DEFAULT_PIECE_CAP = 200_000
SZ_PIECE_CAP = 100_000


@dataclass(frozen=True)
class EpisodeResult:
    """One episode's tallies.  ``truncated`` means the piece cap stopped it."""

    seed: int
    reward: float
    lines: int
    pieces: int
    decisions: int
    terminal: bool
    truncated: bool
    millis: float
    evals: int

    def __post_init__(self) -> None:
        if self.lines > self.pieces * 4:
            raise ValueError("cleared lines exceed 4 per placed piece")
        if self.terminal == self.truncated:
            raise ValueError("an episode ends either terminal or truncated")


def _variant_flag(config: GameConfig) -> int:
    return 1 if config.game_over_variant is GameOverVariant.SPAWN_BLOCKED else 0


def _kernel_episode(
    policy: LinearPolicy,
    config: GameConfig,
    seed: int,
    piece_cap: int,
    piece_mode: int,
    record_trace: bool = False,
) -> tuple[EpisodeResult, np.ndarray | None]:
    start = time.perf_counter()
    out = kernels.play_episode_fast(
        width=config.width,
        height=config.height,
        variant=_variant_flag(config),
        piece_mode=piece_mode,
        seed=seed,
        cap=piece_cap,
        set_id=policy.feature_set,
        weights=policy.weights,
        scoring=config.scoring,
        record_trace=record_trace,
    )
    millis = (time.perf_counter() - start) * 1000.0
    result = EpisodeResult(
        seed=seed,
        reward=out["reward"],
        lines=out["lines"],
        pieces=out["pieces"],
        decisions=out["decisions"],
        terminal=out["terminal"],
        truncated=not out["terminal"],
        millis=millis,
        evals=out["evals"],
    )
    return result, out["trace"]


def play_episode(
    policy: LinearPolicy,
    config: GameConfig,
    seed: int,
    piece_cap: int = DEFAULT_PIECE_CAP,
) -> EpisodeResult:
    """One seeded episode from an empty board; deterministic in its arguments."""
    if piece_cap < 1:
        raise ValueError("piece_cap must be >= 1")
    policy.validate_for_width(config.width)
    result, _ = _kernel_episode(policy, config, seed, piece_cap, piece_mode=0)
    return result


def play_episode_with_trace(
    policy: LinearPolicy,
    config: GameConfig,
    seed: int,
    piece_cap: int = DEFAULT_PIECE_CAP,
) -> tuple[EpisodeResult, np.ndarray]:
    """Episode plus its move list: (piece, rotation, column, lines) per decision."""
    if piece_cap < 1:
        raise ValueError("piece_cap must be >= 1")
    policy.validate_for_width(config.width)
    result, trace = _kernel_episode(
        policy, config, seed, piece_cap, piece_mode=0, record_trace=True
    )
    return result, trace


def play_episode_reference(
    policy: LinearPolicy,
    config: GameConfig,
    seed: int,
    piece_cap: int = DEFAULT_PIECE_CAP,
    pieces_override=None,
) -> tuple[EpisodeResult, list[tuple[int, int, int, int]]]:
    """The same episode through the pure-Python modules, move by move.

    Exists to pin the kernels down: trajectories must match the kernel path
    exactly.  ``pieces_override`` swaps in a different piece source (the S/Z
    cycle); decisions stay greedy one-piece.
    """
    start = time.perf_counter()
    episode = new_episode(config, seed=seed, pieces=pieces_override)
    trace = []
    evals = 0
    terminal = False
    while not episode.finished and episode.pieces_placed < piece_cap:
        placement, dt = select_action(policy, episode.board, episode.current_piece)
        evals += sum(1 for s in dt.scores if s > NEG_INF)
        piece_index = episode.current_piece.index
        _, outcome = step(episode, placement)
        trace.append(
            (piece_index, placement.rotation, placement.column, outcome.lines_cleared)
        )
        if outcome.terminal:
            terminal = True
    if episode.finished and not terminal:
        terminal = True  # spawn-blocked end after a committed move
    millis = (time.perf_counter() - start) * 1000.0
    result = EpisodeResult(
        seed=seed,
        reward=episode.score,
        lines=episode.lines,
        pieces=episode.pieces_placed,
        decisions=len(trace),
        terminal=terminal,
        truncated=not terminal,
        millis=millis,
        evals=evals,
    )
    return result, trace


def adversarial_sz_episode(
    policy: LinearPolicy,
    config: GameConfig,
    piece_cap: int = SZ_PIECE_CAP,
) -> EpisodeResult:
    """Fixed S,Z,S,Z... piece sequence; every policy must reach terminal."""
    policy.validate_for_width(config.width)
    result, _ = _kernel_episode(policy, config, seed=0, piece_cap=piece_cap, piece_mode=1)
    return result


def adversarial_sz_episode_reference(
    policy: LinearPolicy, config: GameConfig, piece_cap: int = SZ_PIECE_CAP
) -> tuple[EpisodeResult, list[tuple[int, int, int, int]]]:
    source = CyclePieceSource((PieceKind.S, PieceKind.Z))
    return play_episode_reference(
        policy, config, seed=0, piece_cap=piece_cap, pieces_override=source
    )


# --- benchmark runs ----------------------------------------------------------


@dataclass(frozen=True)
class BenchReport:
    """Per-episode results plus the run's identity; statistics are derived."""

    policy_name: str
    config: GameConfig
    piece_cap: int
    master_seed: int | None  # None when an explicit seed list was given
    seeds: tuple[int, ...]
    results: tuple[EpisodeResult, ...]

    @property
    def lines_list(self) -> list[int]:
        return [r.lines for r in self.results]

    @property
    def mean_lines(self) -> float:
        return statistics.fmean(self.lines_list)

    @property
    def median_lines(self) -> float:
        return float(statistics.median(self.lines_list))

    @property
    def std_lines(self) -> float:
        if len(self.results) < 2:
            return 0.0
        return statistics.stdev(self.lines_list)

    @property
    def min_lines(self) -> int:
        return min(self.lines_list)

    @property
    def max_lines(self) -> int:
        return max(self.lines_list)

    @property
    def ci95_lines(self) -> tuple[float, float]:
        """Normal-approximation 95% interval for the mean of lines."""
        mean = self.mean_lines
        half = 1.96 * self.std_lines / math.sqrt(len(self.results))
        return (mean - half, mean + half)

    @property
    def mean_lines_per_piece(self) -> float:
        total_pieces = sum(r.pieces for r in self.results)
        if total_pieces == 0:
            return 0.0
        return sum(r.lines for r in self.results) / total_pieces

    @property
    def total_seconds(self) -> float:
        return sum(r.millis for r in self.results) / 1000.0

    @property
    def placements_per_second(self) -> float:
        secs = self.total_seconds
        if secs == 0.0:
            return 0.0
        return sum(r.pieces for r in self.results) / secs

    @property
    def evals_per_second(self) -> float:
        secs = self.total_seconds
        if secs == 0.0:
            return 0.0
        return sum(r.evals for r in self.results) / secs


def run_benchmark(
    policy: LinearPolicy,
    config: GameConfig,
    n_games: int | None = None,
    seed: int | None = None,
    seeds: list[int] | None = None,
    piece_cap: int = DEFAULT_PIECE_CAP,
    jobs: int = 1,
) -> BenchReport:
    """n independent episodes; report content is independent of ``jobs``.

    Seeds come either as an explicit list or expanded from ``seed``; the
    report records both forms for replay.
    """
    if seeds is None:
        if n_games is None or seed is None:
            raise ValueError("give either seeds=[...] or n_games plus seed")
        if n_games < 1:
            raise ValueError("n_games must be >= 1")
        seeds = expand_seeds(seed, n_games)
        master = seed
    else:
        seeds = list(seeds)
        if not seeds:
            raise ValueError("seed list must be non-empty")
        if n_games is not None and n_games != len(seeds):
            raise ValueError("n_games disagrees with the explicit seed list")
        master = None
    policy.validate_for_width(config.width)

    slots: list[EpisodeResult | None] = [None] * len(seeds)
    if jobs <= 1:
        for i, s in enumerate(seeds):
            slots[i] = play_episode(policy, config, s, piece_cap)
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {
                pool.submit(play_episode, policy, config, s, piece_cap): i
                for i, s in enumerate(seeds)
            }
            for future, i in futures.items():
                slots[i] = future.result()
    return BenchReport(
        policy_name=policy.name,
        config=config,
        piece_cap=piece_cap,
        master_seed=master,
        seeds=tuple(seeds),
        results=tuple(slots),  # type: ignore[arg-type]
    )


# --- artifacts ---------------------------------------------------------------


def bench_manifest_fields(report: BenchReport, jobs: int | None = None) -> dict:
    fields = {
        "policy": report.policy_name,
        "game": report.config.to_dict(),
        "piece_cap": report.piece_cap,
        "seeds": list(report.seeds),
        "master_seed": report.master_seed,
    }
    if jobs is not None:
        fields["jobs"] = jobs
    return fields


def write_bench_csv(path: str, report: BenchReport, manifest: dict) -> None:
    """Reproducible body rows plus wall-clock data as comment lines."""
    write_csv(
        path,
        manifest,
        header=("episode", "seed", "lines", "pieces", "reward", "truncated", "terminal"),
        rows=(
            (i, r.seed, r.lines, r.pieces, r.reward, int(r.truncated), int(r.terminal))
            for i, r in enumerate(report.results)
        ),
        trailer=(
            "millis: " + " ".join(f"{r.millis:.3f}" for r in report.results),
            f"placements_per_second: {report.placements_per_second:.0f}",
            f"evals_per_second: {report.evals_per_second:.0f}",
        ),
    )


def write_bench_summary(path: str, report: BenchReport, manifest: dict) -> None:
    lo, hi = report.ci95_lines
    lines = [
        manifest_line(manifest),
        f"policy: {report.policy_name}",
        f"grid: {report.config.height}x{report.config.width}",
        f"game_over_variant: {report.config.game_over_variant.value}",
        f"scoring: {list(report.config.scoring)}",
        f"games: {len(report.results)}",
        f"piece_cap: {report.piece_cap}",
        f"truncated_games: {sum(1 for r in report.results if r.truncated)}",
        f"mean_lines: {report.mean_lines:.3f}",
        f"median_lines: {report.median_lines:.3f}",
        f"std_lines: {report.std_lines:.3f}",
        f"min_lines: {report.min_lines}",
        f"max_lines: {report.max_lines}",
        f"ci95_lines: [{lo:.3f}, {hi:.3f}]",
        f"mean_lines_per_piece: {report.mean_lines_per_piece:.6f}",
        f"placements_per_second: {report.placements_per_second:.0f}",
        f"evals_per_second: {report.evals_per_second:.0f}",
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
