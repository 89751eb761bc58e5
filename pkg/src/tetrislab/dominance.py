"""Action elimination by dominance over oriented feature vectors.

Orientation flips every feature so that higher is better (+1 keeps a feature,
-1 negates it).  Simple dominance removes a candidate when another is at
least as good in every oriented feature and strictly better in one.
Cumulative dominance applies the same test to prefix sums of the oriented
features taken in importance order, which eliminates more aggressively:
anything simply dominated is also cumulatively dominated, so the survivor
sets nest.  Exact duplicates keep only the first in input order under both
filters.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass

import numpy as np

from .artifacts import build_manifest, write_csv
from .board import GameConfig
from .engine import expand_seeds, new_episode, step
from .policy import NEG_INF, LinearPolicy, select_action


def orientation_from_weights(weights) -> np.ndarray:
    """+1 where the weight is >= 0 (higher is better), else -1."""
    w = np.asarray(weights, dtype=np.float64)
    return np.where(w >= 0.0, 1.0, -1.0)


def importance_from_weights(weights) -> np.ndarray:
    """Feature indices by descending |weight|; equal magnitudes keep index order."""
    w = np.asarray(weights, dtype=np.float64)
    return np.argsort(-np.abs(w), kind="stable")


def _check_orientation(vectors: np.ndarray, orientation) -> np.ndarray:
    orientation = np.asarray(orientation, dtype=np.float64)
    if orientation.shape != (vectors.shape[1],):
        raise ValueError(
            f"orientation has shape {orientation.shape}, expected ({vectors.shape[1]},)"
        )
    if not np.all(np.abs(orientation) == 1.0):
        raise ValueError("orientation entries must be +1 or -1")
    return orientation


def _pareto_survivors(oriented: np.ndarray) -> list[int]:
    """Indices not dominated and not duplicating an earlier row."""
    n = oriented.shape[0]
    survivors = []
    for i in range(n):
        vi = oriented[i]
        keep = True
        for j in range(n):
            if j == i:
                continue
            vj = oriented[j]
            if np.all(vj >= vi) and np.any(vj > vi):
                keep = False
                break
            if j < i and np.array_equal(vj, vi):
                keep = False
                break
        if keep:
            survivors.append(i)
    return survivors


def simple_dominance_filter(vectors, orientation) -> list[int]:
    """Surviving row indices of an (n, d) candidate matrix."""
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[0] == 0:
        raise ValueError("need a non-empty (candidates, features) matrix")
    orientation = _check_orientation(vectors, orientation)
    return _pareto_survivors(vectors * orientation)


def cumulative_dominance_filter(
    vectors, orientation, importance, standardize: bool = False
) -> list[int]:
    """Surviving row indices under prefix-sum dominance in importance order.

    ``standardize`` z-scores each feature across this decision's candidates
    first (zero-variance features stay 0); feature scales differ wildly, so
    raw prefix sums let large-magnitude features drown out later ones.
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[0] == 0:
        raise ValueError("need a non-empty (candidates, features) matrix")
    orientation = _check_orientation(vectors, orientation)
    importance = np.asarray(importance)
    if sorted(importance.tolist()) != list(range(vectors.shape[1])):
        raise ValueError(f"importance {importance.tolist()} is not a permutation")
    oriented = vectors * orientation
    if standardize:
        mean = oriented.mean(axis=0)
        std = oriented.std(axis=0)
        std[std == 0.0] = 1.0
        oriented = (oriented - mean) / std
    prefixes = np.cumsum(oriented[:, importance], axis=1)
    return _pareto_survivors(prefixes)


# --- the placement-reduction experiment -------------------------------------


@dataclass(frozen=True)
class DecisionRecord:
    game: int
    decision: int
    piece: str
    raw: int
    simple: int
    cumulative: int


@dataclass(frozen=True)
class FilterReport:
    records: tuple[DecisionRecord, ...]
    median_raw: float
    median_simple: float
    median_cumulative: float


def filter_stats(
    policy: LinearPolicy,
    n_games: int,
    seed: int,
    config: GameConfig,
    max_pieces_per_game: int = 2000,
    standardize: bool = False,
) -> FilterReport:
    """Play games with the policy and measure both filters at every decision.

    Raw counts every legal placement; the filters run on the non-terminal
    candidates (orientation and importance come from the policy weights).
    A decision whose candidates are all terminal is a forced move: one
    survivor under both filters.
    """
    if n_games < 1:
        raise ValueError("n_games must be >= 1")
    policy.validate_for_width(config.width)
    orientation = orientation_from_weights(policy.weights)
    importance = importance_from_weights(policy.weights)

    records = []
    episode_seeds = expand_seeds(seed, n_games)
    for game in range(n_games):
        episode = new_episode(config, seed=episode_seeds[game])
        decision = 0
        while not episode.finished and episode.pieces_placed < max_pieces_per_game:
            placement, trace = select_action(policy, episode.board, episode.current_piece)
            live = [i for i, s in enumerate(trace.scores) if s > NEG_INF]
            if live:
                live_vectors = trace.vectors[live]
                n_simple = len(simple_dominance_filter(live_vectors, orientation))
                n_cumulative = len(
                    cumulative_dominance_filter(
                        live_vectors, orientation, importance, standardize=standardize
                    )
                )
            else:
                n_simple = n_cumulative = 1  # forced losing move
            records.append(
                DecisionRecord(
                    game=game,
                    decision=decision,
                    piece=episode.current_piece.value,
                    raw=len(trace.placements),
                    simple=n_simple,
                    cumulative=n_cumulative,
                )
            )
            decision += 1
            step(episode, placement)
    return FilterReport(
        records=tuple(records),
        median_raw=statistics.median(r.raw for r in records),
        median_simple=statistics.median(r.simple for r in records),
        median_cumulative=statistics.median(r.cumulative for r in records),
    )


def write_filter_report(
    path: str, report: FilterReport, manifest_fields: dict | None = None
) -> None:
    manifest = build_manifest("filter-stats", **(manifest_fields or {}))
    write_csv(
        path,
        manifest,
        header=("game", "decision", "piece", "raw", "simple", "cumulative"),
        rows=(
            (r.game, r.decision, r.piece, r.raw, r.simple, r.cumulative)
            for r in report.records
        ),
        trailer=(
            f"median_raw: {report.median_raw}",
            f"median_simple: {report.median_simple}",
            f"median_cumulative: {report.median_cumulative}",
        ),
    )
