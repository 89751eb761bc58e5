"""Linear afterstate policies: evaluation, greedy selection, lookahead, files.

Scores are accumulated strictly left to right in float64 so the pure-Python
path and the JIT kernels produce bit-identical totals; ties are broken by
enumeration order (lowest rotation, then lowest column) with exact float
equality, no epsilon.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .artifacts import build_manifest
from .board import BoardState, GameConfig
from .engine import MoveOutcome, Placement, drop, legal_placements
from .features import (
    FeatureContext,
    FeatureSetId,
    dimension_for,
    extract,
    feature_set_from_name,
)
from .pieces import PieceKind

NEG_INF = float("-inf")


@dataclass(frozen=True)
class LinearPolicy:
    """A weight vector over one feature set's ordered components."""

    feature_set: FeatureSetId
    weights: tuple[float, ...]
    name: str = "unnamed"

    def __post_init__(self) -> None:
        weights = tuple(float(w) for w in self.weights)
        if not weights:
            raise ValueError("weights must be non-empty")
        if any(not math.isfinite(w) for w in weights):
            raise ValueError("weights must be finite")
        object.__setattr__(self, "weights", weights)
        if not isinstance(self.feature_set, FeatureSetId):
            object.__setattr__(
                self, "feature_set", feature_set_from_name(self.feature_set)
            )

    def validate_for_width(self, width: int) -> None:
        expected = dimension_for(self.feature_set, width)
        if len(self.weights) != expected:
            raise ValueError(
                f"policy {self.name!r} has {len(self.weights)} weights; "
                f"feature set {self.feature_set.value!r} at width {width} "
                f"needs {expected}"
            )

    def scaled(self, k: float) -> "LinearPolicy":
        return replace(self, weights=tuple(k * w for w in self.weights))


def dellacherie_policy() -> LinearPolicy:
    """The hand-tuned six-feature controller.

    Score = -4*holes - landing_height - row_transitions - column_transitions
    - cumulative_wells + eroded_cells.
    """
    return LinearPolicy(
        feature_set=FeatureSetId.DELLACHERIE,
        weights=(-4.0, -1.0, -1.0, -1.0, -1.0, 1.0),
        name="dellacherie",
    )


def zero_policy(feature_set: FeatureSetId, width: int, name: str = "zero") -> LinearPolicy:
    return LinearPolicy(
        feature_set=feature_set,
        weights=(0.0,) * dimension_for(feature_set, width),
        name=name,
    )


def evaluate(policy: LinearPolicy, ctx: FeatureContext) -> float:
    """weights . extract(set, ctx), summed left to right in float64."""
    policy.validate_for_width(ctx.pre.width)
    values = extract(policy.feature_set, ctx)
    total = 0.0
    for w, v in zip(policy.weights, values):
        total += w * v
    return total


@dataclass(frozen=True)
class DecisionTrace:
    """All candidates of one decision, for audits and dominance experiments."""

    placements: tuple[Placement, ...]
    outcomes: tuple[MoveOutcome, ...]
    vectors: np.ndarray  # candidates x dimension; rows of terminal moves are 0
    scores: tuple[float, ...]  # -inf for terminal moves
    chosen: int

    def chosen_placement(self) -> Placement:
        return self.placements[self.chosen]


def _score_candidates(
    policy: LinearPolicy, board: BoardState, piece: PieceKind
) -> tuple[list[Placement], list[MoveOutcome], np.ndarray, list[float]]:
    placements = legal_placements(board, piece)
    dim = len(policy.weights)
    vectors = np.zeros((len(placements), dim), dtype=np.float64)
    outcomes = []
    scores = []
    for i, placement in enumerate(placements):
        outcome = drop(board, placement)
        outcomes.append(outcome)
        if outcome.terminal:
            scores.append(NEG_INF)
            continue
        ctx = FeatureContext(pre=board, outcome=outcome)
        vectors[i] = extract(policy.feature_set, ctx)
        total = 0.0
        for w, v in zip(policy.weights, vectors[i]):
            total += w * v
        scores.append(total)
    return placements, outcomes, vectors, scores


def select_action(
    policy: LinearPolicy, board: BoardState, piece: PieceKind
) -> tuple[Placement, DecisionTrace]:
    """Greedy argmax over all placements of the falling piece.

    Terminal (overflow) placements score -inf, so they are chosen only when
    every candidate is terminal; the episode loop stays total either way.
    """
    policy.validate_for_width(board.width)
    placements, outcomes, vectors, scores = _score_candidates(policy, board, piece)
    chosen = 0
    for i in range(1, len(scores)):
        if scores[i] > scores[chosen]:
            chosen = i
    trace = DecisionTrace(
        placements=tuple(placements),
        outcomes=tuple(outcomes),
        vectors=vectors,
        scores=tuple(scores),
        chosen=chosen,
    )
    return placements[chosen], trace


def select_action_two_piece(
    policy: LinearPolicy,
    board: BoardState,
    piece: PieceKind,
    next_piece: PieceKind,
    include_first_eval: bool = False,
) -> Placement:
    """Argmax over first placements of the best second-afterstate evaluation.

    Pure lookahead by default: the first move's own evaluation is ignored
    unless ``include_first_eval`` adds it.  Terminal first moves score -inf;
    a first move whose every continuation is terminal also scores -inf.
    """
    policy.validate_for_width(board.width)
    placements = legal_placements(board, piece)
    best_i = 0
    best_score = NEG_INF
    for i, placement in enumerate(placements):
        outcome = drop(board, placement)
        if outcome.terminal:
            continue
        inner_best = NEG_INF
        for second in legal_placements(outcome.post_board, next_piece):
            second_outcome = drop(outcome.post_board, second)
            if second_outcome.terminal:
                continue
            ctx = FeatureContext(pre=outcome.post_board, outcome=second_outcome)
            inner_best = max(inner_best, evaluate(policy, ctx))
        if inner_best == NEG_INF:
            continue
        score = inner_best
        if include_first_eval:
            ctx = FeatureContext(pre=board, outcome=outcome)
            score += evaluate(policy, ctx)
        if score > best_score:
            best_score = score
            best_i = i
    return placements[best_i]


# --- policy files and built-ins --------------------------------------------


def builtin_policy(name: str, config: GameConfig | None = None) -> LinearPolicy:
    """Policies addressable by bare name from the CLI."""
    width = config.width if config else 10
    if name == "dellacherie":
        return dellacherie_policy()
    if name == "zero":
        return zero_policy(FeatureSetId.DELLACHERIE, width)
    raise KeyError(f"unknown built-in policy {name!r} (built-ins: dellacherie, zero)")


def save_policy(policy: LinearPolicy, path: str, notes: str = "") -> None:
    manifest = build_manifest("policy", name=policy.name)
    doc = {
        "name": policy.name,
        "feature_set": policy.feature_set.value,
        "weights": list(policy.weights),
        "created": manifest["created"],
        "notes": notes,
        "manifest": manifest,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_policy(path: str) -> LinearPolicy:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        return LinearPolicy(
            feature_set=feature_set_from_name(doc["feature_set"]),
            weights=tuple(float(w) for w in doc["weights"]),
            name=str(doc.get("name", "unnamed")),
        )
    except KeyError as exc:
        raise ValueError(f"{path}: policy file missing field {exc}") from None


def resolve_policy(ref: str, config: GameConfig | None = None) -> LinearPolicy:
    """A policy reference is a built-in name or a path to a policy file."""
    try:
        return builtin_policy(ref, config)
    except KeyError:
        pass
    try:
        return load_policy(ref)
    except FileNotFoundError:
        raise ValueError(
            f"policy {ref!r} is neither a built-in name nor a readable file"
        ) from None


def random_policies(
    feature_set: FeatureSetId,
    width: int,
    count: int,
    seed: int,
) -> list[LinearPolicy]:
    """Unit-Gaussian weight vectors, for baselines and smoke comparisons."""
    rng = np.random.default_rng(seed)
    dim = dimension_for(feature_set, width)
    return [
        LinearPolicy(
            feature_set=feature_set,
            weights=tuple(rng.standard_normal(dim)),
            name=f"random_{i}",
        )
        for i in range(count)
    ]
