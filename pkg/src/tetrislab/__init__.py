"""Afterstate Tetris workbench.

A linear policy scores every legal (rotation, column) placement of the
current piece by a weighted sum of board features; the engine commits the
argmax and draws the next piece i.i.d.  On top of that sit benchmarking,
cross-entropy weight search, and dominance-filter analysis, with a numba
fast path that reproduces the pure-python reference bit for bit.
"""

from ._version import __version__
from .bench import (
    BenchReport,
    EpisodeResult,
    adversarial_sz_episode,
    play_episode,
    play_episode_with_trace,
    run_benchmark,
)
from .board import (
    BoardState,
    GameConfig,
    GameOverVariant,
    PieceRule,
    load_board,
    parse_board,
    render_board,
)
from .dominance import (
    DecisionRecord,
    FilterReport,
    cumulative_dominance_filter,
    filter_stats,
    importance_from_weights,
    orientation_from_weights,
    simple_dominance_filter,
)
from .engine import (
    EpisodeState,
    IidPieceSource,
    MoveOutcome,
    Placement,
    drop,
    expand_seeds,
    legal_placements,
    new_episode,
    splitmix64,
    step,
)
from .features import (
    FeatureContext,
    FeatureSetId,
    dimension_for,
    extract,
    feature_names,
    feature_set_from_name,
    grid_features,
)
from .optimize import CeConfig, TrainLog, ce_train, evaluate_candidate
from .pieces import PieceKind, rotation_profiles
from .policy import (
    DecisionTrace,
    LinearPolicy,
    dellacherie_policy,
    evaluate,
    load_policy,
    resolve_policy,
    save_policy,
    select_action,
    select_action_two_piece,
    zero_policy,
)

__all__ = [
    "__version__",
    "BenchReport",
    "EpisodeResult",
    "adversarial_sz_episode",
    "play_episode",
    "play_episode_with_trace",
    "run_benchmark",
    "BoardState",
    "GameConfig",
    "GameOverVariant",
    "PieceRule",
    "load_board",
    "parse_board",
    "render_board",
    "DecisionRecord",
    "FilterReport",
    "cumulative_dominance_filter",
    "filter_stats",
    "importance_from_weights",
    "orientation_from_weights",
    "simple_dominance_filter",
    "EpisodeState",
    "IidPieceSource",
    "MoveOutcome",
    "Placement",
    "drop",
    "expand_seeds",
    "legal_placements",
    "new_episode",
    "splitmix64",
    "step",
    "FeatureContext",
    "FeatureSetId",
    "dimension_for",
    "extract",
    "feature_names",
    "feature_set_from_name",
    "grid_features",
    "CeConfig",
    "TrainLog",
    "ce_train",
    "evaluate_candidate",
    "PieceKind",
    "rotation_profiles",
    "DecisionTrace",
    "LinearPolicy",
    "dellacherie_policy",
    "evaluate",
    "load_policy",
    "resolve_policy",
    "save_policy",
    "select_action",
    "select_action_two_piece",
    "zero_policy",
]
