"""Afterstate engine: placement enumeration, gravity drop, line clears, episodes.

This is the readable reference implementation; :mod:`tetrislab.kernels` holds
the JIT-compiled episode loops used by the benchmark and trainer.  Both paths
implement identical semantics and are equivalence-tested move for move.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Protocol

from .board import BoardState, GameConfig, GameOverVariant
from .pieces import PIECE_BY_INDEX, PieceKind, RotationProfile, rotation_profiles

MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class Placement:
    """A (rotation, column) action for a given piece.

    ``column`` is the board column of the rotated piece's leftmost cells.
    """

    piece: PieceKind
    rotation: int
    column: int


@dataclass(frozen=True)
class MoveOutcome:
    """The resolved consequence of committing a placement.

    ``landing_height`` is the vertical center of the piece before clearing
    (a half-integer, 0 for a flat piece on the floor).  ``eroded_cells`` is
    lines_cleared times the number of piece cells lying inside the cleared
    lines.  A terminal move leaves the board unchanged.
    """

    post_board: BoardState
    lines_cleared: int
    landing_height: float
    eroded_cells: int
    terminal: bool


def legal_placements(board: BoardState, piece: PieceKind) -> list[Placement]:
    """Every (rotation, column) pair fitting horizontally, in lexicographic order.

    Placements whose drop would overflow the top are included; they resolve
    as terminal moves.
    """
    out = []
    for profile in rotation_profiles(piece):
        for col in range(board.width - profile.width + 1):
            out.append(Placement(piece=piece, rotation=profile.rotation, column=col))
    return out


def _profile_for(placement: Placement) -> RotationProfile:
    profiles = rotation_profiles(placement.piece)
    if not (0 <= placement.rotation < len(profiles)):
        raise ValueError(
            f"piece {placement.piece.value} has {len(profiles)} rotations, "
            f"got rotation {placement.rotation}"
        )
    return profiles[placement.rotation]


def drop(board: BoardState, placement: Placement) -> MoveOutcome:
    """Drop the piece straight down from above and clear any full rows."""
    profile = _profile_for(placement)
    col = placement.column
    if col < 0 or col + profile.width > board.width:
        raise ValueError(
            f"placement column {col} does not fit: piece width {profile.width}, "
            f"board width {board.width}"
        )
    heights = board.heights
    rest = max(heights[col + j] - profile.bottom[j] for j in range(profile.width))
    landing = rest + (profile.height - 1) / 2.0

    if rest + profile.height > board.height:
        return MoveOutcome(
            post_board=board,
            lines_cleared=0,
            landing_height=landing,
            eroded_cells=0,
            terminal=True,
        )

    rows = list(board.rows)
    for r, mask in enumerate(profile.row_masks):
        rows[rest + r] |= mask << col

    full = (1 << board.width) - 1
    cleared_rows = [y for y in range(rest, rest + profile.height) if rows[y] == full]
    lines = len(cleared_rows)
    piece_cells_in_cleared = sum(
        profile.row_cell_counts[y - rest] for y in cleared_rows
    )
    if lines:
        kept = [rows[y] for y in range(board.height) if rows[y] != full]
        rows = kept + [0] * lines

    return MoveOutcome(
        post_board=board.with_rows(tuple(rows)),
        lines_cleared=lines,
        landing_height=landing,
        eroded_cells=lines * piece_cells_in_cleared,
        terminal=False,
    )


# --- piece streams ---------------------------------------------------------


def splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns (new_state, output).

    Used for the piece stream so the Python engine and the JIT kernels draw
    bit-identical sequences from the same seed.
    """
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    z = z ^ (z >> 31)
    return state, z


def expand_seeds(master_seed: int, count: int) -> list[int]:
    """Per-episode seeds from a master seed, one splitmix64 output each.

    The shared expansion scheme for bench, training, and filter experiments:
    recording (master, count) is enough to replay any episode.
    """
    state = master_seed & MASK64
    out = []
    for _ in range(count):
        state, z = splitmix64(state)
        out.append(z)
    return out


class PieceSource(Protocol):
    def next_piece(self) -> PieceKind: ...


class IidPieceSource:
    """Uniform i.i.d. pieces from a seeded splitmix64 stream (memoryless, no bag)."""

    def __init__(self, seed: int) -> None:
        self.state = seed & MASK64

    def next_piece(self) -> PieceKind:
        self.state, z = splitmix64(self.state)
        return PIECE_BY_INDEX[z % 7]


class CyclePieceSource:
    """Fixed repeating piece sequence, e.g. the adversarial S,Z,S,Z... stream."""

    def __init__(self, kinds: Iterable[PieceKind]) -> None:
        self.kinds = tuple(kinds)
        if not self.kinds:
            raise ValueError("cycle needs at least one piece kind")
        self.position = 0

    def next_piece(self) -> PieceKind:
        piece = self.kinds[self.position % len(self.kinds)]
        self.position += 1
        return piece


def spawn_cells(piece: PieceKind, config: GameConfig) -> list[tuple[int, int]]:
    """Spawn footprint for the SPAWN_BLOCKED variant.

    Rotation 0, horizontally centered at (width - bbox_width) // 2, with the
    bounding box top-aligned against the top row.
    """
    profile = rotation_profiles(piece)[0]
    col = (config.width - profile.width) // 2
    base_row = config.height - profile.height
    return [(col + dx, base_row + dy) for dx, dy in profile.cells]


def spawn_blocked(board: BoardState, piece: PieceKind, config: GameConfig) -> bool:
    return any(board.cell(c, y) for c, y in spawn_cells(piece, config))


# --- episodes --------------------------------------------------------------


@dataclass
class EpisodeState:
    """Single-owner mutable episode: board, falling piece, stream, and tallies."""

    config: GameConfig
    board: BoardState
    current_piece: PieceKind
    pieces: PieceSource
    score: float = 0.0
    lines: int = 0
    pieces_placed: int = 0
    finished: bool = False


def new_episode(
    config: GameConfig,
    seed: int | None = None,
    pieces: PieceSource | None = None,
    board: BoardState | None = None,
) -> EpisodeState:
    """Start an episode; the first falling piece is drawn from the stream."""
    if pieces is None:
        if seed is None:
            raise ValueError("provide a seed or an explicit piece source")
        pieces = IidPieceSource(seed)
    if board is None:
        board = BoardState.empty(config.width, config.height)
    episode = EpisodeState(
        config=config,
        board=board,
        current_piece=pieces.next_piece(),
        pieces=pieces,
    )
    if config.game_over_variant is GameOverVariant.SPAWN_BLOCKED and spawn_blocked(
        board, episode.current_piece, config
    ):
        episode.finished = True
    return episode


def step(episode: EpisodeState, placement: Placement) -> tuple[float, MoveOutcome]:
    """Commit a placement, collect the reward, and draw the next piece.

    A terminal (overflow) move finishes the episode with reward 0 and leaves
    the board unchanged.  Stepping a finished episode is rejected.
    """
    if episode.finished:
        raise ValueError("episode is finished")
    if placement.piece is not episode.current_piece:
        raise ValueError(
            f"placement is for {placement.piece.value}, "
            f"falling piece is {episode.current_piece.value}"
        )
    outcome = drop(episode.board, placement)
    if outcome.terminal:
        episode.finished = True
        return 0.0, outcome

    reward = episode.config.reward_for(outcome.lines_cleared)
    episode.board = outcome.post_board
    episode.score += reward
    episode.lines += outcome.lines_cleared
    episode.pieces_placed += 1
    episode.current_piece = episode.pieces.next_piece()
    if episode.config.game_over_variant is GameOverVariant.SPAWN_BLOCKED and spawn_blocked(
        episode.board, episode.current_piece, episode.config
    ):
        episode.finished = True
    return reward, outcome
