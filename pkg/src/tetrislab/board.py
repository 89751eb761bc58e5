"""Board state, game configuration, and the ASCII board format.

A board is a stack of row bitmasks with row 0 at the floor; bit ``c`` of
``rows[y]`` is set when cell (column c, row y) is occupied.  Exposed boards
never contain a full row: line clears happen inside :func:`tetrislab.engine.drop`
before a state escapes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

FULL_CHAR = "X"
EMPTY_CHAR = "."

MAX_WIDTH = 30   # rows fit a uint32 bitmask in the fast kernels
MAX_HEIGHT = 62  # row-index sets fit a uint64 bitmask


class GameOverVariant(enum.Enum):
    """How an episode ends.

    OVERFLOW: a drop whose piece would exceed the top row is a terminal
    action (board unchanged, reward 0); the game lasts until such a move is
    taken.  SPAWN_BLOCKED: additionally, the episode ends as soon as the next
    piece's spawn cells (rotation 0, centered against the top rows) are
    occupied.  SPAWN_BLOCKED games are never longer than OVERFLOW games.
    """

    OVERFLOW = "overflow"
    SPAWN_BLOCKED = "spawn_blocked"


class PieceRule(enum.Enum):
    UNIFORM_IID = "uniform_iid"


DEFAULT_SCORING = (1.0, 2.0, 3.0, 4.0)


@dataclass(frozen=True)
class GameConfig:
    """Grid size, scoring table, and game-over semantics."""

    width: int = 10
    height: int = 20
    scoring: tuple[float, float, float, float] = DEFAULT_SCORING
    game_over_variant: GameOverVariant = GameOverVariant.OVERFLOW
    piece_rule: PieceRule = PieceRule.UNIFORM_IID

    def __post_init__(self) -> None:
        if not (4 <= self.width <= MAX_WIDTH):
            raise ValueError(f"width must be in [4, {MAX_WIDTH}], got {self.width}")
        if not (4 <= self.height <= MAX_HEIGHT):
            raise ValueError(f"height must be in [4, {MAX_HEIGHT}], got {self.height}")
        scoring = tuple(float(s) for s in self.scoring)
        if len(scoring) != 4:
            raise ValueError("scoring table must have exactly 4 entries (1..4 lines)")
        if any(s < 0 for s in scoring):
            raise ValueError("scoring table entries must be >= 0")
        object.__setattr__(self, "scoring", scoring)
        if not isinstance(self.game_over_variant, GameOverVariant):
            object.__setattr__(
                self, "game_over_variant", GameOverVariant(self.game_over_variant)
            )
        if not isinstance(self.piece_rule, PieceRule):
            object.__setattr__(self, "piece_rule", PieceRule(self.piece_rule))

    def reward_for(self, lines: int) -> float:
        return self.scoring[lines - 1] if lines > 0 else 0.0

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "scoring": list(self.scoring),
            "game_over_variant": self.game_over_variant.value,
            "piece_rule": self.piece_rule.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GameConfig":
        known = {"width", "height", "scoring", "game_over_variant", "piece_rule"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown game config keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "scoring" in kwargs:
            kwargs["scoring"] = tuple(kwargs["scoring"])
        return cls(**kwargs)


@dataclass(frozen=True)
class BoardState:
    """Immutable occupancy grid: ``rows[y]`` is the bitmask of row y (0 = floor)."""

    width: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if not (4 <= self.width <= MAX_WIDTH):
            raise ValueError(f"width must be in [4, {MAX_WIDTH}], got {self.width}")
        if not (4 <= len(self.rows) <= MAX_HEIGHT):
            raise ValueError(f"height must be in [4, {MAX_HEIGHT}], got {len(self.rows)}")
        full = (1 << self.width) - 1
        for y, row in enumerate(self.rows):
            if row < 0 or row > full:
                raise ValueError(f"row {y} mask {row:#x} out of range for width {self.width}")
            if row == full:
                raise ValueError(f"row {y} is full; exposed boards never contain full rows")

    @property
    def height(self) -> int:
        return len(self.rows)

    @cached_property
    def heights(self) -> tuple[int, ...]:
        """Per-column height: 1 + index of the topmost full cell, 0 if empty."""
        out = []
        for c in range(self.width):
            h = 0
            bit = 1 << c
            for y in range(len(self.rows) - 1, -1, -1):
                if self.rows[y] & bit:
                    h = y + 1
                    break
            out.append(h)
        return tuple(out)

    @classmethod
    def empty(cls, width: int, height: int) -> "BoardState":
        return cls(width=width, rows=(0,) * height)

    def cell(self, column: int, row: int) -> bool:
        return bool(self.rows[row] >> column & 1)

    def occupied_cells(self) -> int:
        return sum(row.bit_count() for row in self.rows)

    def with_rows(self, rows: tuple[int, ...]) -> "BoardState":
        return BoardState(width=self.width, rows=rows)


def parse_board(text: str, width: int | None = None, height: int | None = None) -> BoardState:
    """Parse the ASCII board format: ``height`` lines of 'X'/'.' with the top row first."""
    lines = [line for line in text.splitlines() if line.strip() != ""]
    if not lines:
        raise ValueError("empty board text")
    if height is not None and len(lines) != height:
        raise ValueError(f"expected {height} rows, got {len(lines)}")
    w = len(lines[0])
    if width is not None and w != width:
        raise ValueError(f"expected width {width}, got {w}")
    rows = []
    for i, line in enumerate(lines):
        if len(line) != w:
            raise ValueError(f"line {i + 1} has width {len(line)}, expected {w}")
        mask = 0
        for c, ch in enumerate(line):
            if ch == FULL_CHAR:
                mask |= 1 << c
            elif ch != EMPTY_CHAR:
                raise ValueError(f"illegal character {ch!r} on line {i + 1}")
        rows.append(mask)
    rows.reverse()  # text is top row first; rows[0] is the floor
    return BoardState(width=w, rows=tuple(rows))


def render_board(board: BoardState) -> str:
    lines = []
    for y in range(board.height - 1, -1, -1):
        row = board.rows[y]
        lines.append(
            "".join(FULL_CHAR if row >> c & 1 else EMPTY_CHAR for c in range(board.width))
        )
    return "\n".join(lines) + "\n"


def load_board(path: str, width: int | None = None, height: int | None = None) -> BoardState:
    with open(path, "r", encoding="ascii") as fh:
        return parse_board(fh.read(), width=width, height=height)
