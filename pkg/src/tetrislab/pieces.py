"""The seven Tetriminos and their placement geometry.

Cells are (dx, dy) offsets with dx growing rightward and dy growing upward
(row 0 is the floor), normalized so min dx = min dy = 0.  Rotation index 0 is
the flat spawn orientation; further indices are successive clockwise turns
with duplicate shapes pruned, which leaves 2 rotations for I, S and Z, 1 for
O, and 4 for T, J and L.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

Cell = tuple[int, int]


class PieceKind(enum.Enum):
    I = "I"
    O = "O"
    T = "T"
    S = "S"
    Z = "Z"
    J = "J"
    L = "L"

    @property
    def index(self) -> int:
        return _PIECE_ORDER.index(self)

    @property
    def rotations(self) -> tuple["RotationProfile", ...]:
        return rotation_profiles(self)

    def __repr__(self) -> str:  # keeps traces compact
        return f"PieceKind.{self.name}"


_PIECE_ORDER = (
    PieceKind.I,
    PieceKind.O,
    PieceKind.T,
    PieceKind.S,
    PieceKind.Z,
    PieceKind.J,
    PieceKind.L,
)

PIECE_BY_INDEX: tuple[PieceKind, ...] = _PIECE_ORDER
PIECE_BY_NAME = {p.value: p for p in _PIECE_ORDER}

ROTATION_CELLS: dict[PieceKind, tuple[tuple[Cell, ...], ...]] = {
    PieceKind.I: (
        ((0, 0), (1, 0), (2, 0), (3, 0)),
        ((0, 0), (0, 1), (0, 2), (0, 3)),
    ),
    PieceKind.O: (((0, 0), (1, 0), (0, 1), (1, 1)),),
    PieceKind.T: (
        ((0, 0), (1, 0), (2, 0), (1, 1)),
        ((0, 0), (0, 1), (0, 2), (1, 1)),
        ((1, 0), (0, 1), (1, 1), (2, 1)),
        ((1, 0), (0, 1), (1, 1), (1, 2)),
    ),
    PieceKind.S: (
        ((0, 0), (1, 0), (1, 1), (2, 1)),
        ((1, 0), (0, 1), (1, 1), (0, 2)),
    ),
    PieceKind.Z: (
        ((1, 0), (2, 0), (0, 1), (1, 1)),
        ((0, 0), (0, 1), (1, 1), (1, 2)),
    ),
    PieceKind.J: (
        ((0, 0), (1, 0), (2, 0), (0, 1)),
        ((0, 0), (0, 1), (0, 2), (1, 2)),
        ((2, 0), (0, 1), (1, 1), (2, 1)),
        ((0, 0), (1, 0), (1, 1), (1, 2)),
    ),
    PieceKind.L: (
        ((0, 0), (1, 0), (2, 0), (2, 1)),
        ((0, 0), (1, 0), (0, 1), (0, 2)),
        ((0, 0), (0, 1), (1, 1), (2, 1)),
        ((0, 2), (1, 0), (1, 1), (1, 2)),
    ),
}

ROTATION_COUNTS = {kind: len(rots) for kind, rots in ROTATION_CELLS.items()}


@dataclass(frozen=True)
class RotationProfile:
    """Pre-computed geometry for one rotation of one piece.

    ``bottom`` and ``top`` hold, per relative column, the lowest and highest
    dy occupied in that column; ``row_masks`` holds, per relative row, the
    bitmask of occupied dx positions; ``row_cell_counts`` the cell count per
    relative row.
    """

    piece: PieceKind
    rotation: int
    cells: tuple[Cell, ...]
    width: int
    height: int
    bottom: tuple[int, ...]
    top: tuple[int, ...]
    row_masks: tuple[int, ...]
    row_cell_counts: tuple[int, ...]


@lru_cache(maxsize=None)
def rotation_profiles(piece: PieceKind) -> tuple[RotationProfile, ...]:
    profiles = []
    for r, cells in enumerate(ROTATION_CELLS[piece]):
        width = max(dx for dx, _ in cells) + 1
        height = max(dy for _, dy in cells) + 1
        bottom = tuple(
            min(dy for dx, dy in cells if dx == col) for col in range(width)
        )
        top = tuple(
            max(dy for dx, dy in cells if dx == col) for col in range(width)
        )
        row_masks = tuple(
            sum(1 << dx for dx, dy in cells if dy == row) for row in range(height)
        )
        row_counts = tuple(
            sum(1 for _, dy in cells if dy == row) for row in range(height)
        )
        profiles.append(
            RotationProfile(
                piece=piece,
                rotation=r,
                cells=cells,
                width=width,
                height=height,
                bottom=bottom,
                top=top,
                row_masks=row_masks,
                row_cell_counts=row_counts,
            )
        )
    return tuple(profiles)


def piece_from_name(name: str) -> PieceKind:
    try:
        return PIECE_BY_NAME[name.upper()]
    except KeyError:
        raise ValueError(f"unknown piece {name!r}; expected one of I,O,T,S,Z,J,L") from None
