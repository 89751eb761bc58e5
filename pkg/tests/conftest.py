"""Shared board generators for the test suite."""

from __future__ import annotations

import random

from tetrislab.board import BoardState

from oracle import Grid


def to_grid(board: BoardState) -> Grid:
    """Board as a plain list-of-lists grid, read cell by cell."""
    return [
        [board.cell(c, y) for c in range(board.width)]
        for y in range(board.height)
    ]


def random_board(rng: random.Random, width: int, height: int, max_fill: float = 0.7) -> BoardState:
    """Random board with no full rows, denser toward the bottom."""
    fill = rng.random() * max_fill
    rows = []
    for y in range(height):
        row = 0
        for c in range(width):
            if rng.random() < fill * (height - y) / height:
                row |= 1 << c
        rows.append(row)
    full = (1 << width) - 1
    rows = [r if r != full else r & ~(1 << rng.randrange(width)) for r in rows]
    return BoardState(width=width, rows=tuple(rows))


def random_boards(seed: int, count: int, dims=((10, 20), (8, 12), (6, 10), (13, 7))):
    """Deterministic stream of (board,) cases across several grid sizes."""
    rng = random.Random(seed)
    for _ in range(count):
        w, h = dims[rng.randrange(len(dims))]
        yield random_board(rng, w, h)
