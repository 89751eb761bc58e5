"""Brute-force reference implementations used only by the tests.

Everything here works on a plain list-of-lists grid (grid[y][c], row 0 at
the bottom) and scans cells one at a time.  No bit tricks, no cached
heights, no shared code with the package: drops are found by collision
descent instead of height profiles, rotations are generated by rotating
coordinates instead of reading stored tables.
"""

from __future__ import annotations

import math

Grid = list[list[bool]]
Cells = tuple[tuple[int, int], ...]


# --- grids -------------------------------------------------------------------


def empty_grid(width: int, height: int) -> Grid:
    return [[False] * width for _ in range(height)]


def copy_grid(grid: Grid) -> Grid:
    return [row[:] for row in grid]


def grid_text(grid: Grid) -> str:
    lines = []
    for y in range(len(grid) - 1, -1, -1):
        lines.append("".join("X" if cell else "." for cell in grid[y]))
    return "\n".join(lines) + "\n"


def column_heights(grid: Grid) -> list[int]:
    height = len(grid)
    width = len(grid[0])
    out = []
    for c in range(width):
        h = 0
        for y in range(height - 1, -1, -1):
            if grid[y][c]:
                h = y + 1
                break
        out.append(h)
    return out


# --- feature primitives --------------------------------------------------------


def holes(grid: Grid) -> int:
    heights = column_heights(grid)
    total = 0
    for c in range(len(grid[0])):
        for y in range(heights[c]):
            if not grid[y][c]:
                total += 1
    return total


def connected_holes(grid: Grid) -> int:
    heights = column_heights(grid)
    total = 0
    for c in range(len(grid[0])):
        in_run = False
        for y in range(heights[c]):
            if not grid[y][c]:
                if not in_run:
                    total += 1
                in_run = True
            else:
                in_run = False
    return total


def hole_depth(grid: Grid) -> int:
    heights = column_heights(grid)
    total = 0
    for c in range(len(grid[0])):
        for y in range(heights[c]):
            if not grid[y][c]:
                total += sum(1 for yy in range(y + 1, heights[c]) if grid[yy][c])
    return total


def rows_with_holes(grid: Grid) -> int:
    heights = column_heights(grid)
    rows = set()
    for c in range(len(grid[0])):
        for y in range(heights[c]):
            if not grid[y][c]:
                rows.add(y)
    return len(rows)


def row_transitions(grid: Grid) -> int:
    # both side walls count as full
    total = 0
    for row in grid:
        padded = [True] + list(row) + [True]
        total += sum(1 for a, b in zip(padded, padded[1:]) if a != b)
    return total


def column_transitions(grid: Grid) -> int:
    # the floor counts as full, the open top as empty
    total = 0
    for c in range(len(grid[0])):
        padded = [True] + [grid[y][c] for y in range(len(grid))] + [False]
        total += sum(1 for a, b in zip(padded, padded[1:]) if a != b)
    return total


def well_cells(grid: Grid) -> list[tuple[int, int]]:
    """(column, y) pairs: empty, flanked by full (walls full), open above."""
    height = len(grid)
    width = len(grid[0])
    out = []
    for c in range(width):
        for y in range(height):
            if grid[y][c]:
                continue
            left = grid[y][c - 1] if c > 0 else True
            right = grid[y][c + 1] if c < width - 1 else True
            if not (left and right):
                continue
            if any(grid[yy][c] for yy in range(y + 1, height)):
                continue
            out.append((c, y))
    return out


def well_runs(grid: Grid) -> list[int]:
    """Depths of maximal vertical runs of well cells, per column."""
    cells = set(well_cells(grid))
    runs = []
    for c in range(len(grid[0])):
        ys = sorted(y for (cc, y) in cells if cc == c)
        run = 0
        prev = None
        for y in ys:
            if prev is not None and y == prev + 1:
                run += 1
            else:
                if run:
                    runs.append(run)
                run = 1
            prev = y
        if run:
            runs.append(run)
    return runs


def cumulative_wells(grid: Grid) -> int:
    return sum(d * (d + 1) // 2 for d in well_runs(grid))


def max_well_depth(grid: Grid) -> int:
    runs = well_runs(grid)
    return max(runs) if runs else 0


def sum_well_depths(grid: Grid) -> int:
    return sum(well_runs(grid))


def pattern_diversity(grid: Grid) -> int:
    heights = column_heights(grid)
    deltas = set()
    for a, b in zip(heights, heights[1:]):
        d = a - b
        if abs(d) <= 2:
            deltas.add(d)
    return len(deltas)


def occupied_cells(grid: Grid) -> int:
    return sum(1 for row in grid for cell in row if cell)


def weighted_occupied_cells(grid: Grid) -> int:
    return sum(y + 1 for y, row in enumerate(grid) for cell in row if cell)


def rbf_heights(grid: Grid) -> list[float]:
    heights = column_heights(grid)
    c = sum(heights) / len(heights)
    h = len(grid)
    return [math.exp(-((c - i * h / 4.0) ** 2) / (2.0 * (h / 5.0) ** 2)) for i in range(5)]


# --- pieces ------------------------------------------------------------------

# spawn orientations, (x, y) offsets with y up; y=0 is the piece's bottom row
SPAWN_CELLS: dict[str, Cells] = {
    "I": ((0, 0), (1, 0), (2, 0), (3, 0)),
    "O": ((0, 0), (1, 0), (0, 1), (1, 1)),
    "T": ((0, 0), (1, 0), (2, 0), (1, 1)),
    "S": ((0, 0), (1, 0), (1, 1), (2, 1)),
    "Z": ((1, 0), (2, 0), (0, 1), (1, 1)),
    "J": ((0, 0), (1, 0), (2, 0), (0, 1)),
    "L": ((0, 0), (1, 0), (2, 0), (2, 1)),
}


def normalize(cells) -> Cells:
    cells = list(cells)
    min_x = min(x for x, _ in cells)
    min_y = min(y for _, y in cells)
    return tuple(sorted((x - min_x, y - min_y) for x, y in cells))


def rotate_cw(cells) -> Cells:
    return normalize((y, -x) for x, y in cells)


def distinct_rotations(name: str) -> list[Cells]:
    """Clockwise turns from spawn until the shape repeats."""
    first = normalize(SPAWN_CELLS[name])
    out = [first]
    current = first
    while True:
        current = rotate_cw(current)
        if current == first:
            break
        out.append(current)
    return out


def cells_width(cells: Cells) -> int:
    return max(x for x, _ in cells) + 1


def cells_height(cells: Cells) -> int:
    return max(y for _, y in cells) + 1


def count_placements(width: int, name: str) -> int:
    """Legal (rotation, column) pairs on any board of this width."""
    return sum(width - cells_width(r) + 1 for r in distinct_rotations(name))


# --- collision-descent drop ----------------------------------------------------


def oracle_drop(grid: Grid, cells: Cells, column: int):
    """Drop by descending until collision, clear lines by scanning.

    Returns (new_grid, lines, rest_y, eroded, terminal).  A terminal drop
    (any cell at or above the top) returns the grid unchanged.
    """
    height = len(grid)
    width = len(grid[0])
    assert 0 <= column and column + cells_width(cells) <= width

    def fits(y: int) -> bool:
        for dx, dy in cells:
            yy = y + dy
            if yy < 0:
                return False
            if yy < height and grid[yy][column + dx]:
                return False
        return True

    y = height
    assert fits(y)
    while fits(y - 1):
        y -= 1

    if any(y + dy >= height for _, dy in cells):
        return grid, 0, y, 0, True

    new_grid = copy_grid(grid)
    for dx, dy in cells:
        new_grid[y + dy][column + dx] = True

    full_rows = [yy for yy in range(height) if all(new_grid[yy])]
    lines = len(full_rows)
    piece_cells_in_cleared = sum(
        1 for dx, dy in cells if (y + dy) in full_rows
    )
    eroded = lines * piece_cells_in_cleared
    for yy in sorted(full_rows, reverse=True):
        del new_grid[yy]
    for _ in range(lines):
        new_grid.append([False] * width)
    return new_grid, lines, y, eroded, False


# --- splitmix64, straight from the published reference -------------------------


def splitmix64_next(state: int) -> tuple[int, int]:
    mask = (1 << 64) - 1
    state = (state + 0x9E3779B97F4A7C15) & mask
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
    z = z ^ (z >> 31)
    return state, z
