"""Feature primitives and the seven named feature sets.

Boundary conventions (used consistently everywhere, including the golden
fixtures and the JIT kernels):

* row transitions: the side walls count as full, so an empty row has 2
  transitions and an empty 20x10 board has 40;
* column transitions: the floor counts as full and the space above the top
  row counts as empty, so an empty column has 1 transition;
* wells: the side walls count as full.  A well cell is an empty cell with
  full left and right neighbors and nothing above it in its own column.

A hole is an empty cell with at least one full cell strictly above it in the
same column.  Grid features of a move are computed on the post-clear board;
the Lagoudakis deltas are post minus pre, both post-clear.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .board import BoardState
from .engine import MoveOutcome

RBF_COUNT = 5


class FeatureSetId(str, enum.Enum):
    BERTSEKAS = "bertsekas"
    LAGOUDAKIS = "lagoudakis"
    DELLACHERIE = "dellacherie"
    BOHM = "bohm"
    BCTS = "bcts"
    DT = "dt"
    RBF = "rbf"


def feature_set_from_name(name: str) -> FeatureSetId:
    try:
        return FeatureSetId(name.strip().lower())
    except ValueError:
        known = ", ".join(s.value for s in FeatureSetId)
        raise ValueError(f"unknown feature set {name!r} (known: {known})") from None


def dimension_for(set_id: FeatureSetId, width: int) -> int:
    if set_id is FeatureSetId.BERTSEKAS:
        return 2 * width + 1
    return {
        FeatureSetId.LAGOUDAKIS: 9,
        FeatureSetId.DELLACHERIE: 6,
        FeatureSetId.BOHM: 11,
        FeatureSetId.BCTS: 8,
        FeatureSetId.DT: 9,
        FeatureSetId.RBF: 5,
    }[set_id]


@dataclass(frozen=True)
class GridFeatures:
    """Every board-only primitive, computed in one pass over the bit rows."""

    width: int
    height: int
    column_heights: tuple[int, ...]
    height_diffs: tuple[int, ...]  # |h[c+1] - h[c]|, width - 1 entries
    sum_abs_height_diffs: int
    mean_height: float
    pile_height: int
    max_minus_min_height: int
    holes: int
    connected_holes: int
    row_transitions: int
    column_transitions: int
    cumulative_wells: int
    max_well_depth: int
    sum_well_depths: int
    hole_depth: int
    rows_with_holes: int
    pattern_diversity: int
    occupied_cells: int
    weighted_occupied_cells: int
    rbf: tuple[float, ...]


def _rbf_values(mean_height: float, grid_height: int) -> tuple[float, ...]:
    # spelled with explicit multiplies so the JIT kernels emit the same ops
    scale = grid_height / 5.0
    denom = 2.0 * scale * scale
    out = []
    for i in range(RBF_COUNT):
        d = mean_height - (i * grid_height) / 4.0
        out.append(math.exp(-(d * d) / denom))
    return tuple(out)


def grid_features(board: BoardState) -> GridFeatures:
    w = board.width
    h = board.height
    rows = board.rows
    heights = board.heights

    row_transitions = 0
    pair_mask = (1 << (w + 1)) - 1
    for row in rows:
        padded = (1 << (w + 1)) | (row << 1) | 1
        row_transitions += ((padded ^ (padded >> 1)) & pair_mask).bit_count()

    holes = 0
    connected_holes = 0
    column_transitions = 0
    hole_depth = 0
    rows_with_holes_mask = 0
    occupied = 0
    weighted = 0
    cumulative_wells = 0
    max_well_depth = 0
    sum_well_depths = 0

    for c in range(w):
        hc = heights[c]
        prev = 1  # floor
        in_hole_run = False
        fulls_above = 0
        # one downward pass for hole depth, one upward for the rest
        for y in range(hc - 1, -1, -1):
            if (rows[y] >> c) & 1:
                fulls_above += 1
            else:
                holes += 1
                hole_depth += fulls_above
                rows_with_holes_mask |= 1 << y
        for y in range(hc):
            bit = (rows[y] >> c) & 1
            if bit:
                occupied += 1
                weighted += y + 1
                in_hole_run = False
            else:
                if not in_hole_run:
                    connected_holes += 1
                in_hole_run = True
            if bit != prev:
                column_transitions += 1
            prev = bit
        column_transitions += 1  # top of the stack (or the floor) to empty air

        # well cells sit above this column's own top; neighbors cannot be
        # full above their own tops, so the scan stops at the lower one
        left_h = h if c == 0 else heights[c - 1]
        right_h = h if c == w - 1 else heights[c + 1]
        run = 0
        for y in range(hc, min(left_h, right_h)):
            left_full = c == 0 or ((rows[y] >> (c - 1)) & 1)
            right_full = c == w - 1 or ((rows[y] >> (c + 1)) & 1)
            if left_full and right_full:
                run += 1
            elif run:
                cumulative_wells += run * (run + 1) // 2
                sum_well_depths += run
                max_well_depth = max(max_well_depth, run)
                run = 0
        if run:
            cumulative_wells += run * (run + 1) // 2
            sum_well_depths += run
            max_well_depth = max(max_well_depth, run)

    diffs = tuple(abs(heights[c + 1] - heights[c]) for c in range(w - 1))
    signed = {heights[c] - heights[c + 1] for c in range(w - 1)}
    pattern_diversity = sum(1 for d in signed if abs(d) <= 2)
    mean_height = sum(heights) / w
    pile = max(heights)

    return GridFeatures(
        width=w,
        height=h,
        column_heights=heights,
        height_diffs=diffs,
        sum_abs_height_diffs=sum(diffs),
        mean_height=mean_height,
        pile_height=pile,
        max_minus_min_height=pile - min(heights),
        holes=holes,
        connected_holes=connected_holes,
        row_transitions=row_transitions,
        column_transitions=column_transitions,
        cumulative_wells=cumulative_wells,
        max_well_depth=max_well_depth,
        sum_well_depths=sum_well_depths,
        hole_depth=hole_depth,
        rows_with_holes=rows_with_holes_mask.bit_count(),
        pattern_diversity=pattern_diversity,
        occupied_cells=occupied,
        weighted_occupied_cells=weighted,
        rbf=_rbf_values(mean_height, h),
    )


@dataclass(frozen=True)
class DeltaFeatures:
    holes: int
    pile_height: int
    sum_abs_height_diffs: int
    mean_height: float


def delta_features(pre: BoardState, post: BoardState) -> DeltaFeatures:
    """Post minus pre for the four Lagoudakis change features."""
    a = grid_features(pre)
    b = grid_features(post)
    return DeltaFeatures(
        holes=b.holes - a.holes,
        pile_height=b.pile_height - a.pile_height,
        sum_abs_height_diffs=b.sum_abs_height_diffs - a.sum_abs_height_diffs,
        mean_height=b.mean_height - a.mean_height,
    )


@dataclass(frozen=True)
class FeatureContext:
    """One evaluated move: the board it started from and what the drop did."""

    pre: BoardState
    outcome: MoveOutcome

    @cached_property
    def post_features(self) -> GridFeatures:
        return grid_features(self.outcome.post_board)

    @cached_property
    def pre_features(self) -> GridFeatures:
        return grid_features(self.pre)


def move_features(outcome: MoveOutcome) -> dict[str, float]:
    return {
        "landing_height": outcome.landing_height,
        "eroded_cells": float(outcome.eroded_cells),
        "cleared_lines": float(outcome.lines_cleared),
    }


def feature_names(set_id: FeatureSetId, width: int) -> tuple[str, ...]:
    """Ordered component names; the order is the contract for weight vectors."""
    if set_id is FeatureSetId.BERTSEKAS:
        return (
            tuple(f"height_{c}" for c in range(width))
            + tuple(f"height_diff_{c}" for c in range(width - 1))
            + ("holes", "pile_height")
        )
    if set_id is FeatureSetId.LAGOUDAKIS:
        return (
            "holes",
            "pile_height",
            "sum_abs_height_diffs",
            "mean_height",
            "delta_holes",
            "delta_pile_height",
            "delta_sum_abs_height_diffs",
            "delta_mean_height",
            "cleared_lines",
        )
    if set_id is FeatureSetId.DELLACHERIE:
        return (
            "holes",
            "landing_height",
            "row_transitions",
            "column_transitions",
            "cumulative_wells",
            "eroded_cells",
        )
    if set_id is FeatureSetId.BOHM:
        return (
            "pile_height",
            "connected_holes",
            "cleared_lines",
            "max_minus_min_height",
            "max_well_depth",
            "sum_well_depths",
            "landing_height",
            "occupied_cells",
            "weighted_occupied_cells",
            "row_transitions",
            "column_transitions",
        )
    if set_id is FeatureSetId.BCTS:
        return feature_names(FeatureSetId.DELLACHERIE, width) + (
            "hole_depth",
            "rows_with_holes",
        )
    if set_id is FeatureSetId.DT:
        return feature_names(FeatureSetId.BCTS, width) + ("pattern_diversity",)
    if set_id is FeatureSetId.RBF:
        return tuple(f"rbf_{i}" for i in range(RBF_COUNT))
    raise ValueError(f"unknown feature set {set_id!r}")


def extract(set_id: FeatureSetId, ctx: FeatureContext) -> np.ndarray:
    """Assemble the ordered vector for one feature set, as float64."""
    g = ctx.post_features
    out = ctx.outcome

    if set_id is FeatureSetId.BERTSEKAS:
        vals = (
            list(g.column_heights)
            + list(g.height_diffs)
            + [g.holes, g.pile_height]
        )
    elif set_id is FeatureSetId.LAGOUDAKIS:
        p = ctx.pre_features
        vals = [
            g.holes,
            g.pile_height,
            g.sum_abs_height_diffs,
            g.mean_height,
            g.holes - p.holes,
            g.pile_height - p.pile_height,
            g.sum_abs_height_diffs - p.sum_abs_height_diffs,
            g.mean_height - p.mean_height,
            out.lines_cleared,
        ]
    elif set_id is FeatureSetId.DELLACHERIE:
        vals = [
            g.holes,
            out.landing_height,
            g.row_transitions,
            g.column_transitions,
            g.cumulative_wells,
            out.eroded_cells,
        ]
    elif set_id is FeatureSetId.BOHM:
        vals = [
            g.pile_height,
            g.connected_holes,
            out.lines_cleared,
            g.max_minus_min_height,
            g.max_well_depth,
            g.sum_well_depths,
            out.landing_height,
            g.occupied_cells,
            g.weighted_occupied_cells,
            g.row_transitions,
            g.column_transitions,
        ]
    elif set_id is FeatureSetId.BCTS:
        vals = [
            g.holes,
            out.landing_height,
            g.row_transitions,
            g.column_transitions,
            g.cumulative_wells,
            out.eroded_cells,
            g.hole_depth,
            g.rows_with_holes,
        ]
    elif set_id is FeatureSetId.DT:
        vals = [
            g.holes,
            out.landing_height,
            g.row_transitions,
            g.column_transitions,
            g.cumulative_wells,
            out.eroded_cells,
            g.hole_depth,
            g.rows_with_holes,
            g.pattern_diversity,
        ]
    elif set_id is FeatureSetId.RBF:
        vals = list(g.rbf)
    else:
        raise ValueError(f"unknown feature set {set_id!r}")

    return np.asarray(vals, dtype=np.float64)
