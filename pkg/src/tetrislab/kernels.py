"""JIT-compiled hot loops: feature pass, placement search, episode playout.

These kernels re-implement the reference semantics of :mod:`tetrislab.engine`,
:mod:`tetrislab.features`, and :mod:`tetrislab.policy` on flat numpy arrays.
Bit-identical behavior is a hard contract, enforced by equivalence tests:
same splitmix64 piece stream, same feature values, scores accumulated left to
right in float64, ties broken by enumeration order.

Feature values live in one flat slot array per board so a single fused pass
serves every feature set; per-set index arrays (built from the same
``feature_names`` tables the reference path uses) gather the ordered vector.
All kernels run with ``nogil`` so thread pools get real parallelism.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .board import BoardState
from .features import FeatureSetId, feature_names
from .pieces import PIECE_BY_INDEX, rotation_profiles

# --- slot layout ------------------------------------------------------------

SLOT_HOLES = 0
SLOT_CONNECTED_HOLES = 1
SLOT_PILE = 2
SLOT_BUMP = 3  # sum_abs_height_diffs
SLOT_MEAN = 4
SLOT_MAXMIN = 5
SLOT_ROWT = 6
SLOT_COLT = 7
SLOT_CUMWELLS = 8
SLOT_MAXWELL = 9
SLOT_SUMWELLS = 10
SLOT_HOLEDEPTH = 11
SLOT_ROWSHOLES = 12
SLOT_PATDIV = 13
SLOT_OCC = 14
SLOT_WOCC = 15
SLOT_LANDING = 16
SLOT_ERODED = 17
SLOT_CLEARED = 18
SLOT_DHOLES = 19
SLOT_DPILE = 20
SLOT_DBUMP = 21
SLOT_DMEAN = 22
SLOT_RBF0 = 23  # .. SLOT_RBF0 + 4
FIXED_SLOTS = 28  # height slots follow, then height-diff slots


def nvals(width: int) -> int:
    return FIXED_SLOTS + 2 * width - 1


_SCALAR_SLOTS = {
    "holes": SLOT_HOLES,
    "connected_holes": SLOT_CONNECTED_HOLES,
    "pile_height": SLOT_PILE,
    "sum_abs_height_diffs": SLOT_BUMP,
    "mean_height": SLOT_MEAN,
    "max_minus_min_height": SLOT_MAXMIN,
    "row_transitions": SLOT_ROWT,
    "column_transitions": SLOT_COLT,
    "cumulative_wells": SLOT_CUMWELLS,
    "max_well_depth": SLOT_MAXWELL,
    "sum_well_depths": SLOT_SUMWELLS,
    "hole_depth": SLOT_HOLEDEPTH,
    "rows_with_holes": SLOT_ROWSHOLES,
    "pattern_diversity": SLOT_PATDIV,
    "occupied_cells": SLOT_OCC,
    "weighted_occupied_cells": SLOT_WOCC,
    "landing_height": SLOT_LANDING,
    "eroded_cells": SLOT_ERODED,
    "cleared_lines": SLOT_CLEARED,
    "delta_holes": SLOT_DHOLES,
    "delta_pile_height": SLOT_DPILE,
    "delta_sum_abs_height_diffs": SLOT_DBUMP,
    "delta_mean_height": SLOT_DMEAN,
}


def slot_indices(set_id: FeatureSetId, width: int) -> np.ndarray:
    """Slot index per component, in the set's documented order."""
    idx = []
    for name in feature_names(set_id, width):
        if name in _SCALAR_SLOTS:
            idx.append(_SCALAR_SLOTS[name])
        elif name.startswith("height_diff_"):
            idx.append(FIXED_SLOTS + width + int(name.removeprefix("height_diff_")))
        elif name.startswith("height_"):
            idx.append(FIXED_SLOTS + int(name.removeprefix("height_")))
        elif name.startswith("rbf_"):
            idx.append(SLOT_RBF0 + int(name.removeprefix("rbf_")))
        else:
            raise KeyError(f"feature {name!r} has no kernel slot")
    return np.asarray(idx, dtype=np.int64)


def set_flags(set_id: FeatureSetId) -> tuple[bool, bool]:
    """(need_rbf, need_delta): skip exp calls and pre-board scans when unused."""
    return set_id is FeatureSetId.RBF, set_id is FeatureSetId.LAGOUDAKIS


# --- piece geometry tables --------------------------------------------------


def _build_geometry():
    counts = np.zeros(7, dtype=np.int64)
    bases = np.zeros(7, dtype=np.int64)
    entries = []
    for i in range(7):
        profiles = rotation_profiles(PIECE_BY_INDEX[i])
        bases[i] = len(entries)
        counts[i] = len(profiles)
        entries.extend(profiles)
    n = len(entries)
    r_w = np.zeros(n, dtype=np.int64)
    r_h = np.zeros(n, dtype=np.int64)
    r_bottom = np.zeros((n, 4), dtype=np.int64)
    r_masks = np.zeros((n, 4), dtype=np.int64)
    r_cells = np.zeros((n, 4), dtype=np.int64)
    for e, p in enumerate(entries):
        r_w[e] = p.width
        r_h[e] = p.height
        for j, b in enumerate(p.bottom):
            r_bottom[e, j] = b
        for r, mask in enumerate(p.row_masks):
            r_masks[e, r] = mask
            r_cells[e, r] = p.row_cell_counts[r]
    return counts, bases, r_w, r_h, r_bottom, r_masks, r_cells


(
    ROT_COUNT,
    ROT_BASE,
    R_W,
    R_H,
    R_BOTTOM,
    R_MASKS,
    R_CELLS,
) = _build_geometry()

PIECE_S = 3
PIECE_Z = 4

U64_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
U64_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
U64_MIX2 = np.uint64(0x94D049BB133111EB)
U64_30 = np.uint64(30)
U64_27 = np.uint64(27)
U64_31 = np.uint64(31)
U64_7 = np.uint64(7)


@njit(cache=True, nogil=True, inline="always")
def _splitmix_step(state):
    state = state + U64_GOLDEN
    z = state
    z = (z ^ (z >> U64_30)) * U64_MIX1
    z = (z ^ (z >> U64_27)) * U64_MIX2
    z = z ^ (z >> U64_31)
    return state, np.int64(z % U64_7)


@njit(cache=True, nogil=True, inline="always")
def _popcount(x):
    n = 0
    while x:
        x &= x - 1
        n += 1
    return n


@njit(cache=True, nogil=True)
def _grid_vals(rows, w, h, heights, vals, need_rbf):
    """Heights plus every board-only feature slot, in one fused pass."""
    for c in range(w):
        bit = np.int64(1) << c
        hc = 0
        for y in range(h - 1, -1, -1):
            if rows[y] & bit:
                hc = y + 1
                break
        heights[c] = hc

    row_transitions = 0
    pair_mask = (np.int64(1) << (w + 1)) - 1
    top_bit = np.int64(1) << (w + 1)
    for y in range(h):
        padded = top_bit | (rows[y] << 1) | 1
        row_transitions += _popcount((padded ^ (padded >> 1)) & pair_mask)

    holes = 0
    connected_holes = 0
    column_transitions = 0
    hole_depth = 0
    rows_with_holes_mask = np.int64(0)
    occupied = 0
    weighted = 0
    cumulative_wells = 0
    max_well_depth = 0
    sum_well_depths = 0

    for c in range(w):
        hc = heights[c]
        bit = np.int64(1) << c
        fulls_above = 0
        for y in range(hc - 1, -1, -1):
            if rows[y] & bit:
                fulls_above += 1
            else:
                holes += 1
                hole_depth += fulls_above
                rows_with_holes_mask |= np.int64(1) << y
        prev = 1
        in_hole_run = False
        for y in range(hc):
            if rows[y] & bit:
                cur = 1
                occupied += 1
                weighted += y + 1
                in_hole_run = False
            else:
                cur = 0
                if not in_hole_run:
                    connected_holes += 1
                in_hole_run = True
            if cur != prev:
                column_transitions += 1
            prev = cur
        column_transitions += 1

        left_h = h if c == 0 else heights[c - 1]
        right_h = h if c == w - 1 else heights[c + 1]
        lbit = np.int64(1) << (c - 1) if c > 0 else np.int64(0)
        rbit = np.int64(1) << (c + 1) if c < w - 1 else np.int64(0)
        bound = left_h if left_h < right_h else right_h
        run = 0
        for y in range(hc, bound):
            left_full = c == 0 or (rows[y] & lbit) != 0
            right_full = c == w - 1 or (rows[y] & rbit) != 0
            if left_full and right_full:
                run += 1
            elif run:
                cumulative_wells += run * (run + 1) // 2
                sum_well_depths += run
                if run > max_well_depth:
                    max_well_depth = run
                run = 0
        if run:
            cumulative_wells += run * (run + 1) // 2
            sum_well_depths += run
            if run > max_well_depth:
                max_well_depth = run

    hsum = 0
    pile = 0
    low = heights[0]
    for c in range(w):
        hsum += heights[c]
        if heights[c] > pile:
            pile = heights[c]
        if heights[c] < low:
            low = heights[c]
        vals[FIXED_SLOTS + c] = float(heights[c])
    bump = 0
    seen = 0
    for c in range(w - 1):
        d = heights[c] - heights[c + 1]
        ad = -d if d < 0 else d
        bump += ad
        if ad <= 2:
            seen |= 1 << (d + 2)
        vals[FIXED_SLOTS + w + c] = float(ad)
    mean = hsum / w

    vals[SLOT_HOLES] = float(holes)
    vals[SLOT_CONNECTED_HOLES] = float(connected_holes)
    vals[SLOT_PILE] = float(pile)
    vals[SLOT_BUMP] = float(bump)
    vals[SLOT_MEAN] = mean
    vals[SLOT_MAXMIN] = float(pile - low)
    vals[SLOT_ROWT] = float(row_transitions)
    vals[SLOT_COLT] = float(column_transitions)
    vals[SLOT_CUMWELLS] = float(cumulative_wells)
    vals[SLOT_MAXWELL] = float(max_well_depth)
    vals[SLOT_SUMWELLS] = float(sum_well_depths)
    vals[SLOT_HOLEDEPTH] = float(hole_depth)
    vals[SLOT_ROWSHOLES] = float(_popcount(rows_with_holes_mask))
    vals[SLOT_PATDIV] = float(_popcount(np.int64(seen)))
    vals[SLOT_OCC] = float(occupied)
    vals[SLOT_WOCC] = float(weighted)
    if need_rbf:
        scale = h / 5.0
        denom = 2.0 * scale * scale
        for i in range(5):
            d = mean - (i * h) / 4.0
            vals[SLOT_RBF0 + i] = math.exp(-(d * d) / denom)


@njit(cache=True, nogil=True)
def _apply_placement(rows, w, h, heights, r_w, r_h, r_bottom, r_masks, r_cells, entry, col):
    """Drop into ``rows`` in place; returns (terminal, rest, lines, eroded).

    ``heights`` is the pre-board's column heights and is not modified; a
    terminal placement leaves ``rows`` untouched.
    """
    pw = r_w[entry]
    ph = r_h[entry]
    rest = np.int64(0)
    for j in range(pw):
        cand = heights[col + j] - r_bottom[entry, j]
        if cand > rest:
            rest = cand
    if rest + ph > h:
        return True, rest, np.int64(0), np.int64(0)
    for r in range(ph):
        rows[rest + r] |= r_masks[entry, r] << col
    full = (np.int64(1) << w) - 1
    lines = np.int64(0)
    piece_cells = np.int64(0)
    for r in range(ph):
        if rows[rest + r] == full:
            lines += 1
            piece_cells += r_cells[entry, r]
    if lines > 0:
        dst = 0
        for y in range(h):
            if rows[y] != full:
                rows[dst] = rows[y]
                dst += 1
        for y in range(dst, h):
            rows[y] = 0
    return False, rest, lines, lines * piece_cells


@njit(cache=True, nogil=True)
def _select_placement(
    rows,
    heights,
    w,
    h,
    piece,
    weights,
    slot_idx,
    need_rbf,
    need_delta,
    pre_holes,
    pre_pile,
    pre_bump,
    pre_mean,
    rot_count,
    rot_base,
    r_w,
    r_h,
    r_bottom,
    r_masks,
    r_cells,
    scratch_rows,
    scratch_heights,
    vals,
):
    """Greedy argmax over (rotation, column); first strict improvement wins.

    Returns (found, entry, col, best_score, evals); ``found`` false means
    every candidate was terminal and (rotation 0, column 0) is the forced
    move.
    """
    base = rot_base[piece]
    best_entry = base
    best_col = 0
    best_score = -np.inf
    found = False
    evals = 0
    nw = weights.shape[0]
    for k in range(rot_count[piece]):
        entry = base + k
        pw = r_w[entry]
        for col in range(w - pw + 1):
            for y in range(h):
                scratch_rows[y] = rows[y]
            terminal, rest, lines, eroded = _apply_placement(
                scratch_rows, w, h, heights, r_w, r_h, r_bottom, r_masks, r_cells, entry, col
            )
            if terminal:
                continue
            _grid_vals(scratch_rows, w, h, scratch_heights, vals, need_rbf)
            vals[SLOT_LANDING] = rest + (r_h[entry] - 1) / 2.0
            vals[SLOT_ERODED] = float(eroded)
            vals[SLOT_CLEARED] = float(lines)
            if need_delta:
                vals[SLOT_DHOLES] = vals[SLOT_HOLES] - pre_holes
                vals[SLOT_DPILE] = vals[SLOT_PILE] - pre_pile
                vals[SLOT_DBUMP] = vals[SLOT_BUMP] - pre_bump
                vals[SLOT_DMEAN] = vals[SLOT_MEAN] - pre_mean
            score = 0.0
            for i in range(nw):
                score += weights[i] * vals[slot_idx[i]]
            evals += 1
            if not found or score > best_score:
                found = True
                best_score = score
                best_entry = entry
                best_col = col
    return found, best_entry, best_col, best_score, evals


@njit(cache=True, nogil=True, inline="always")
def _spawn_blocked(rows, w, h, piece, rot_base, r_w, r_h, r_masks):
    base = rot_base[piece]
    col = (w - r_w[base]) // 2
    base_row = h - r_h[base]
    for r in range(r_h[base]):
        if rows[base_row + r] & (r_masks[base, r] << col):
            return True
    return False


@njit(cache=True, nogil=True)
def _play_episode(
    w,
    h,
    variant,
    piece_mode,
    seed,
    cap,
    weights,
    slot_idx,
    need_rbf,
    need_delta,
    scoring,
    rot_count,
    rot_base,
    r_w,
    r_h,
    r_bottom,
    r_masks,
    r_cells,
    record_trace,
    trace_out,
):
    """One full episode from an empty board.

    piece_mode 0 draws uniform i.i.d. pieces from splitmix64(seed); mode 1
    plays the fixed S,Z,S,Z... sequence.  variant 1 adds the spawn-blocked
    game-over check after every committed move.  Returns
    (reward, lines, pieces, decisions, terminal, evals).
    """
    rows = np.zeros(h, dtype=np.int64)
    heights = np.zeros(w, dtype=np.int64)
    scratch_rows = np.empty(h, dtype=np.int64)
    scratch_heights = np.empty(w, dtype=np.int64)
    vals = np.zeros(FIXED_SLOTS + 2 * w - 1, dtype=np.float64)
    pre_vals = np.zeros(FIXED_SLOTS + 2 * w - 1, dtype=np.float64)

    state = np.uint64(seed)
    draw = 0
    if piece_mode == 1:
        piece = np.int64(PIECE_S)
    else:
        state, piece = _splitmix_step(state)
    draw += 1

    total_reward = 0.0
    lines_total = np.int64(0)
    pieces_placed = np.int64(0)
    decisions = np.int64(0)
    terminal = False
    evals_total = np.int64(0)

    while pieces_placed < cap:
        pre_holes = 0.0
        pre_pile = 0.0
        pre_bump = 0.0
        pre_mean = 0.0
        if need_delta:
            _grid_vals(rows, w, h, scratch_heights, pre_vals, False)
            pre_holes = pre_vals[SLOT_HOLES]
            pre_pile = pre_vals[SLOT_PILE]
            pre_bump = pre_vals[SLOT_BUMP]
            pre_mean = pre_vals[SLOT_MEAN]
        found, entry, col, _score, evals = _select_placement(
            rows,
            heights,
            w,
            h,
            piece,
            weights,
            slot_idx,
            need_rbf,
            need_delta,
            pre_holes,
            pre_pile,
            pre_bump,
            pre_mean,
            rot_count,
            rot_base,
            r_w,
            r_h,
            r_bottom,
            r_masks,
            r_cells,
            scratch_rows,
            scratch_heights,
            vals,
        )
        evals_total += evals
        term, rest, lines, eroded = _apply_placement(
            rows, w, h, heights, r_w, r_h, r_bottom, r_masks, r_cells, entry, col
        )
        if record_trace:
            trace_out[decisions, 0] = piece
            trace_out[decisions, 1] = entry - rot_base[piece]
            trace_out[decisions, 2] = col
            trace_out[decisions, 3] = lines
        decisions += 1
        if term:
            terminal = True
            break
        for c in range(w):
            bit = np.int64(1) << c
            hc = 0
            for y in range(h - 1, -1, -1):
                if rows[y] & bit:
                    hc = y + 1
                    break
            heights[c] = hc
        if lines > 0:
            total_reward += scoring[lines - 1]
        lines_total += lines
        pieces_placed += 1

        if piece_mode == 1:
            piece = np.int64(PIECE_S) if draw % 2 == 0 else np.int64(PIECE_Z)
        else:
            state, piece = _splitmix_step(state)
        draw += 1
        if variant == 1 and _spawn_blocked(rows, w, h, piece, rot_base, r_w, r_h, r_masks):
            terminal = True
            break

    return total_reward, lines_total, pieces_placed, decisions, terminal, evals_total


# --- python-facing wrappers --------------------------------------------------


@njit(cache=True, nogil=True)
def _splitmix_piece_stream(seed, out):
    state = seed
    for i in range(out.shape[0]):
        state, piece = _splitmix_step(state)
        out[i] = piece


def splitmix_steps(seed: int, count: int) -> np.ndarray:
    """First ``count`` piece indices of the JIT stream (test hook)."""
    out = np.empty(count, dtype=np.int64)
    _splitmix_piece_stream(np.uint64(seed), out)
    return out


def board_arrays(board: BoardState) -> tuple[np.ndarray, np.ndarray]:
    rows = np.asarray(board.rows, dtype=np.int64)
    heights = np.asarray(board.heights, dtype=np.int64)
    return rows, heights


def grid_vals_fast(board: BoardState, need_rbf: bool = True) -> np.ndarray:
    """All feature slots of one board, via the JIT pass (test hook)."""
    rows, _ = board_arrays(board)
    heights = np.zeros(board.width, dtype=np.int64)
    vals = np.zeros(nvals(board.width), dtype=np.float64)
    _grid_vals(rows, board.width, board.height, heights, vals, need_rbf)
    return vals


def context_vals_fast(board: BoardState, entry: int, col: int) -> tuple[bool, np.ndarray]:
    """Feature slots after dropping rotation-table entry ``entry`` at ``col``."""
    rows, heights = board_arrays(board)
    w, h = board.width, board.height
    terminal, rest, lines, eroded = _apply_placement(
        rows, w, h, heights, R_W, R_H, R_BOTTOM, R_MASKS, R_CELLS, np.int64(entry), np.int64(col)
    )
    vals = np.zeros(nvals(w), dtype=np.float64)
    if terminal:
        return True, vals
    scratch_heights = np.zeros(w, dtype=np.int64)
    _grid_vals(rows, w, h, scratch_heights, vals, True)
    vals[SLOT_LANDING] = rest + (R_H[entry] - 1) / 2.0
    vals[SLOT_ERODED] = float(eroded)
    vals[SLOT_CLEARED] = float(lines)
    pre_vals = grid_vals_fast(board, need_rbf=False)
    vals[SLOT_DHOLES] = vals[SLOT_HOLES] - pre_vals[SLOT_HOLES]
    vals[SLOT_DPILE] = vals[SLOT_PILE] - pre_vals[SLOT_PILE]
    vals[SLOT_DBUMP] = vals[SLOT_BUMP] - pre_vals[SLOT_BUMP]
    vals[SLOT_DMEAN] = vals[SLOT_MEAN] - pre_vals[SLOT_MEAN]
    return False, vals


def select_placement_fast(
    board: BoardState, piece_index: int, set_id: FeatureSetId, weights: np.ndarray
) -> tuple[int, int, float, bool]:
    """(rotation, column, score, found) for one decision (test hook)."""
    rows, heights = board_arrays(board)
    w, h = board.width, board.height
    need_rbf, need_delta = set_flags(set_id)
    pre_holes = pre_pile = pre_bump = pre_mean = 0.0
    if need_delta:
        pre = grid_vals_fast(board, need_rbf=False)
        pre_holes = pre[SLOT_HOLES]
        pre_pile = pre[SLOT_PILE]
        pre_bump = pre[SLOT_BUMP]
        pre_mean = pre[SLOT_MEAN]
    found, entry, col, score, _evals = _select_placement(
        rows,
        heights,
        w,
        h,
        np.int64(piece_index),
        np.asarray(weights, dtype=np.float64),
        slot_indices(set_id, w),
        need_rbf,
        need_delta,
        pre_holes,
        pre_pile,
        pre_bump,
        pre_mean,
        ROT_COUNT,
        ROT_BASE,
        R_W,
        R_H,
        R_BOTTOM,
        R_MASKS,
        R_CELLS,
        np.empty(h, dtype=np.int64),
        np.empty(w, dtype=np.int64),
        np.zeros(nvals(w), dtype=np.float64),
    )
    return int(entry - ROT_BASE[piece_index]), int(col), float(score), bool(found)


def play_episode_fast(
    width: int,
    height: int,
    variant: int,
    piece_mode: int,
    seed: int,
    cap: int,
    set_id: FeatureSetId,
    weights,
    scoring,
    record_trace: bool = False,
) -> dict:
    """Run one kernel episode; returns plain python numbers plus the trace."""
    need_rbf, need_delta = set_flags(set_id)
    trace = (
        np.zeros((cap, 4), dtype=np.int32)
        if record_trace
        else np.zeros((0, 4), dtype=np.int32)
    )
    reward, lines, pieces, decisions, terminal, evals = _play_episode(
        np.int64(width),
        np.int64(height),
        np.int64(variant),
        np.int64(piece_mode),
        np.uint64(seed & ((1 << 64) - 1)),
        np.int64(cap),
        np.asarray(weights, dtype=np.float64),
        slot_indices(set_id, width),
        need_rbf,
        need_delta,
        np.asarray(scoring, dtype=np.float64),
        ROT_COUNT,
        ROT_BASE,
        R_W,
        R_H,
        R_BOTTOM,
        R_MASKS,
        R_CELLS,
        record_trace,
        trace,
    )
    return {
        "reward": float(reward),
        "lines": int(lines),
        "pieces": int(pieces),
        "decisions": int(decisions),
        "terminal": bool(terminal),
        "evals": int(evals),
        "trace": trace[: int(decisions)] if record_trace else None,
    }
