"""Pareto and prefix-sum filters: pinned examples plus search properties."""

from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tetrislab.board import GameConfig
from tetrislab.dominance import (
    cumulative_dominance_filter,
    filter_stats,
    importance_from_weights,
    orientation_from_weights,
    simple_dominance_filter,
    write_filter_report,
)
from tetrislab.engine import drop, legal_placements
from tetrislab.features import FeatureContext, FeatureSetId, extract
from tetrislab.pieces import PieceKind
from tetrislab.policy import NEG_INF, dellacherie_policy, select_action

from conftest import random_board


HIGHER = np.array([1.0, 1.0])


def rows(*vecs):
    return np.array(vecs, dtype=np.float64)


def test_simple_dominance_pinned_examples():
    # a=(1,2) dominates b=(0,2)
    assert simple_dominance_filter(rows((1, 2), (0, 2)), HIGHER) == [0]
    # Pareto-incomparable pair both survive
    assert simple_dominance_filter(rows((1, 0), (0, 1)), HIGHER) == [0, 1]
    # exact duplicates: first in input order survives
    assert simple_dominance_filter(rows((1, 1), (1, 1)), HIGHER) == [0]


def test_simple_dominance_respects_orientation():
    lower = np.array([-1.0, -1.0])
    # with lower-is-better on both, (0,2) beats (1,2)
    assert simple_dominance_filter(rows((1, 2), (0, 2)), lower) == [1]


def test_cumulative_dominance_pinned_examples():
    order = np.array([0, 1])
    # prefixes (3,4) vs (2,3): b eliminated
    assert cumulative_dominance_filter(rows((3, 1), (2, 1)), HIGHER, order) == [0]
    # prefixes (3,3) vs (2,7): incomparable, both survive
    assert cumulative_dominance_filter(rows((3, 0), (2, 5)), HIGHER, order) == [0, 1]


def test_cumulative_uses_importance_order():
    # a=(3,0), b=(2,5): prefixes (3,3)/(2,7) are incomparable, but reversing
    # the importance gives (0,3)/(5,7) and b dominates a
    a, b = (3.0, 0.0), (2.0, 5.0)
    assert cumulative_dominance_filter(rows(a, b), HIGHER, np.array([0, 1])) == [0, 1]
    assert cumulative_dominance_filter(rows(a, b), HIGHER, np.array([1, 0])) == [1]


def test_cumulative_rejects_non_permutation():
    with pytest.raises(ValueError):
        cumulative_dominance_filter(rows((1, 2)), HIGHER, np.array([0, 0]))


def test_empty_candidates_rejected():
    with pytest.raises(ValueError):
        simple_dominance_filter(np.zeros((0, 3)), np.ones(3))


def test_orientation_and_importance_from_weights():
    w = np.array([-4.0, -1.0, 2.0, 0.0])
    assert orientation_from_weights(w).tolist() == [-1.0, -1.0, 1.0, 1.0]
    assert importance_from_weights(w).tolist() == [0, 2, 1, 3]


def oracle_simple_survivors(vectors, orientation):
    """Quadratic restatement of the Pareto rule, kept separate on purpose."""
    oriented = vectors * orientation
    n = len(vectors)
    keep = []
    for i in range(n):
        dominated = False
        for j in range(n):
            if i == j:
                continue
            if np.all(oriented[j] >= oriented[i]) and np.any(oriented[j] > oriented[i]):
                dominated = True
                break
            if np.array_equal(oriented[j], oriented[i]) and j < i:
                dominated = True
                break
        if not dominated:
            keep.append(i)
    return keep


vec_lists = st.lists(
    st.tuples(
        st.integers(min_value=-6, max_value=6),
        st.integers(min_value=-6, max_value=6),
        st.integers(min_value=-6, max_value=6),
    ),
    min_size=1,
    max_size=12,
)


@settings(max_examples=300, deadline=None)
@given(vec_lists)
def test_simple_filter_matches_quadratic_oracle(vecs):
    vectors = np.array(vecs, dtype=np.float64)
    orientation = np.array([1.0, -1.0, 1.0])
    assert simple_dominance_filter(vectors, orientation) == oracle_simple_survivors(
        vectors, orientation
    )


@settings(max_examples=300, deadline=None)
@given(vec_lists)
def test_nesting_and_idempotence(vecs):
    vectors = np.array(vecs, dtype=np.float64)
    orientation = np.array([1.0, 1.0, -1.0])
    order = np.array([2, 0, 1])
    simple = simple_dominance_filter(vectors, orientation)
    cumulative = cumulative_dominance_filter(vectors, orientation, order)
    # cumulative survivors nest inside simple survivors
    assert set(cumulative) <= set(simple)
    assert len(cumulative) >= 1
    # filtering the survivors again changes nothing
    again = simple_dominance_filter(vectors[simple], orientation)
    assert [simple[i] for i in again] == simple
    again_c = cumulative_dominance_filter(vectors[cumulative], orientation, order)
    assert [cumulative[i] for i in again_c] == cumulative


@settings(max_examples=200, deadline=None)
@given(vec_lists)
def test_cumulative_standardize_keeps_nesting(vecs):
    vectors = np.array(vecs, dtype=np.float64)
    orientation = np.array([1.0, 1.0, 1.0])
    order = np.array([0, 1, 2])
    plain = cumulative_dominance_filter(vectors, orientation, order)
    standardized = cumulative_dominance_filter(
        vectors, orientation, order, standardize=True
    )
    simple = simple_dominance_filter(vectors, orientation)
    assert set(standardized) <= set(simple)
    assert len(plain) >= 1 and len(standardized) >= 1


def test_best_action_survives_simple_dominance():
    rng = random.Random(55)
    policy = dellacherie_policy()
    orientation = orientation_from_weights(np.array(policy.weights))
    for _ in range(150):
        board = random_board(rng, 10, 20, max_fill=0.5)
        piece = PieceKind["IOTSZJL"[rng.randrange(7)]]
        placement, trace = select_action(policy, board, piece)
        live = [i for i, s in enumerate(trace.scores) if s > NEG_INF]
        if not live:
            continue
        vectors = trace.vectors[live]
        keep = simple_dominance_filter(vectors, orientation)
        survivors = {live[i] for i in keep}
        # the argmax may be an eliminated duplicate, but its vector survives
        assert any(
            np.array_equal(trace.vectors[s], trace.vectors[trace.chosen])
            for s in survivors
        )


def test_filter_stats_smoke_and_nesting():
    report = filter_stats(
        dellacherie_policy(),
        n_games=2,
        seed=11,
        config=GameConfig(width=10, height=10),
        max_pieces_per_game=150,
    )
    assert len(report.records) == 300
    for r in report.records:
        assert 1 <= r.cumulative <= r.simple <= r.raw
        assert r.piece in "IOTSZJL"
    assert report.median_raw >= report.median_simple >= report.median_cumulative
    # reproducibility
    again = filter_stats(
        dellacherie_policy(),
        n_games=2,
        seed=11,
        config=GameConfig(width=10, height=10),
        max_pieces_per_game=150,
    )
    assert [(r.raw, r.simple, r.cumulative) for r in report.records] == [
        (r.raw, r.simple, r.cumulative) for r in again.records
    ]


def test_write_filter_report(tmp_path):
    report = filter_stats(
        dellacherie_policy(),
        n_games=1,
        seed=2,
        config=GameConfig(width=10, height=10),
        max_pieces_per_game=40,
    )
    path = tmp_path / "f.csv"
    write_filter_report(str(path), report)
    text = path.read_text(encoding="utf-8")
    assert text.startswith("# manifest: ")
    assert "game,decision,piece,raw,simple,cumulative" in text
    assert f"# median_raw: {report.median_raw}" in text
