"""Cross-entropy weight search over a diagonal Gaussian.

Each generation draws a population from Normal(mean, diag(var)), scores every
candidate by playing capped games, refits mean and variance on the elite
(population variance, ddof 0), and inflates every variance component by the
decreasing noise term z_t = max(a - t/b, 0).  All candidates in a generation
play the same episode seeds (common random numbers), so score differences
come from the weights, not the piece stream.  Everything is reproducible from
the master seed; only the per-generation wall-clock differs between runs.
"""

from __future__ import annotations

import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .artifacts import write_csv
from .bench import DEFAULT_PIECE_CAP, play_episode
from .board import GameConfig
from .engine import expand_seeds, splitmix64
from .features import FeatureSetId, dimension_for
from .policy import LinearPolicy


@dataclass(frozen=True)
class CeConfig:
    population: int = 100
    elite: int = 10
    generations: int = 50
    games_per_candidate: int | None = None  # None: 1 on small grids, 5 otherwise
    initial_std: float = 100.0
    noise_a: float = 5.0
    noise_b: float = 10.0
    seed: int = 0
    piece_cap: int = DEFAULT_PIECE_CAP

    def __post_init__(self) -> None:
        if self.population < 1 or self.generations < 1:
            raise ValueError("population and generations must be >= 1")
        if not (1 <= self.elite <= self.population):
            raise ValueError("need 1 <= elite <= population")
        if self.games_per_candidate is not None and self.games_per_candidate < 1:
            raise ValueError("games_per_candidate must be >= 1")
        if self.initial_std < 0:
            raise ValueError("initial_std must be >= 0")
        if self.piece_cap < 1:
            raise ValueError("piece_cap must be >= 1")

    def resolved_games(self, config: GameConfig) -> int:
        if self.games_per_candidate is not None:
            return self.games_per_candidate
        return 1 if config.width * config.height <= 100 else 5

    def noise(self, generation: int) -> float:
        """z_t for 1-based generation t, added to every variance component."""
        return max(self.noise_a - generation / self.noise_b, 0.0)


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best_score: float
    elite_mean_score: float
    running_best: float
    seconds: float
    mean: tuple[float, ...]
    std: tuple[float, ...]  # sampling std of the next generation, noise included


@dataclass(frozen=True)
class TrainLog:
    feature_set: FeatureSetId
    records: tuple[GenerationRecord, ...]


def evaluate_on_seeds(
    weights,
    set_id: FeatureSetId,
    config: GameConfig,
    seeds: list[int],
    piece_cap: int = DEFAULT_PIECE_CAP,
) -> float:
    """Mean total reward over the given episode seeds."""
    policy = LinearPolicy(feature_set=set_id, weights=tuple(weights), name="candidate")
    rewards = [play_episode(policy, config, s, piece_cap).reward for s in seeds]
    return statistics.fmean(rewards)


def evaluate_candidate(
    weights,
    set_id: FeatureSetId,
    config: GameConfig,
    n_games: int,
    seed: int,
    piece_cap: int = DEFAULT_PIECE_CAP,
) -> float:
    """Mean total reward over n_games episodes expanded from ``seed``.

    Uses the bench module's episode runner, so scores here equal bench
    scores for the same policy and seeds.
    """
    if n_games < 1:
        raise ValueError("n_games must be >= 1")
    return evaluate_on_seeds(weights, set_id, config, expand_seeds(seed, n_games), piece_cap)


def ce_train(
    cfg: CeConfig,
    config: GameConfig,
    set_id: FeatureSetId,
    jobs: int = 1,
    progress: Callable[[GenerationRecord], None] | None = None,
) -> tuple[LinearPolicy, TrainLog]:
    """Returns the best candidate ever observed plus the per-generation log."""
    dim = dimension_for(set_id, config.width)
    games = cfg.resolved_games(config)
    rng = np.random.default_rng(cfg.seed)
    mean = np.zeros(dim, dtype=np.float64)
    var = np.full(dim, cfg.initial_std * cfg.initial_std, dtype=np.float64)

    best_score = float("-inf")
    best_weights = mean.copy()
    records: list[GenerationRecord] = []
    seed_state = cfg.seed

    for t in range(1, cfg.generations + 1):
        start = time.perf_counter()
        samples = rng.normal(mean, np.sqrt(var), size=(cfg.population, dim))
        seed_state, gen_master = splitmix64(seed_state)
        episode_seeds = expand_seeds(gen_master, games)

        scores = np.empty(cfg.population, dtype=np.float64)
        if jobs <= 1:
            for i in range(cfg.population):
                scores[i] = evaluate_on_seeds(
                    samples[i], set_id, config, episode_seeds, cfg.piece_cap
                )
        else:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                futures = {
                    pool.submit(
                        evaluate_on_seeds,
                        samples[i],
                        set_id,
                        config,
                        episode_seeds,
                        cfg.piece_cap,
                    ): i
                    for i in range(cfg.population)
                }
                for future, i in futures.items():
                    scores[i] = future.result()

        order = np.argsort(-scores, kind="stable")  # ties: lower index first
        elite_idx = order[: cfg.elite]
        elite = samples[elite_idx]
        mean = elite.mean(axis=0)
        var = elite.var(axis=0) + cfg.noise(t)

        gen_best = float(scores[order[0]])
        if gen_best > best_score:
            best_score = gen_best
            best_weights = samples[order[0]].copy()
        record = GenerationRecord(
            generation=t,
            best_score=gen_best,
            elite_mean_score=float(scores[elite_idx].mean()),
            running_best=best_score,
            seconds=time.perf_counter() - start,
            mean=tuple(mean.tolist()),
            std=tuple(np.sqrt(var).tolist()),
        )
        records.append(record)
        if progress is not None:
            progress(record)

    policy = LinearPolicy(
        feature_set=set_id,
        weights=tuple(best_weights.tolist()),
        name=f"ce_{set_id.value}",
    )
    return policy, TrainLog(feature_set=set_id, records=tuple(records))


def write_train_log(path: str, log: TrainLog, manifest: dict) -> None:
    """CSV artifact; wall-clock rides in a comment trailer, not the body."""
    dim = len(log.records[0].mean) if log.records else 0
    header = (
        ["generation", "best_score", "elite_mean_score", "running_best"]
        + [f"mean_{i}" for i in range(dim)]
        + [f"std_{i}" for i in range(dim)]
    )
    write_csv(
        path,
        manifest,
        header=header,
        rows=(
            [r.generation, r.best_score, r.elite_mean_score, r.running_best]
            + list(r.mean)
            + list(r.std)
            for r in log.records
        ),
        trailer=("seconds: " + " ".join(f"{r.seconds:.3f}" for r in log.records),),
    )
