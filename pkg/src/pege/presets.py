"""Named experiments backing the acceptance checks."""

from __future__ import annotations

import numpy as np

from .core import gap_profile
from .environments import build_ranking_game, build_tabular_game
from .linalg import find_global_observable_set
from .simulator import ExperimentConfig

RANKING5_MEANS = [0.9, 0.7, 0.5, 0.3, 0.1]
RANKING3_MEANS = [0.9, 0.5, 0.1]
RANKING3_TIED = [0.5, 0.5, 0.2]
# two actions with gap 0.75 - 0.25 = 0.5; only the suboptimal one is
# observable, so every exploration round costs the full gap
TWO_ACTION_ROWS = [[1.0, 0.0], [0.0, 1.0]]
TWO_ACTION_OBSERVED = [0, 1]
TWO_ACTION_MEANS = [0.75, 0.25]


def _scale(game, cands, means):
    """(gap, R, beta_sigma) of an instance."""
    sigma = find_global_observable_set(game, cands)
    return gap_profile(game, means).gap_delta, game.lipschitz_R, sigma.beta_sigma


def ranking_gap_scale(n, means, gains=None):
    game, _, cands = build_ranking_game(n, gains)
    return _scale(game, cands, means)


def two_action_game():
    mats = [np.eye(2) if f else np.zeros((1, 2)) for f in TWO_ACTION_OBSERVED]
    return build_tabular_game(TWO_ACTION_ROWS, mats)


def two_action_scale():
    game, _, cands = two_action_game()
    return _scale(game, cands, TWO_ACTION_MEANS)


def theorem2_h(n=5, means=RANKING5_MEANS):
    gap, R, beta = ranking_gap_scale(n, means)
    return gap**2 / (8 * R * R * beta * beta)


def theorem5_h(valid=True):
    gap, R, beta = two_action_scale()
    limit = gap**2 / (4 * R * R * beta * beta)
    return limit / 2 if valid else limit


def _seeds(k, base=0):
    return [base + i for i in range(k)]


def smoke(seeds=3):
    return ExperimentConfig(env="ranking", n=3, algo="pege-t1", horizon=1000,
                            seeds=_seeds(seeds), means=RANKING3_MEANS)


def theorem1_scaling(seeds=50, horizon=10**6):
    return ExperimentConfig(env="ranking", n=5, algo="pege-t1", horizon=horizon,
                            seeds=_seeds(seeds), means=RANKING5_MEANS)


def theorem2_polylog(seeds=50, horizon=10**6):
    return ExperimentConfig(env="ranking", n=5, algo="pege-t2", horizon=horizon,
                            seeds=_seeds(seeds), means=RANKING5_MEANS, h=theorem2_h())


def gap_unique(seeds=200, t0=1e5, delta=0.05):
    return ExperimentConfig(env="tabular", n=2, algo="gap-estimation", horizon=int(t0) + 2,
                            seeds=_seeds(seeds), reward_rows=TWO_ACTION_ROWS, observed=TWO_ACTION_OBSERVED,
                            means=TWO_ACTION_MEANS, t0=t0, delta=delta)


def gap_tied(seeds=200, t0=2000.0, delta=0.05):
    return ExperimentConfig(env="ranking", n=3, algo="gap-estimation", horizon=3 * (int(t0) + 2),
                            seeds=_seeds(seeds), means=RANKING3_TIED, t0=t0, delta=delta)


def pege2_unique(seeds=100, horizon=10**5):
    return ExperimentConfig(env="ranking", n=3, algo="pege2", horizon=horizon,
                            seeds=_seeds(seeds), means=RANKING3_MEANS)


def pege2_tied(seeds=100, horizon=10**5):
    return ExperimentConfig(env="ranking", n=3, algo="pege2", horizon=horizon,
                            seeds=_seeds(seeds), means=RANKING3_TIED)


def theorem5(seeds=50, horizon=10**6, valid=True):
    return ExperimentConfig(env="tabular", n=2, algo="pege-t5", horizon=horizon,
                            seeds=_seeds(seeds), reward_rows=TWO_ACTION_ROWS, observed=TWO_ACTION_OBSERVED,
                            means=TWO_ACTION_MEANS, h=theorem5_h(valid))


PRESETS = {
    "smoke": smoke,
    "theorem1-scaling": theorem1_scaling,
    "theorem2-polylog": theorem2_polylog,
    "gap-unique": gap_unique,
    "gap-tied": gap_tied,
    "pege2-unique": pege2_unique,
    "pege2-tied": pege2_tied,
    "theorem5": theorem5,
    "theorem5-invalid-h": lambda **kw: theorem5(valid=False, **kw),
}
