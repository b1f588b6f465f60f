"""Concrete games: online ranking with top-1 feedback, its continuous
score-vector variant, and small tabular games used as test fixtures.

Ranking actions are tuples listing item indices from the top position down,
so ``(2, 0, 1)`` puts item 2 first.
"""

from __future__ import annotations

import itertools
import math
from typing import Optional, Sequence

import numpy as np

from .core import Game, Oracles


def dcg_gain(position: int, n: Optional[int] = None) -> float:
    """DCG discount 1/log2(1 + position) for 1-based positions."""
    if position < 1 or (n is not None and position > n):
        raise ValueError(f"position {position} out of range")
    return 1.0 / math.log2(position + 1)


def dcg_gains(n: int) -> np.ndarray:
    return np.array([dcg_gain(k, n) for k in range(1, n + 1)])


def _top_row(n: int, item: int) -> np.ndarray:
    row = np.zeros((1, n))
    row[0, item] = 1.0
    return row


class RankingGame(Game):
    """Permutations of n items, linear DCG-style reward, relevance of the
    top-ranked item as feedback."""

    def __init__(self, n_items: int, gains: Optional[Sequence[float]] = None):
        if n_items < 1:
            raise ValueError("need at least one item")
        g = dcg_gains(n_items) if gains is None else np.asarray(gains, dtype=float)
        if g.shape != (n_items,):
            raise ValueError(f"expected {n_items} gains, got {g.shape}")
        if np.any(g <= 0) or np.any(np.diff(g) > 0):
            raise ValueError("gains must be positive and non-increasing")
        self.n_items = n_items
        self.dimension = n_items
        self.gain_vector = g
        self.gain_vector.setflags(write=False)
        self.lipschitz_R = float(np.linalg.norm(g))
        self.reward_ceiling_Rmax = float(g.sum())
        self.action_count = math.factorial(n_items)
        self._rows = [_top_row(n_items, i) for i in range(n_items)]
        for row in self._rows:
            row.setflags(write=False)

    def feedback_matrix(self, x) -> np.ndarray:
        return self._rows[x[0]]

    def score_vector(self, x) -> np.ndarray:
        """f(x): gain assigned to each item under ranking x."""
        f = np.empty(self.n_items)
        f[list(x)] = self.gain_vector
        return f

    def expected_reward(self, x, theta) -> float:
        # summed in position order so that swapping tied items is bit-exact
        return float(np.dot(self.gain_vector, np.asarray(theta)[list(x)]))

    def actions(self):
        return itertools.permutations(range(self.n_items))

    def sigma_candidates(self):
        """The n cyclic rotations; rotation k puts item k on top."""
        n = self.n_items
        return [tuple((k + j) % n for j in range(n)) for k in range(n)]


def ranking_argmax(theta) -> tuple:
    """Sort items by decreasing theta; ties keep ascending item index."""
    return tuple(int(i) for i in np.argsort(-np.asarray(theta, dtype=float), kind="stable"))


def ranking_secondmax(theta, best, gains) -> tuple:
    """Best adjacent transposition of ``best``.

    The reward lost by swapping positions k and k+1 is
    (g_k - g_{k+1}) * (theta[best_k] - theta[best_{k+1}]); the smallest loss
    wins, earliest position on ties.
    """
    best = tuple(best)
    n = len(best)
    if n < 2:
        raise ValueError("a single item has no second-best ranking")
    theta = np.asarray(theta, dtype=float)
    g = np.asarray(gains, dtype=float)
    ordered = theta[list(best)]
    drops = (g[:-1] - g[1:]) * (ordered[:-1] - ordered[1:])
    k = int(np.argmin(drops))
    second = list(best)
    second[k], second[k + 1] = second[k + 1], second[k]
    return tuple(second)


def build_ranking_game(n: int, gains=None):
    """Ranking game, its two oracles, and sigma candidates."""
    if n < 2:
        raise ValueError("ranking needs n >= 2 so that a second-best action exists")
    game = RankingGame(n, gains)
    g = game.gain_vector
    oracles = Oracles(
        argmax=ranking_argmax,
        arg_secondmax=lambda theta, best: ranking_secondmax(theta, best, g),
    )
    return game, oracles, game.sigma_candidates()


class ScoreRankingGame(Game):
    """Continuous actions x in [0,1]^n scored by r(x, theta) = -||x - theta||^2.

    The expected reward uses the binary-relevance identity
    E[theta_i^2] = E[theta_i], which gives -||x||^2 + 2 x.theta* - 1.theta*.
    """

    def __init__(self, n_items: int):
        if n_items < 1:
            raise ValueError("need at least one item")
        self.n_items = n_items
        self.dimension = n_items
        # gradient in theta is 2x - 1, norm at most sqrt(n)
        self.lipschitz_R = math.sqrt(n_items)
        # r-bar is non-positive with range n; n bounds the per-round regret
        self.reward_ceiling_Rmax = float(n_items)
        self.action_count = None

    def top_item(self, x) -> int:
        return int(np.argsort(-np.asarray(x, dtype=float), kind="stable")[0])

    def feedback_matrix(self, x) -> np.ndarray:
        return _top_row(self.n_items, self.top_item(x))

    def expected_reward(self, x, theta) -> float:
        x = np.asarray(x, dtype=float)
        theta = np.asarray(theta, dtype=float)
        return float(-x @ x + 2 * x @ theta - theta.sum())

    def sample_reward(self, x, theta) -> float:
        d = np.asarray(x, dtype=float) - np.asarray(theta, dtype=float)
        return float(-d @ d)

    def sigma_candidates(self):
        """One-hot score vectors; vector k ranks item k on top."""
        return [tuple(1.0 if i == k else 0.0 for i in range(self.n_items)) for k in range(self.n_items)]


def score_ranking_argmax(theta) -> tuple:
    """Maximizer of the concave expected reward over the unit box."""
    return tuple(float(v) for v in np.clip(np.asarray(theta, dtype=float), 0.0, 1.0))


def build_score_ranking_game(n: int):
    game = ScoreRankingGame(n)
    return game, Oracles(argmax=score_ranking_argmax), game.sigma_candidates()


class TabularGame(Game):
    """Finitely many actions with explicit reward rows and feedback matrices.

    Actions are the indices 0..K-1 and r-bar(x, theta) = rows[x] . theta.
    """

    def __init__(self, reward_rows, feedback_matrices=None):
        rows = np.atleast_2d(np.asarray(reward_rows, dtype=float))
        k, n = rows.shape
        if feedback_matrices is None:
            feedback_matrices = [np.eye(n)] * k
        mats = [np.atleast_2d(np.asarray(M, dtype=float)) for M in feedback_matrices]
        if len(mats) != k:
            raise ValueError("one feedback matrix per action required")
        for i, M in enumerate(mats):
            if M.shape[1] != n:
                raise ValueError(f"feedback matrix {i} has {M.shape[1]} columns, expected {n}")
            M.setflags(write=False)
        self.reward_rows = rows
        self.reward_rows.setflags(write=False)
        self._feedback = mats
        self.dimension = n
        self.action_count = k
        self.lipschitz_R = float(np.max(np.linalg.norm(rows, axis=1)))
        self.reward_ceiling_Rmax = float(np.max(np.clip(rows, 0, None).sum(axis=1)))

    def feedback_matrix(self, x) -> np.ndarray:
        return self._feedback[x]

    def expected_reward(self, x, theta) -> float:
        return float(self.reward_rows[x] @ np.asarray(theta, dtype=float))

    def actions(self):
        return range(self.action_count)

    def sigma_candidates(self):
        return list(range(self.action_count))


def tabular_oracles(game: TabularGame) -> Oracles:
    rows = game.reward_rows

    def argmax(theta):
        return int(np.argmax(rows @ np.asarray(theta, dtype=float)))

    def arg_secondmax(theta, excluded):
        values = rows @ np.asarray(theta, dtype=float)
        values[excluded] = -np.inf
        return int(np.argmax(values))

    return Oracles(argmax, arg_secondmax if game.action_count > 1 else None)


def build_tabular_game(reward_rows, feedback_matrices=None):
    game = TabularGame(reward_rows, feedback_matrices)
    return game, tabular_oracles(game), game.sigma_candidates()
