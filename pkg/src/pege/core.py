"""Game model for stochastic combinatorial partial monitoring.

A game exposes what a learner is allowed to know (dimension, feedback
matrices, the reward function evaluated at an *estimate*) plus two pieces of
simulator-only machinery: reward sampling and exact gap computation against
the adversary's true mean.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Optional

import numpy as np

ActionId = Hashable


class UnsupportedOperation(Exception):
    """Raised when an operation needs a finite, enumerable action set."""


class Game:
    """Base class for CPM games.

    Subclasses implement ``feedback_matrix``, ``expected_reward`` and, for
    finite games, ``actions``.
    """

    dimension: int
    lipschitz_R: float
    reward_ceiling_Rmax: float
    action_count: Optional[int] = None  # None marks an infinite action space

    def feedback_matrix(self, x: ActionId) -> np.ndarray:
        raise NotImplementedError

    def expected_reward(self, x: ActionId, theta) -> float:
        raise NotImplementedError

    def sample_reward(self, x: ActionId, theta) -> float:
        # linear rewards: realized reward is r-bar at the drawn theta
        return self.expected_reward(x, theta)

    def actions(self) -> Iterable[ActionId]:
        raise UnsupportedOperation(f"{type(self).__name__} has an infinite action space")

    @property
    def is_finite(self) -> bool:
        return self.action_count is not None

    def check_theta(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.dimension,):
            raise ValueError(
                f"theta has shape {theta.shape}, game dimension is {self.dimension}"
            )
        return theta


@dataclass(frozen=True)
class Oracles:
    """Offline optimisation routines over the learner's action set.

    ``argmax(theta)`` maximizes r-bar(., theta); ``arg_secondmax(theta, x)``
    maximizes over every action except ``x``.
    """

    argmax: Callable[[np.ndarray], ActionId]
    arg_secondmax: Optional[Callable[[np.ndarray, ActionId], ActionId]] = None

    @property
    def has_secondmax(self) -> bool:
        return self.arg_secondmax is not None


class CountingOracles:
    """Oracle wrapper that counts calls; used to audit oracle discipline."""

    def __init__(self, inner: Oracles):
        self._inner = inner
        self.calls = {"argmax": 0, "secondmax": 0}
        self.arg_secondmax = self._secondmax if inner.has_secondmax else None

    @property
    def has_secondmax(self) -> bool:
        return self.arg_secondmax is not None

    def argmax(self, theta):
        self.calls["argmax"] += 1
        return self._inner.argmax(theta)

    def _secondmax(self, theta, excluded):
        self.calls["secondmax"] += 1
        return self._inner.arg_secondmax(theta, excluded)


class AdversaryDistribution:
    """Product distribution on [0,1]^n with a known mean.

    kind is one of ``point_mass``, ``bernoulli_product`` or ``independent_beta``.
    For the beta kind ``a`` and ``b`` are the per-coordinate shape vectors.
    """

    KINDS = ("point_mass", "bernoulli_product", "independent_beta")

    def __init__(self, kind: str, mean=None, a=None, b=None):
        if kind not in self.KINDS:
            raise ValueError(f"unknown adversary kind {kind!r}")
        self.kind = kind
        if kind == "independent_beta":
            if a is None or b is None:
                raise ValueError("independent_beta needs shape vectors a and b")
            self.a = np.asarray(a, dtype=float)
            self.b = np.asarray(b, dtype=float)
            if self.a.shape != self.b.shape or np.any(self.a <= 0) or np.any(self.b <= 0):
                raise ValueError("beta shapes must be positive and of equal length")
            self.mean = self.a / (self.a + self.b)
        else:
            self.mean = np.asarray(mean, dtype=float)
            if np.any(self.mean < 0) or np.any(self.mean > 1):
                raise ValueError("adversary mean must lie in [0,1]^n")
        self.mean.setflags(write=False)

    @classmethod
    def point_mass(cls, theta):
        return cls("point_mass", theta)

    @classmethod
    def bernoulli(cls, mean):
        return cls("bernoulli_product", mean)

    @classmethod
    def beta(cls, a, b):
        return cls("independent_beta", a=a, b=b)

    @property
    def dimension(self) -> int:
        return self.mean.shape[0]

    def sample(self, rng: np.random.Generator, size: int = 1) -> np.ndarray:
        """Draw ``size`` i.i.d. moves; returns an array of shape (size, n)."""
        n = self.dimension
        if self.kind == "point_mass":
            return np.broadcast_to(self.mean, (size, n)).copy()
        if self.kind == "bernoulli_product":
            return (rng.random((size, n)) < self.mean).astype(float)
        return rng.beta(self.a, self.b, size=(size, n))


@dataclass
class GapProfile:
    optimal_action: ActionId
    optimal_value: float
    gap_delta: float
    gap_max: float
    per_action_gaps: dict = field(default_factory=dict)
    unique_optimal: bool = True


def expected_reward(game: Game, x: ActionId, theta) -> float:
    return game.expected_reward(x, game.check_theta(theta))


def gap_profile(game: Game, theta, actions: Optional[Iterable[ActionId]] = None) -> GapProfile:
    """Exact gaps by enumeration. Simulator and test use only.

    Ties at the top are detected by exact equality of the computed rewards.
    ``gap_delta`` is ``inf`` when every action is optimal.
    """
    if actions is None:
        if not game.is_finite:
            raise UnsupportedOperation("gap profile needs a finite action set")
        actions = game.actions()
    theta = game.check_theta(theta)
    values = {x: game.expected_reward(x, theta) for x in actions}
    if not values:
        raise ValueError("empty action enumeration")
    best_value = max(values.values())
    best = next(x for x, v in values.items() if v == best_value)
    n_best = sum(1 for v in values.values() if v == best_value)
    gaps = {x: best_value - v for x, v in values.items()}
    positive = [g for g in gaps.values() if g > 0]
    return GapProfile(
        optimal_action=best,
        optimal_value=best_value,
        gap_delta=min(positive) if positive else float("inf"),
        gap_max=max(gaps.values()),
        per_action_gaps=gaps,
        unique_optimal=n_best == 1,
    )
