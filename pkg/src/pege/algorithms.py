"""Learners: the PEGE framework, gap estimation, and PEGE2.

Learners talk to the world only through an interaction object exposing

* ``remaining``: rounds left before the horizon,
* ``horizon``: the total number of rounds (PEGE2 needs it up front),
* ``sweep(sigma, reps) -> (stacked_feedback, rounds_played)``: play every
  action of ``sigma`` ``reps`` times in turn, one fresh adversary draw per
  round; rows of the result are complete sweeps in the order of
  ``sigma.row_offsets``,
* ``play(action, rounds) -> rounds_played``: exploit without reading feedback.

Both calls stop silently at the horizon.
"""

from __future__ import annotations

import logging
import math
import sys
from dataclasses import dataclass, field
from itertools import count
from typing import Callable, Optional

import numpy as np

from .estimation import ThetaEstimate, confidence_width, recover_batch

log = logging.getLogger(__name__)

EXPLORE, EXPLOIT, GAP_ESTIMATION, TERMINAL_EXPLOIT = "explore", "exploit", "gap-estimation", "terminal-exploit"

# exp(C(.)) beyond this many rounds is effectively unbounded for any horizon
_ROUNDS_CAP = sys.maxsize


@dataclass(frozen=True)
class PegeParams:
    """Phase schedule: b^beta exploration sweeps, then ceil(exp(C(b^alpha)))
    exploitation rounds, where C is ``log`` or ``a -> h*a``."""

    alpha: float
    beta: float
    growth: str = "log"
    h: Optional[float] = None

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be non-negative")
        if self.growth not in ("log", "linear"):
            raise ValueError(f"unknown growth {self.growth!r}")
        if self.growth == "linear" and (self.h is None or self.h <= 0):
            raise ValueError("linear growth needs h > 0")

    @classmethod
    def theorem1(cls) -> "PegeParams":
        """Distribution-independent preset: C = log, alpha = 1/2, beta = 0."""
        return cls(0.5, 0.0, "log")

    @classmethod
    def theorem2(cls, h: float) -> "PegeParams":
        """Polylog preset: C(a) = h*a, alpha = 1, beta = 1."""
        return cls(1.0, 1.0, "linear", h)

    @classmethod
    def theorem5(cls, h: float) -> "PegeParams":
        """Log preset used inside PEGE2: C(a) = h*a, alpha = 1, beta = 0."""
        return cls(1.0, 0.0, "linear", h)

    def exploit_length(self, a: float) -> float:
        """exp(C(a)) as a real number."""
        if self.growth == "log":
            return a
        x = self.h * a
        return math.exp(x) if x < 700 else math.inf


@dataclass(frozen=True)
class PegePhasePlan:
    phase_index: int
    explore_reps: int
    exploit_rounds: int


def pege_phase_plan(b: int, params: PegeParams) -> PegePhasePlan:
    if b < 1:
        raise ValueError("phases are numbered from 1")
    reps = max(1, round(b**params.beta))
    length = params.exploit_length(b**params.alpha)
    rounds = _ROUNDS_CAP if math.isinf(length) else max(1, math.ceil(length))
    return PegePhasePlan(b, reps, rounds)


@dataclass
class Segment:
    start: int  # 1-based round of the first play
    length: int
    action: object
    tag: str


@dataclass
class GapOutcome:
    kind: str  # "estimate", "threshold_exceeded" or "truncated"
    stop_episode: int
    rounds_consumed: int
    theta_hat_final: np.ndarray
    delta_hat: Optional[float] = None
    width_at_stop: Optional[float] = None


@dataclass
class LearnerTrace:
    """Compressed record of play: consecutive rounds of one action form a
    segment."""

    segments: list = field(default_factory=list)
    theta_hat_snapshots: list = field(default_factory=list)
    phase_actions: list = field(default_factory=list)  # greedy action of each PEGE phase
    total_rounds: int = 0
    gap_outcome: Optional[GapOutcome] = None
    h: Optional[float] = None

    def record(self, action, length: int, tag: str):
        if length <= 0:
            return
        last = self.segments[-1] if self.segments else None
        if last is not None and last.tag == tag and last.action == action:
            last.length += length
        else:
            self.segments.append(Segment(self.total_rounds + 1, length, action, tag))
        self.total_rounds += length

    def rounds(self):
        """Expand segments into (round, action, tag) triples."""
        for seg in self.segments:
            for t in range(seg.start, seg.start + seg.length):
                yield t, seg.action, seg.tag

    def rounds_with_tag(self, tag: str) -> int:
        return sum(s.length for s in self.segments if s.tag == tag)


def _record_sweep(trace: LearnerTrace, sigma, reps: int, played: int, tag: str):
    for i, x in enumerate(sigma.actions):
        trace.record(x, min(reps, max(0, played - i * reps)), tag)


def pege_run(game, sigma, oracles, params: PegeParams, env,
             monitor: Optional[Callable] = None, clamp: bool = False,
             trace: Optional[LearnerTrace] = None) -> LearnerTrace:
    """Phased exploration with greedy exploitation until the horizon.

    Only ``oracles.argmax`` is used. ``monitor`` receives each batch of
    recovered moves (one row per sweep).
    """
    trace = LearnerTrace() if trace is None else trace
    estimate = ThetaEstimate.empty(game.dimension, clamp)
    for b in count(1):
        if env.remaining <= 0:
            break
        plan = pege_phase_plan(b, params)
        stacked, played = env.sweep(sigma, plan.explore_reps)
        _record_sweep(trace, sigma, plan.explore_reps, played, EXPLORE)
        if stacked.shape[0] < plan.explore_reps:
            break
        tildes = recover_batch(sigma, stacked)
        if monitor is not None:
            monitor(tildes)
        estimate.update(tildes)
        theta_hat = estimate.value()
        trace.theta_hat_snapshots.append(theta_hat)
        x = oracles.argmax(theta_hat)
        trace.phase_actions.append(x)
        trace.record(x, env.play(x, plan.exploit_rounds), EXPLOIT)
    return trace


def gap_estimation_run(game, sigma, oracles, T0: float, delta: float, env,
                       monitor: Optional[Callable] = None, clamp: bool = False,
                       trace: Optional[LearnerTrace] = None) -> GapOutcome:
    """Sweep sigma once per episode until the estimated gap clears 6 w(b),
    or report that episode count ``T0`` was exceeded."""
    if not oracles.has_secondmax:
        raise ValueError("gap estimation needs an arg-secondmax oracle")
    if T0 < 1:
        raise ValueError("T0 must be at least 1")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    R, beta = game.lipschitz_R, sigma.beta_sigma
    trace = LearnerTrace() if trace is None else trace
    estimate = ThetaEstimate.empty(game.dimension, clamp)
    used = 0
    for b in count(1):
        stacked, played = env.sweep(sigma, 1)
        used += played
        _record_sweep(trace, sigma, 1, played, GAP_ESTIMATION)
        if stacked.shape[0] == 0:
            return GapOutcome("truncated", b, used, estimate.value())
        tildes = recover_batch(sigma, stacked)
        if monitor is not None:
            monitor(tildes)
        estimate.update(tildes)
        theta_hat = estimate.value()
        best = oracles.argmax(theta_hat)
        runner_up = oracles.arg_secondmax(theta_hat, best)
        gap_hat = game.expected_reward(best, theta_hat) - game.expected_reward(runner_up, theta_hat)
        # gap_hat > 0 is exactly the uniqueness test on the argmax
        if gap_hat > 0:
            w = confidence_width(b, R, beta, delta)
            if gap_hat > 6 * w:
                return GapOutcome("estimate", b, used, theta_hat, gap_hat, w)
        if b > T0:
            return GapOutcome("threshold_exceeded", b, used, theta_hat)


def pege2_parameters(T: int, R: float, beta_sigma: float, sigma_size: int, Rmax: float) -> tuple:
    """Gap-estimation threshold T0 = (2 R beta T / (|sigma| Rmax))^(2/3) and delta = 1/T."""
    if min(T, R, beta_sigma, sigma_size, Rmax) <= 0:
        raise ValueError("all inputs must be positive")
    return (2 * R * beta_sigma * T / (sigma_size * Rmax)) ** (2 / 3), 1 / T


def pege2_run(game, sigma, oracles, env, monitor: Optional[Callable] = None,
              clamp: bool = False) -> LearnerTrace:
    """Gap estimation, then either PEGE tuned by the estimate or pure
    exploitation of the last estimate for the rest of the horizon."""
    T = env.horizon
    if T < 2:
        raise ValueError("PEGE2 needs a horizon of at least 2 rounds")
    R, beta = game.lipschitz_R, sigma.beta_sigma
    T0, delta = pege2_parameters(T, R, beta, sigma.size, game.reward_ceiling_Rmax)
    trace = LearnerTrace()
    outcome = gap_estimation_run(game, sigma, oracles, T0, delta, env, monitor, clamp, trace)
    trace.gap_outcome = outcome
    if outcome.kind == "threshold_exceeded":
        x = oracles.argmax(outcome.theta_hat_final)
        trace.phase_actions.append(x)
        trace.record(x, env.play(x, env.remaining), TERMINAL_EXPLOIT)
    elif outcome.kind == "estimate":
        trace.h = outcome.delta_hat**2 / (9 * R * R * beta * beta)
        pege_run(game, sigma, oracles, PegeParams.theorem5(trace.h), env, monitor, clamp, trace)
    return trace
