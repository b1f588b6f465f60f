"""Learner/adversary interaction with pseudo-regret accounting."""

from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np

from . import algorithms as alg
from .bounds import check_theorem5_precondition
from .core import AdversaryDistribution, CountingOracles, gap_profile
from .environments import build_ranking_game, build_score_ranking_game, build_tabular_game
from .linalg import find_global_observable_set

log = logging.getLogger(__name__)

ALGORITHMS = ("pege-t1", "pege-t2", "pege-t5", "gap-estimation", "pege2")
ENVIRONMENTS = ("ranking", "score-ranking", "tabular")
ADVERSARIES = {"point": "point_mass", "bernoulli": "bernoulli_product", "beta": "independent_beta"}
RECOVERY_SLACK = 1e-9


class ConfigError(ValueError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, field_name: str, message: str, line: Optional[int] = None):
        self.field = field_name
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{field_name}: {message}")


class RecoveryBoundViolation(AssertionError):
    pass


def geometric_schedule(T: int, ratio: float = 1.25) -> list:
    """Rounds ceil(ratio^k) up to T, deduplicated, always ending at T."""
    points, k = set(), 0
    while True:
        t = math.ceil(ratio**k)
        if t >= T:
            break
        points.add(t)
        k += 1
    points.add(T)
    return sorted(points)


def default_means(n: int) -> list:
    """Evenly spaced descending means from 0.9 to 0.1 (0.5 for a single item)."""
    if n == 1:
        return [0.5]
    return [round(0.9 - 0.8 * i / (n - 1), 12) for i in range(n)]


@dataclass
class ExperimentConfig:
    env: str
    n: int
    algo: str
    horizon: int
    seeds: list
    adversary: str = "bernoulli"
    means: Optional[list] = None
    beta_a: Optional[list] = None
    beta_b: Optional[list] = None
    gains: Optional[list] = None
    reward_rows: Optional[list] = None
    observed: Optional[list] = None  # tabular: 1 = full-information feedback, 0 = none
    h: Optional[float] = None
    t0: Optional[float] = None
    delta: Optional[float] = None
    snapshots: Optional[list] = None
    clamp: bool = False

    def __post_init__(self):
        if self.means is None and self.adversary != "beta" and isinstance(self.n, int) and self.n >= 1:
            self.means = default_means(self.n)
        self.validate()

    def validate(self):
        if self.env not in ENVIRONMENTS:
            raise ConfigError("env", f"must be one of {', '.join(ENVIRONMENTS)}")
        if self.algo not in ALGORITHMS:
            raise ConfigError("algo", f"must be one of {', '.join(ALGORITHMS)}")
        if not isinstance(self.horizon, int) or self.horizon < 1:
            raise ConfigError("horizon", "must be a positive integer")
        if not self.seeds:
            raise ConfigError("seeds", "at least one seed required")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds", "seeds must be distinct")
        if self.adversary not in ADVERSARIES:
            raise ConfigError("adversary", f"must be one of {', '.join(ADVERSARIES)}")
        if self.env == "tabular":
            if not self.reward_rows:
                raise ConfigError("reward_rows", "required for the tabular environment")
            widths = {len(r) for r in self.reward_rows}
            if widths != {self.n}:
                raise ConfigError("reward_rows", f"every row needs n = {self.n} entries")
            if self.observed is not None and (len(self.observed) != len(self.reward_rows)
                                              or set(self.observed) - {0, 1}):
                raise ConfigError("observed", "one 0/1 flag per reward row")
        elif self.n < (1 if self.env == "score-ranking" else 2):
            raise ConfigError("n", "too few items")
        if self.adversary == "beta":
            for name in ("beta_a", "beta_b"):
                v = getattr(self, name)
                if v is None or len(v) != self.n:
                    raise ConfigError(name, f"needs {self.n} positive shape values")
        else:
            if self.means is None or len(self.means) != self.n:
                raise ConfigError("means", f"needs {self.n} values")
            if any(not 0 <= m <= 1 for m in self.means):
                raise ConfigError("means", "values must lie in [0, 1]")
        if self.gains is not None and len(self.gains) != self.n:
            raise ConfigError("gains", f"needs {self.n} values")
        if self.algo in ("pege-t2", "pege-t5") and (self.h is None or self.h <= 0):
            raise ConfigError("h", f"{self.algo} needs a positive h")
        if self.algo == "gap-estimation":
            if self.t0 is None or self.t0 < 1:
                raise ConfigError("t0", "gap-estimation needs t0 >= 1")
            if self.delta is None or not 0 < self.delta < 1:
                raise ConfigError("delta", "gap-estimation needs delta in (0, 1)")
        if self.algo == "pege2" and self.horizon < 2:
            raise ConfigError("horizon", "pege2 needs at least 2 rounds")
        if self.algo in ("gap-estimation", "pege2") and self.env == "score-ranking":
            raise ConfigError("algo", "score-ranking has no arg-secondmax oracle")
        if self.snapshots is not None:
            s = list(self.snapshots)
            if s != sorted(set(s)) or s[0] < 1 or s[-1] > self.horizon:
                raise ConfigError("snapshots", "must be increasing rounds within the horizon")

    def fingerprint(self) -> str:
        """Stable hash of everything except the seed list."""
        items = [(f.name, getattr(self, f.name)) for f in fields(self) if f.name != "seeds"]
        return hashlib.sha256(repr(items).encode()).hexdigest()[:16]

    def schedule(self) -> list:
        return list(self.snapshots) if self.snapshots is not None else geometric_schedule(self.horizon)


def build_environment(config: ExperimentConfig):
    """(game, oracles, sigma candidates, adversary) for a config."""
    if config.env == "ranking":
        game, oracles, cands = build_ranking_game(config.n, config.gains)
    elif config.env == "score-ranking":
        game, oracles, cands = build_score_ranking_game(config.n)
    else:
        flags = config.observed or [1] * len(config.reward_rows)
        mats = [np.eye(config.n) if f else np.zeros((1, config.n)) for f in flags]
        game, oracles, cands = build_tabular_game(config.reward_rows, mats)
    kind = ADVERSARIES[config.adversary]
    if kind == "independent_beta":
        adversary = AdversaryDistribution.beta(config.beta_a, config.beta_b)
    else:
        adversary = AdversaryDistribution(kind, config.means)
    return game, oracles, cands, adversary


class Interaction:
    """Plays a learner's choices against i.i.d. adversary draws.

    Keeps the privileged side of the game: the adversary mean, per-action
    pseudo-regret, and the cumulative-regret snapshots. The learner only
    ever sees feedback vectors.
    """

    def __init__(self, game, adversary, horizon, rng, snapshots=(), optimal_value=None):
        self.game = game
        self.adversary = adversary
        self.horizon = int(horizon)
        self.rng = rng
        self.t = 0
        self.cum_regret = 0.0
        self._theta_star = np.array(adversary.mean)
        if optimal_value is None:
            optimal_value = game.expected_reward(self._best_action(), self._theta_star)
        self.optimal_value = optimal_value
        self._gap_cache = {}
        self._snapshots = list(snapshots)
        self._next = 0
        self.curve = []

    def _best_action(self):
        return max(self.game.actions(), key=lambda x: self.game.expected_reward(x, self._theta_star))

    @property
    def remaining(self) -> int:
        return self.horizon - self.t

    def action_gap(self, x) -> float:
        gap = self._gap_cache.get(x)
        if gap is None:
            # rounding can push a co-optimal action a hair above the optimum
            gap = max(0.0, self.optimal_value - self.game.expected_reward(x, self._theta_star))
            if len(self._gap_cache) < 100_000:
                self._gap_cache[x] = gap
        return gap

    def _advance(self, x, k: int):
        gap = self.action_gap(x)
        end = self.t + k
        while self._next < len(self._snapshots) and self._snapshots[self._next] <= end:
            s = self._snapshots[self._next]
            self.curve.append((s, self.cum_regret + (s - self.t) * gap))
            self._next += 1
        self.cum_regret += k * gap
        self.t = end

    def play(self, x, rounds: int = 1) -> int:
        k = max(0, min(int(rounds), self.remaining))
        if k:
            self._advance(x, k)
        return k

    def sweep(self, sigma, reps: int = 1):
        total = min(reps * sigma.size, self.remaining)
        draws = self.adversary.sample(self.rng, total) if total else np.empty((0, self.game.dimension))
        complete = reps if total == reps * sigma.size else 0
        stacked = np.empty((complete, sigma.stacked_matrix.shape[0]))
        for i, (x, (lo, hi)) in enumerate(zip(sigma.actions, sigma.row_offsets)):
            k = min(reps, max(0, total - i * reps))
            if k == 0:
                break
            self._advance(x, k)
            if complete:
                block = draws[i * reps:(i + 1) * reps]
                stacked[:, lo:hi] = block @ np.asarray(self.game.feedback_matrix(x)).T
        return stacked, total


@dataclass
class RegretCurve:
    rounds: np.ndarray
    cum_regret: np.ndarray
    seed: int
    fingerprint: str
    oracle_calls: dict
    beta_sigma: float
    sigma: tuple
    gap: Optional[float] = None
    gap_outcome: Optional[str] = None
    stop_episode: Optional[int] = None
    delta_hat: Optional[float] = None
    h: Optional[float] = None
    max_recovery_error: float = 0.0
    recoveries: int = 0
    exploit_fraction_optimal: Optional[float] = None
    trace: Optional[alg.LearnerTrace] = field(default=None, repr=False)

    @property
    def final_regret(self) -> float:
        return float(self.cum_regret[-1])


class RecoveryMonitor:
    """Checks every recovered move against the deterministic beta_sigma bound."""

    def __init__(self, theta_star, beta_sigma, slack=RECOVERY_SLACK):
        self.theta_star = np.asarray(theta_star, dtype=float)
        self.limit = beta_sigma + slack
        self.max_error = 0.0
        self.count = 0

    def __call__(self, tildes):
        errs = np.linalg.norm(np.atleast_2d(tildes) - self.theta_star, axis=1)
        self.count += errs.shape[0]
        worst = float(errs.max())
        self.max_error = max(self.max_error, worst)
        if worst > self.limit:
            raise RecoveryBoundViolation(
                f"recovered move at distance {worst:.6g} exceeds beta_sigma bound {self.limit:.6g}")


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 stream for one run."""
    return np.random.Generator(np.random.PCG64(seed))


def run_single(config: ExperimentConfig, seed: int, keep_trace: bool = False) -> RegretCurve:
    game, oracles, cands, adversary = build_environment(config)
    sigma = find_global_observable_set(game, cands)
    theta_star = np.array(adversary.mean)
    profile = gap_profile(game, theta_star) if game.is_finite else None
    if profile is not None:
        opt_value = profile.optimal_value
    else:
        opt_value = game.expected_reward(oracles.argmax(theta_star), theta_star)
    counting = CountingOracles(oracles)
    monitor = RecoveryMonitor(theta_star, sigma.beta_sigma)
    env = Interaction(game, adversary, config.horizon, make_rng(seed), config.schedule(), opt_value)

    R = game.lipschitz_R
    if config.algo == "pege-t5" and profile is not None and math.isfinite(profile.gap_delta):
        check_theorem5_precondition(config.h, profile.gap_delta, R, sigma.beta_sigma)

    outcome = None
    if config.algo in ("pege-t1", "pege-t2", "pege-t5"):
        params = {
            "pege-t1": alg.PegeParams.theorem1,
            "pege-t2": lambda: alg.PegeParams.theorem2(config.h),
            "pege-t5": lambda: alg.PegeParams.theorem5(config.h),
        }[config.algo]()
        trace = alg.pege_run(game, sigma, counting, params, env, monitor, config.clamp)
    elif config.algo == "gap-estimation":
        trace = alg.LearnerTrace()
        outcome = alg.gap_estimation_run(game, sigma, counting, config.t0, config.delta, env,
                                         monitor, config.clamp, trace)
        trace.gap_outcome = outcome
    else:
        trace = alg.pege2_run(game, sigma, counting, env, monitor, config.clamp)
        outcome = trace.gap_outcome

    exploit_opt = None
    exploit_rounds = [s for s in trace.segments if s.tag in (alg.EXPLOIT, alg.TERMINAL_EXPLOIT)]
    if exploit_rounds:
        total = sum(s.length for s in exploit_rounds)
        good = sum(s.length for s in exploit_rounds if env.action_gap(s.action) == 0)
        exploit_opt = good / total

    rounds, regret = zip(*env.curve) if env.curve else ((), ())
    return RegretCurve(
        rounds=np.array(rounds, dtype=np.int64),
        cum_regret=np.array(regret, dtype=float),
        seed=seed,
        fingerprint=config.fingerprint(),
        oracle_calls=dict(counting.calls),
        beta_sigma=sigma.beta_sigma,
        sigma=sigma.actions,
        gap=profile.gap_delta if profile is not None else None,
        gap_outcome=outcome.kind if outcome else None,
        stop_episode=outcome.stop_episode if outcome else None,
        delta_hat=outcome.delta_hat if outcome else None,
        h=trace.h,
        max_recovery_error=monitor.max_error,
        recoveries=monitor.count,
        exploit_fraction_optimal=exploit_opt,
        trace=trace if keep_trace else None,
    )


def aggregate(curves):
    """Pointwise mean and standard error (ddof=1; zero for a single curve)."""
    if not curves:
        raise ValueError("no curves to aggregate")
    rounds = curves[0].rounds
    for c in curves[1:]:
        if not np.array_equal(c.rounds, rounds):
            raise ValueError("curves have mismatched snapshot schedules")
    values = np.vstack([c.cum_regret for c in curves])
    mean = values.mean(axis=0)
    if len(curves) == 1:
        stderr = np.zeros_like(mean)
    else:
        stderr = values.std(axis=0, ddof=1) / math.sqrt(len(curves))
    return rounds, mean, stderr


def fit_scaling_exponent(rounds, regret, t_min: float, t_max: float = math.inf) -> float:
    """Least-squares slope of log(regret) against log(t) over t in [t_min, t_max]."""
    t = np.asarray(rounds, dtype=float)
    r = np.asarray(regret, dtype=float)
    keep = (t >= t_min) & (t <= t_max) & (r > 0)
    if keep.sum() < 5:
        raise ValueError(f"need at least 5 positive snapshots in range, have {int(keep.sum())}")
    slope, _ = np.polyfit(np.log(t[keep]), np.log(r[keep]), 1)
    return float(slope)
