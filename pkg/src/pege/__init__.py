"""Phased exploration learners for stochastic combinatorial partial monitoring."""

from .core import (ActionId, AdversaryDistribution, CountingOracles, Game, GapProfile,
                   Oracles, UnsupportedOperation, expected_reward, gap_profile)
from .linalg import (GlobalObservabilityError, GlobalObservableSet, RankDeficientError,
                     compute_beta_sigma, find_global_observable_set, matrix_rank,
                     pseudoinverse, spectral_norm)
from .estimation import (ThetaEstimate, confidence_width, recover_batch, recover_theta_tilde,
                         theory_thresholds, update_mean)
from .algorithms import (GapOutcome, LearnerTrace, PegeParams, PegePhasePlan,
                         gap_estimation_run, pege2_parameters, pege2_run, pege_phase_plan,
                         pege_run)
from .bounds import regret_bound_B1, regret_bound_B2
from .environments import (RankingGame, ScoreRankingGame, TabularGame, build_ranking_game,
                           build_score_ranking_game, build_tabular_game, dcg_gain,
                           ranking_argmax, ranking_secondmax, score_ranking_argmax)
from .simulator import (ExperimentConfig, RegretCurve, aggregate, fit_scaling_exponent,
                        run_single)

__version__ = "0.1.0"
