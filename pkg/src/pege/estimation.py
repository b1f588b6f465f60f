"""Recovering adversary moves from stacked feedback and averaging them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import GlobalObservableSet


def stack_feedbacks(sigma: GlobalObservableSet, feedbacks) -> np.ndarray:
    """Concatenate one feedback vector per sigma action, checking lengths."""
    if len(feedbacks) != sigma.size:
        raise ValueError(f"expected {sigma.size} feedback vectors, got {len(feedbacks)}")
    parts = []
    for k, (fb, m) in enumerate(zip(feedbacks, sigma.row_counts)):
        fb = np.atleast_1d(np.asarray(fb, dtype=float))
        if fb.shape != (m,):
            raise ValueError(f"feedback {k} has length {fb.shape[0]}, expected {m}")
        parts.append(fb)
    return np.concatenate(parts)


def recover_theta_tilde(sigma: GlobalObservableSet, feedbacks) -> np.ndarray:
    """Apply the pseudoinverse of the stacked matrix to one sweep of feedback."""
    return sigma.pseudoinverse @ stack_feedbacks(sigma, feedbacks)


def recover_batch(sigma: GlobalObservableSet, stacked: np.ndarray) -> np.ndarray:
    """Vectorized recovery: ``stacked`` has one concatenated sweep per row."""
    stacked = np.asarray(stacked, dtype=float)
    if stacked.ndim != 2 or stacked.shape[1] != sigma.stacked_matrix.shape[0]:
        raise ValueError(
            f"stacked feedback shape {stacked.shape} does not match "
            f"{sigma.stacked_matrix.shape[0]} rows of M_sigma"
        )
    return stacked @ sigma.pseudoinverse.T


@dataclass
class ThetaEstimate:
    """Running arithmetic mean of recovered adversary moves."""

    theta_hat: np.ndarray
    sample_count: int = 0
    clamped: bool = False

    @classmethod
    def empty(cls, n: int, clamp: bool = False) -> "ThetaEstimate":
        return cls(np.zeros(n), 0, clamp)

    def update(self, theta_tilde) -> "ThetaEstimate":
        """Fold in one recovery, or a 2-d batch of recoveries (one per row)."""
        batch = np.atleast_2d(np.asarray(theta_tilde, dtype=float))
        if batch.shape[1] != self.theta_hat.shape[0]:
            raise ValueError("dimension mismatch")
        k = batch.shape[0]
        total = self.sample_count + k
        if k == 1:
            self.theta_hat = self.theta_hat + (batch[0] - self.theta_hat) / total
        else:
            self.theta_hat = self.theta_hat + (batch.mean(axis=0) - self.theta_hat) * (k / total)
        self.sample_count = total
        return self

    def value(self) -> np.ndarray:
        """The estimate handed to oracles (clamped to the cube if requested)."""
        if self.clamped:
            return np.clip(self.theta_hat, 0.0, 1.0)
        return self.theta_hat.copy()


def update_mean(state: ThetaEstimate, theta_tilde) -> ThetaEstimate:
    return state.update(theta_tilde)


def confidence_width(b: int, R: float, beta_sigma: float, delta: float) -> float:
    """w(b) = sqrt(R^2 beta^2 log(4 e^2 b^2 / delta) / b)."""
    if b < 1:
        raise ValueError("episode index must be >= 1")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if R <= 0 or beta_sigma <= 0:
        raise ValueError("R and beta_sigma must be positive")
    return math.sqrt(R * R * beta_sigma * beta_sigma * math.log(4 * math.e**2 * b * b / delta) / b)


def theory_thresholds(gap: float, R: float, beta_sigma: float, delta: float) -> tuple:
    """Episode counts (T1, T2) from the gap-estimation guarantee."""
    if gap <= 0:
        raise ValueError("gap must be positive")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    c = R * R * beta_sigma * beta_sigma / (gap * gap)
    t1 = 256 * c * math.log(512 * math.e**2 * c / delta)
    t2 = 16 * c * math.log(4 * math.e**2 / delta)
    return t1, t2
