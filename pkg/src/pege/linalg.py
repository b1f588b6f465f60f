"""Small dense linear algebra for global observable sets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_RANK_TOL = 1e-10


class RankDeficientError(np.linalg.LinAlgError):
    pass


class GlobalObservabilityError(Exception):
    """The candidate actions never reach full column rank."""


def _as_matrix(M) -> np.ndarray:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        raise ValueError("empty matrix")
    return M


def matrix_rank(M, tol: float = DEFAULT_RANK_TOL) -> int:
    """Count singular values above ``tol`` times the largest one."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = np.linalg.svd(_as_matrix(M), compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def pseudoinverse(M, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a full-column-rank matrix.

    Computed from the thin SVD; at full column rank this equals
    ``(M^T M)^{-1} M^T``. Rank deficiency raises instead of silently
    truncating singular values.
    """
    M = _as_matrix(M)
    n = M.shape[1]
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(s > tol * s[0])) if s[0] > 0 else 0
    if rank < n:
        raise RankDeficientError(f"matrix has rank {rank} < {n} columns")
    return (Vt.T / s) @ U.T


def spectral_norm(M) -> float:
    return float(np.linalg.norm(_as_matrix(M), ord=2))


def compute_beta_sigma(matrices: Sequence[np.ndarray], tol: float = DEFAULT_RANK_TOL) -> float:
    """sqrt(n) * sum_k ||(M_s^T M_s)^{-1} M_k^T M_k||_2 for the stacked M_s."""
    matrices = [_as_matrix(M) for M in matrices]
    stacked = np.vstack(matrices)
    n = stacked.shape[1]
    if matrix_rank(stacked, tol) < n:
        raise RankDeficientError("stacked feedback matrix is not full column rank")
    gram = stacked.T @ stacked
    total = sum(spectral_norm(np.linalg.solve(gram, M.T @ M)) for M in matrices)
    return float(np.sqrt(n) * total)


@dataclass(frozen=True)
class GlobalObservableSet:
    actions: tuple
    stacked_matrix: np.ndarray
    pseudoinverse: np.ndarray
    beta_sigma: float
    row_offsets: tuple  # (start, stop) row range of each action in stacked_matrix

    @property
    def size(self) -> int:
        return len(self.actions)

    @property
    def dimension(self) -> int:
        return self.stacked_matrix.shape[1]

    @property
    def row_counts(self) -> tuple:
        return tuple(stop - start for start, stop in self.row_offsets)

    @classmethod
    def from_actions(cls, game, actions: Iterable, tol: float = DEFAULT_RANK_TOL):
        actions = tuple(actions)
        matrices = [_as_matrix(game.feedback_matrix(x)) for x in actions]
        stacked = np.vstack(matrices)
        offsets, start = [], 0
        for M in matrices:
            offsets.append((start, start + M.shape[0]))
            start += M.shape[0]
        pinv = pseudoinverse(stacked, tol)
        beta = compute_beta_sigma(matrices, tol)
        stacked.setflags(write=False)
        pinv.setflags(write=False)
        return cls(actions, stacked, pinv, beta, tuple(offsets))


def find_global_observable_set(game, candidates: Iterable, tol: float = DEFAULT_RANK_TOL) -> GlobalObservableSet:
    """Greedy scan: keep a candidate iff it strictly increases the stacked rank."""
    n = game.dimension
    chosen, rows, rank = [], [], 0
    for x in candidates:
        M = _as_matrix(game.feedback_matrix(x))
        if M.shape[1] != n:
            raise ValueError(f"feedback matrix of {x!r} has {M.shape[1]} columns, expected {n}")
        trial = np.vstack(rows + [M])
        new_rank = matrix_rank(trial, tol)
        if new_rank > rank:
            chosen.append(x)
            rows.append(M)
            rank = new_rank
            if rank == n:
                return GlobalObservableSet.from_actions(game, chosen, tol)
    raise GlobalObservabilityError(
        f"candidates exhausted at rank {rank} < {n}; game is not globally observable"
    )
