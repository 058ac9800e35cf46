"""Leverage and cross-leverage scores of the row-stacked matrix [X, y]^T.

For a dataset with n observations and p variables the scores are read off
the orthogonal projector H onto the column space of the (p+1) x n matrix
whose first p rows are the variables across observations and whose last
row is the response.  H is never formed in the production path: a thin
Householder factorization with column pivoting gives an orthonormal
Q of shape (p+1) x r (r = effective rank), and

    leverage_i        = ||Q[i, :]||^2        (diagonal of H)
    cross_leverage_i  = <Q[i, :], Q[p, :]>   (last column of H)

so the cost is O(p n^2) time and O(p n) memory instead of O(p^2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dataset import Dataset

# Effective rank: |R_kk| above EPS_SCALE * machine-eps * max|R_kk| * max(dims).
EPS_SCALE = 100.0

DEFAULT_DENSE_CAP = 2000


class DegenerateResponseError(ValueError):
    """The response row is numerically zero; scores against it are meaningless."""


class RankZeroError(ValueError):
    """The stacked matrix is numerically zero and has no column space."""


@dataclass
class ScoreSet:
    """Per-variable leverage and response cross-leverage scores.

    ``rank`` is the effective numerical rank of the stacked matrix and
    ``rank_deficient`` flags instances whose rank fell short of
    min(p+1, n), e.g. because of duplicated observations; the projector
    and the scores remain well defined through the rank-r factorization.
    """

    leverage: np.ndarray
    cross_leverage: np.ndarray
    response_leverage: float
    rank: int
    rank_deficient: bool = False

    @property
    def p(self) -> int:
        return self.leverage.shape[0]


def augment(dataset: Dataset) -> np.ndarray:
    """Stack variables and response into the (p+1) x n scoring matrix.

    Row i < p holds variable i across observations; row p is the response.
    """
    return np.vstack(
        [dataset.x.T.astype(np.float64), dataset.y.astype(np.float64)[None, :]]
    )


def _thin_factor(rows: np.ndarray):
    """Pivoted economic QR; returns (Q restricted to the effective rank, rank)."""
    q, r, _ = scipy.linalg.qr(rows, mode="economic", pivoting=True, check_finite=False)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0.0:
        raise RankZeroError("matrix is numerically zero; no scores exist")
    tol = EPS_SCALE * np.finfo(np.float64).eps * diag[0] * max(rows.shape)
    rank = int(np.count_nonzero(diag > tol))
    return q[:, :rank], rank


def matrix_scores(rows: np.ndarray) -> ScoreSet:
    """Scores of an already-stacked matrix whose last row is the response.

    Exposed separately from :func:`compute_scores` so callers can score
    transformed matrices (the projector only depends on the column space).
    """
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[0] < 2:
        raise ValueError(f"need a 2-d matrix with at least 2 rows, got {rows.shape}")
    if not np.any(rows):
        raise RankZeroError("matrix is numerically zero; no scores exist")
    if not np.any(rows[-1]):
        raise DegenerateResponseError("response row is numerically zero")
    q, rank = _thin_factor(rows)
    leverage = np.einsum("ij,ij->i", q, q)
    cross = q[:-1] @ q[-1]
    return ScoreSet(
        leverage=leverage[:-1],
        cross_leverage=cross,
        response_leverage=float(leverage[-1]),
        rank=rank,
        rank_deficient=rank < min(rows.shape),
    )


def compute_scores(dataset: Dataset) -> ScoreSet:
    """Leverage and cross-leverage scores for every variable of a dataset."""
    return matrix_scores(augment(dataset))


def hat_matrix_dense(dataset: Dataset, max_p: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """Full (p+1) x (p+1) projector, for debugging and cross-checks only.

    Refuses to run for p above ``max_p``; the production scoring path never
    materializes this matrix.
    """
    if dataset.p > max_p:
        raise ValueError(
            f"dense projector refused: p={dataset.p} exceeds the cap of {max_p}"
        )
    rows = augment(dataset)
    if not np.any(rows):
        raise RankZeroError("matrix is numerically zero; no scores exist")
    if not np.any(rows[-1]):
        raise DegenerateResponseError("response row is numerically zero")
    q, _ = _thin_factor(rows)
    return q @ q.T
