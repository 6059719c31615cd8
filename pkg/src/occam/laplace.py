"""Laplace-method evidence and the Gaussian-linear closed form it must match.

Everything here works with natural logarithms. Determinants are taken from
Cholesky diagonals; ``det(A / 2 pi)`` itself underflows long before ``A``
gets interesting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .gaussian_posterior import NoiseModel

LOG_2PI = math.log(2.0 * math.pi)


class LaplaceError(ValueError):
    """Raised when the Hessian at the MAP is not positive definite."""


@dataclass(frozen=True)
class LaplaceInput:
    log_joint_at_map: float
    hessian: np.ndarray

    @property
    def dim(self) -> int:
        return int(np.shape(self.hessian)[0])


def logdet_spd(a) -> float:
    """``log det(a)`` for a symmetric positive definite matrix via Cholesky."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return 0.0
    try:
        lower = linalg.cholesky(a, lower=True)
    except linalg.LinAlgError as exc:
        raise LaplaceError("Laplace approximation invalid at this MAP: Hessian is not positive definite") from exc
    return 2.0 * float(np.sum(np.log(np.diag(lower))))


def laplace_log_evidence(log_joint_at_map: float | LaplaceInput, hessian=None) -> float:
    """Log evidence ``log_joint - 0.5 logdet(A) + (d/2) log(2 pi)``.

    Accepts either a :class:`LaplaceInput` or the two fields separately.
    """
    if isinstance(log_joint_at_map, LaplaceInput):
        hessian = log_joint_at_map.hessian
        log_joint_at_map = log_joint_at_map.log_joint_at_map
    a = np.atleast_2d(np.asarray(hessian, dtype=float))
    if a.shape[0] != a.shape[1]:
        raise LaplaceError(f"Hessian must be square, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=1e-10, atol=0.0):
        raise LaplaceError("Laplace approximation invalid at this MAP: Hessian is not symmetric")
    d = a.shape[0]
    value = float(log_joint_at_map) - 0.5 * logdet_spd(a) + 0.5 * d * LOG_2PI
    if not math.isfinite(value):
        raise LaplaceError(f"non-finite log evidence {value}")
    return value


def regression_hessian(design, noise: NoiseModel) -> np.ndarray:
    """``Phi^T Phi / sigma^2 + Id / sigma_w^2``; the same at every ``w``."""
    phi = np.atleast_2d(np.asarray(design, dtype=float))
    m = phi.shape[1]
    return phi.T @ phi / noise.sigma**2 + np.eye(m) / noise.sigma_w**2


def regression_log_joint(w, design, ts, noise: NoiseModel) -> float:
    """``ln p(t | w) + ln p(w)`` for the Gaussian linear model with zero-mean prior."""
    w = np.asarray(w, dtype=float).reshape(-1)
    phi = np.atleast_2d(np.asarray(design, dtype=float)).reshape(-1, w.size)
    ts = np.asarray(ts, dtype=float).reshape(-1)
    n, m = phi.shape
    resid = ts - phi @ w
    log_lik = -0.5 * n * (LOG_2PI + 2.0 * math.log(noise.sigma)) - resid @ resid / (2.0 * noise.sigma**2)
    log_prior = -0.5 * m * (LOG_2PI + 2.0 * math.log(noise.sigma_w)) - w @ w / (2.0 * noise.sigma_w**2)
    return float(log_lik + log_prior)


def gaussian_exact_log_evidence(design, ts, noise: NoiseModel) -> float:
    """Log density of ``ts`` under ``N(0, sigma^2 Id + sigma_w^2 Phi Phi^T)``.

    Independent of the Laplace path: works in data space (N x N) rather than
    weight space (M x M).
    """
    ts = np.asarray(ts, dtype=float).reshape(-1)
    n = ts.size
    if n == 0:
        return 0.0
    phi = np.asarray(design, dtype=float).reshape(n, -1)
    cov = noise.sigma**2 * np.eye(n) + noise.sigma_w**2 * (phi @ phi.T)
    lower = linalg.cholesky(cov, lower=True)
    z = linalg.solve_triangular(lower, ts, lower=True)
    return float(-0.5 * (z @ z) - np.sum(np.log(np.diag(lower))) - 0.5 * n * LOG_2PI)


def normalize_log_weights(log_weights) -> np.ndarray:
    """Turn unnormalized log weights into probabilities with a max shift.

    Entries equal to ``-inf`` get probability exactly 0.
    """
    lw = np.asarray(log_weights, dtype=float)
    if lw.size == 0:
        return lw.copy()
    if np.all(np.isneginf(lw)):
        raise ValueError("all hypotheses have zero weight")
    # divide rather than subtract logsumexp: keeps the sum within a few ulp of 1
    w = np.exp(lw - np.max(lw))
    return w / w.sum()
