"""Conjugate Gaussian inference for linear-regression weights.

Beliefs are stored as ``(mean, precision)``. With a Gaussian likelihood of
known noise ``sigma`` and a Gaussian prior, every update is closed form:

    precision' = precision + phi phi^T / sigma^2
    mean'      = precision'^{-1} (precision mean + phi t / sigma^2)

All solves go through a Cholesky factor of the precision matrix.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg


@dataclass(frozen=True)
class NoiseModel:
    """Observation noise ``sigma`` and prior weight scale ``sigma_w``."""

    sigma: float = 0.1
    sigma_w: float = 10.0

    def __post_init__(self):
        for name in ("sigma", "sigma_w"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v}")


@dataclass(frozen=True, eq=False)
class GaussianBelief:
    mean: np.ndarray
    precision: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(-1)
        prec = np.array(self.precision, dtype=float)
        if prec.shape != (mean.size, mean.size):
            raise ValueError(f"precision shape {prec.shape} does not match mean length {mean.size}")
        if not np.all(np.isfinite(mean)):
            raise ValueError("belief mean must be finite")
        mean.flags.writeable = False
        prec.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "precision", prec)

    @property
    def dim(self) -> int:
        return self.mean.size

    def covariance(self) -> np.ndarray:
        c = linalg.cho_factor(self.precision, lower=True)
        return linalg.cho_solve(c, np.eye(self.dim))


def _cholesky(a: np.ndarray):
    try:
        return linalg.cho_factor(a, lower=True, check_finite=True)
    except linalg.LinAlgError as exc:
        raise RuntimeError("precision matrix is not positive definite") from exc


def prior_belief(m: int, noise: NoiseModel) -> GaussianBelief:
    """Zero-mean isotropic prior ``N(0, sigma_w^2 Id)``."""
    if m < 1:
        raise ValueError(f"dimension must be >= 1, got {m}")
    return GaussianBelief(np.zeros(m), np.eye(m) / noise.sigma_w**2)


def update_online(belief: GaussianBelief, phi_row, t: float, noise: NoiseModel) -> GaussianBelief:
    """Condition ``belief`` on one observation ``t`` with design row ``phi_row``."""
    phi = np.asarray(phi_row, dtype=float).reshape(-1)
    if phi.size != belief.dim:
        raise ValueError(f"design row has length {phi.size}, belief has dimension {belief.dim}")
    if not (np.all(np.isfinite(phi)) and np.isfinite(t)):
        raise ValueError("observation must be finite")
    s2 = noise.sigma**2
    prec = belief.precision + np.outer(phi, phi) / s2
    rhs = belief.precision @ belief.mean + phi * (t / s2)
    return GaussianBelief(linalg.cho_solve(_cholesky(prec), rhs), prec)


def update_batch(m: int, design, ts, noise: NoiseModel) -> GaussianBelief:
    """Posterior after conditioning the prior on all rows of ``design`` at once."""
    phi = np.asarray(design, dtype=float).reshape(-1, m) if np.size(design) else np.zeros((0, m))
    ts = np.asarray(ts, dtype=float).reshape(-1)
    if phi.shape[1] != m:
        raise ValueError(f"design has {phi.shape[1]} columns, expected {m}")
    if phi.shape[0] != ts.size:
        raise ValueError(f"design has {phi.shape[0]} rows but {ts.size} targets were given")
    s2 = noise.sigma**2
    prec = np.eye(m) / noise.sigma_w**2 + phi.T @ phi / s2
    mean = linalg.cho_solve(_cholesky(prec), phi.T @ ts / s2)
    return GaussianBelief(mean, prec)


def map_estimate(belief: GaussianBelief) -> np.ndarray:
    """Posterior mode; equal to the mean for a Gaussian."""
    return belief.mean.copy()


def ml_estimate(design, ts, noise: NoiseModel | None = None) -> np.ndarray:
    """Least-squares weights, independent of the prior.

    ``noise`` is accepted for signature symmetry with the MAP path and does
    not affect the result. Raises ``ValueError`` when ``Phi^T Phi`` is
    singular, since the maximum-likelihood estimate is then not unique.
    """
    phi = np.atleast_2d(np.asarray(design, dtype=float))
    ts = np.asarray(ts, dtype=float).reshape(-1)
    if phi.shape[0] != ts.size:
        raise ValueError(f"design has {phi.shape[0]} rows but {ts.size} targets were given")
    m = phi.shape[1]
    if phi.shape[0] < m or np.linalg.matrix_rank(phi) < m:
        raise ValueError("ML estimate undefined: design matrix is rank deficient (MAP still exists)")
    gram = phi.T @ phi
    try:
        c = linalg.cho_factor(gram, lower=True)
    except linalg.LinAlgError as exc:
        raise ValueError("ML estimate undefined: Phi^T Phi is not invertible") from exc
    return linalg.cho_solve(c, phi.T @ ts)
