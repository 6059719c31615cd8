"""Posterior over competing regression hypotheses, one data point at a time.

Parameter inference is online (each hypothesis keeps a Gaussian belief that
is updated per point). Model selection is not: the evidence of every
hypothesis is recomputed for the whole data seen so far, from the
accumulated sufficient statistics ``Phi^T Phi``, ``Phi^T t`` and ``t^T t``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import linalg

from . import basis as _basis
from ._backend import kernels
from .basis import BasisFamily, build_design_matrix, evaluate_basis, parse_hypothesis_spec
from .gaussian_posterior import GaussianBelief, NoiseModel, prior_belief, update_online
from .laplace import LOG_2PI, normalize_log_weights


@dataclass(frozen=True)
class Hypothesis:
    label: str
    family: BasisFamily
    log_prior: float

    @property
    def dim(self) -> int:
        return _basis.basis_dimension(self.family)


@dataclass(frozen=True, eq=False)
class HypothesisState:
    belief: GaussianBelief
    suffstat_phi_t_phi: np.ndarray
    suffstat_phi_t: np.ndarray
    suffstat_tt: float = 0.0
    n_seen: int = 0

    @classmethod
    def fresh(cls, m: int, noise: NoiseModel) -> "HypothesisState":
        return cls(prior_belief(m, noise), np.zeros((m, m)), np.zeros(m))

    def observe(self, phi: np.ndarray, t: float, noise: NoiseModel) -> "HypothesisState":
        return HypothesisState(
            update_online(self.belief, phi, t, noise),
            self.suffstat_phi_t_phi + np.outer(phi, phi),
            self.suffstat_phi_t + phi * t,
            self.suffstat_tt + t * t,
            self.n_seen + 1,
        )


def log_evidence_from_stats(gram, phi_t, tt: float, n: int, noise: NoiseModel) -> float:
    """Exact log evidence of the Gaussian linear model from sufficient statistics.

    At the MAP ``m = A^{-1} b`` (``b = Phi^T t / sigma^2``) the data-fit plus
    prior penalty collapses to ``t^T t / sigma^2 - b^T m``, so the raw data
    never has to be revisited.
    """
    gram = np.asarray(gram, dtype=float)
    m = gram.shape[0]
    s2 = noise.sigma**2
    a = gram / s2 + np.eye(m) / noise.sigma_w**2
    b = np.asarray(phi_t, dtype=float) / s2
    lower = linalg.cholesky(a, lower=True)
    z = linalg.solve_triangular(lower, b, lower=True)
    log_joint = (
        -0.5 * n * (LOG_2PI + math.log(s2))
        - 0.5 * m * (LOG_2PI + 2.0 * math.log(noise.sigma_w))
        - 0.5 * (tt / s2 - z @ z)
    )
    half_logdet = float(np.sum(np.log(np.diag(lower))))
    return float(log_joint - half_logdet + 0.5 * m * LOG_2PI)


@dataclass(frozen=True)
class Registry:
    """Hypotheses plus their per-hypothesis state. Updates return new registries."""

    hypotheses: tuple[Hypothesis, ...]
    states: tuple[HypothesisState, ...]
    noise: NoiseModel

    @property
    def labels(self) -> list[str]:
        return [h.label for h in self.hypotheses]

    @property
    def log_priors(self) -> np.ndarray:
        return np.array([h.log_prior for h in self.hypotheses])

    @property
    def n_seen(self) -> int:
        return self.states[0].n_seen

    def observe(self, x: float, t: float) -> "Registry":
        return observe(self, x, t)


def registry_create(spec: str | list[BasisFamily], noise: NoiseModel, log_priors=None) -> Registry:
    """Build a registry from a hypothesis-set string such as ``"poly:0..3,trig:1..3"``.

    Priors default to uniform; explicit ``log_priors`` are renormalized.
    """
    families = parse_hypothesis_spec(spec) if isinstance(spec, str) else list(spec)
    if not families:
        raise ValueError("at least one hypothesis is required")
    labels = [f.label for f in families]
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate hypothesis labels in {labels}")
    k = len(families)
    if log_priors is None:
        lp = np.full(k, -math.log(k))
    else:
        lp = np.asarray(log_priors, dtype=float)
        if lp.shape != (k,):
            raise ValueError(f"expected {k} log priors, got {lp.shape}")
        lp = np.log(normalize_log_weights(lp))
    hyps = tuple(Hypothesis(f.label, f, float(p)) for f, p in zip(families, lp))
    states = tuple(HypothesisState.fresh(h.dim, noise) for h in hyps)
    return Registry(hyps, states, noise)


def observe(registry: Registry, x: float, t: float) -> Registry:
    """Condition every hypothesis on one more point ``(x, t)``."""
    x, t = float(x), float(t)
    if not (math.isfinite(x) and math.isfinite(t)):
        raise ValueError(f"observation must be finite, got x={x}, t={t}")
    states = tuple(
        s.observe(evaluate_basis(h.family, x), t, registry.noise)
        for h, s in zip(registry.hypotheses, registry.states)
    )
    return replace(registry, states=states)


def model_log_evidences(registry: Registry, ts_so_far=None) -> np.ndarray:
    """Per-hypothesis log evidence of all data observed so far.

    ``ts_so_far`` is optional and only used to check that the registry has
    seen exactly that many points.
    """
    if ts_so_far is not None and len(ts_so_far) != registry.n_seen:
        raise ValueError(f"registry has seen {registry.n_seen} points, got {len(ts_so_far)} targets")
    if registry.n_seen == 0:
        return np.zeros(len(registry.hypotheses))
    return np.array(
        [
            log_evidence_from_stats(s.suffstat_phi_t_phi, s.suffstat_phi_t, s.suffstat_tt, s.n_seen, registry.noise)
            for s in registry.states
        ]
    )


def model_posterior(registry: Registry) -> np.ndarray:
    if registry.n_seen == 0:
        return np.exp(registry.log_priors)
    return normalize_log_weights(model_log_evidences(registry) + registry.log_priors)


def pick_winner(labels, posterior, dims) -> str:
    """Highest posterior; ties go to fewer parameters, then the smaller label."""
    best = min(range(len(labels)), key=lambda i: (-posterior[i], dims[i], labels[i]))
    return labels[best]


@dataclass
class SelectionTrajectory:
    """Posterior over hypotheses after each of the first ``n`` points."""

    labels: list[str]
    dims: list[int]
    log_priors: np.ndarray
    log_evidence: np.ndarray  # (N, K)
    posterior: np.ndarray  # (N, K)
    meta: dict = field(default_factory=dict)

    @property
    def n_steps(self) -> int:
        return self.posterior.shape[0]

    def step(self, n: int) -> np.ndarray:
        """Posterior after ``n`` points (1-based)."""
        if not 1 <= n <= self.n_steps:
            raise IndexError(f"step {n} outside 1..{self.n_steps}")
        return self.posterior[n - 1]

    def winner(self, n: int | None = None) -> str:
        n = self.n_steps if n is None else n
        return pick_winner(self.labels, self.step(n), self.dims)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", *self.labels])
        for i, row in enumerate(self.posterior, start=1):
            w.writerow([i, *(format(float(p), ".17g") for p in row)])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "labels": self.labels,
            "log_priors": [float(v) for v in self.log_priors],
            "meta": self.meta,
            "steps": [
                {
                    "n": i,
                    "log_evidence": dict(zip(self.labels, map(float, le))),
                    "posterior": dict(zip(self.labels, map(float, p))),
                }
                for i, (le, p) in enumerate(zip(self.log_evidence, self.posterior), start=1)
            ],
        }
        return json.dumps(doc, indent=1) + "\n"


def run_selection(spec, dataset, noise: NoiseModel, log_priors=None) -> SelectionTrajectory:
    """Model posterior after each prefix of ``dataset`` (an ordered list of ``(x, t)``)."""
    pairs = np.asarray(dataset, dtype=float).reshape(-1, 2) if len(dataset) else np.zeros((0, 2))
    if pairs.shape[0] == 0:
        raise ValueError("dataset is empty")
    bad = np.flatnonzero(~np.all(np.isfinite(pairs), axis=1))
    if bad.size:
        raise ValueError(f"non-finite value in data row {int(bad[0])}: {tuple(pairs[bad[0]])}")
    registry = registry_create(spec, noise, log_priors)
    xs, ts = pairs[:, 0], pairs[:, 1]
    log_ev = np.column_stack(
        [
            kernels.prefix_log_evidences(build_design_matrix(h.family, xs), ts, noise.sigma, noise.sigma_w)[1:]
            for h in registry.hypotheses
        ]
    )
    lp = registry.log_priors
    post = np.vstack([normalize_log_weights(row + lp) for row in log_ev])
    return SelectionTrajectory(
        labels=registry.labels,
        dims=[h.dim for h in registry.hypotheses],
        log_priors=lp,
        log_evidence=log_ev,
        posterior=post,
        meta={"sigma": noise.sigma, "sigma_w": noise.sigma_w},
    )
