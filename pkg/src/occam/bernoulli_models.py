"""Model comparison for Bernoulli count data.

Coin
    ``H0``: fair coin. ``H1``: ``P(0) = r`` with ``r ~ Uniform(0, 1)``.
    Outcome ``0`` is "heads". The state is the pair ``(N, K)`` with ``K`` the
    number of zeros.

Contingency
    Four cells indexed by (victim race, defendant race), each holding
    ``(deaths, non_deaths)``. The four hypotheses differ in how the cells
    share a death probability; all parameters have uniform priors, so each
    group's evidence is a beta integral.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import expit, gammaln

from .laplace import LOG_2PI, normalize_log_weights

LN2 = math.log(2.0)


def beta_log_evidence(k: int, n: int) -> float:
    """``ln of integral_0^1 r^k (1-r)^(n-k) dr = -ln(n+1) - ln C(n, k)``."""
    k, n = int(k), int(n)
    if n < 0 or k < 0 or k > n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    return float(gammaln(k + 1) + gammaln(n - k + 1) - gammaln(n + 2))


# -- coin --------------------------------------------------------------------


@dataclass(frozen=True)
class CoinState:
    n_total: int = 0
    n_zeros: int = 0

    def __post_init__(self):
        if not (0 <= self.n_zeros <= self.n_total):
            raise ValueError(f"need 0 <= K <= N, got N={self.n_total}, K={self.n_zeros}")

    @classmethod
    def from_bits(cls, bits) -> "CoinState":
        bits = _as_bits(bits)
        return cls(int(bits.size), int(bits.size - bits.sum()))

    def advance(self, bit: int) -> "CoinState":
        return CoinState(self.n_total + 1, self.n_zeros + (1 if bit == 0 else 0))


@dataclass(frozen=True)
class CoinPosterior:
    """Posterior log odds ``ln p(H0|t) - ln p(H1|t)``."""

    log_odds_fair: float = 0.0

    @property
    def p_fair(self) -> float:
        return float(expit(self.log_odds_fair))

    @property
    def p_bent(self) -> float:
        return float(expit(-self.log_odds_fair))


def _as_bits(bits) -> np.ndarray:
    arr = np.asarray(bits).reshape(-1)
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        bad = int(np.flatnonzero((arr != 0) & (arr != 1))[0])
        raise ValueError(f"invalid bit {arr[bad]!r} at position {bad}")
    return arr.astype(np.int8)


def coin_posterior_batch(state: CoinState, prior_log_odds: float = 0.0) -> CoinPosterior:
    """Log odds for H0 from the full counts: ``prior - N ln 2 - ln evidence(H1)``."""
    n, k = state.n_total, state.n_zeros
    return CoinPosterior(prior_log_odds - n * LN2 - beta_log_evidence(k, n))


def coin_update_quasi_iterative(
    posterior: CoinPosterior, state: CoinState, t_new: int
) -> tuple[CoinPosterior, CoinState]:
    """Exact one-toss update of the log odds using only the counts.

    The factor is ``(N+2)/(2K+2)`` for a zero and ``(N+2)/(2(N+1-K))`` for a
    one; no large numbers appear.
    """
    if t_new not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {t_new!r}")
    n, k = state.n_total, state.n_zeros
    if t_new == 0:
        step = math.log((n + 2) / (2 * k + 2))
    else:
        step = math.log((n + 2) / (2 * (n + 1 - k)))
    return CoinPosterior(posterior.log_odds_fair + step), state.advance(t_new)


def coin_update_naive_iterative(posterior: CoinPosterior, t_new: int) -> CoinPosterior:
    """The *incorrect* online model-selection update, kept as a demonstration.

    It multiplies the odds by ``p(t'|H0) / p(t'|H1)``, the marginal
    single-toss predictive of each model. Both are 1/2, so the odds never
    move whatever the data. Do not use this for inference.
    """
    if t_new not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {t_new!r}")
    # p(t'|H0) = p(t'|H1) = 1/2 exactly: factor is 1
    return posterior


def coin_trajectory(bits, prior_log_odds: float = 0.0) -> np.ndarray:
    """Log odds for H0 after each toss (length ``len(bits)``)."""
    from ._backend import kernels

    return kernels.coin_log_odds_path(_as_bits(bits), float(prior_log_odds))


# -- contingency ---------------------------------------------------------------

CELLS = ("VM", "VbarM", "VMbar", "VbarMbar")


@dataclass(frozen=True)
class ContingencyCounts:
    """``(deaths, non_deaths)`` per cell.

    Cells: ``VM`` white victim/white defendant, ``VbarM`` black/white,
    ``VMbar`` white/black, ``VbarMbar`` black/black.
    """

    VM: tuple[int, int] = (0, 0)
    VbarM: tuple[int, int] = (0, 0)
    VMbar: tuple[int, int] = (0, 0)
    VbarMbar: tuple[int, int] = (0, 0)

    def __post_init__(self):
        for c in CELLS:
            a, b = getattr(self, c)
            if int(a) != a or int(b) != b or a < 0 or b < 0:
                raise ValueError(f"cell {c} needs non-negative integer counts, got {(a, b)}")
            object.__setattr__(self, c, (int(a), int(b)))

    def cell(self, name: str) -> tuple[int, int]:
        return getattr(self, name)

    @property
    def total(self) -> int:
        return sum(a + b for a, b in (self.cell(c) for c in CELLS))


class ContingencyHypothesis(enum.Enum):
    """Which cells share a death probability."""

    H00 = ((("VM", "VbarM", "VMbar", "VbarMbar"),), ("tau",))
    H10 = ((("VM", "VMbar"), ("VbarM", "VbarMbar")), ("tau", "chi"))
    H01 = ((("VM", "VbarM"), ("VMbar", "VbarMbar")), ("tau", "chi"))
    H11 = ((("VM",), ("VbarM",), ("VMbar",), ("VbarMbar",)), ("tau", "chi", "rho", "theta_vm_bar_m_bar"))

    @property
    def groups(self) -> tuple[tuple[str, ...], ...]:
        return self.value[0]

    @property
    def parameter_names(self) -> tuple[str, ...]:
        return self.value[1]


HYPOTHESES = tuple(ContingencyHypothesis)

# MacKay, Information Theory, Inference, and Learning Algorithms, exercise 28.4
MACKAY_28_4 = ContingencyCounts(VM=(19, 132), VbarM=(0, 9), VMbar=(11, 52), VbarMbar=(6, 97))
DATASETS = {"mackay-28.4": MACKAY_28_4}


def _group_counts(counts: ContingencyCounts, hyp: ContingencyHypothesis) -> list[tuple[int, int]]:
    out = []
    for group in hyp.groups:
        cells = [counts.cell(c) for c in group]
        out.append((sum(a for a, _ in cells), sum(b for _, b in cells)))
    return out


def contingency_map(counts: ContingencyCounts, hyp: ContingencyHypothesis) -> np.ndarray:
    """Per-group ``deaths / total``; with uniform priors MAP and ML coincide."""
    out = []
    for (a, b), name in zip(_group_counts(counts, hyp), hyp.parameter_names):
        if a + b == 0:
            raise ValueError(f"MAP undefined for {hyp.name} parameter {name}: group has no observations")
        out.append(a / (a + b))
    return np.array(out)


@dataclass
class ContingencyLaplace:
    log_evidence: float
    theta: np.ndarray
    hessian_diag: np.ndarray
    notes: list[str] = field(default_factory=list)


def contingency_laplace(counts: ContingencyCounts, hyp: ContingencyHypothesis) -> ContingencyLaplace:
    """Laplace evidence with per-group diagnostics.

    The Hessian is diagonal with entry ``a/theta^2 + b/(1-theta)^2``. When the
    MAP is on the boundary (``a == 0`` or ``b == 0``) the vanishing-count term
    is dropped and its log-likelihood term is 0. A group with no data at all
    has no MAP; its factor is integrated exactly (the uniform prior
    integrates to 1).
    """
    log_ev = 0.0
    thetas, diag, notes = [], [], []
    for (a, b), name in zip(_group_counts(counts, hyp), hyp.parameter_names):
        if a + b == 0:
            thetas.append(float("nan"))
            diag.append(float("nan"))
            notes.append(f"{hyp.name}.{name}: empty group, factor integrated exactly")
            continue
        th = a / (a + b)
        h = (a / th**2 if a else 0.0) + (b / (1.0 - th) ** 2 if b else 0.0)
        if a == 0 or b == 0:
            notes.append(f"{hyp.name}.{name}: MAP on boundary ({name}={th:g}); vanishing Hessian term dropped")
        ll = (a * math.log(th) if a else 0.0) + (b * math.log1p(-th) if b else 0.0)
        log_ev += ll - 0.5 * (math.log(h) - LOG_2PI)
        thetas.append(th)
        diag.append(h)
    return ContingencyLaplace(log_ev, np.array(thetas), np.array(diag), notes)


def contingency_laplace_log_evidence(counts: ContingencyCounts, hyp: ContingencyHypothesis) -> float:
    return contingency_laplace(counts, hyp).log_evidence


def contingency_exact_log_evidence(counts: ContingencyCounts, hyp: ContingencyHypothesis) -> float:
    """Sum of per-group beta integrals; exact under uniform priors."""
    return float(sum(beta_log_evidence(a, a + b) for a, b in _group_counts(counts, hyp)))


def contingency_model_posterior(
    counts: ContingencyCounts,
    model_log_priors=None,
    method: str = "laplace",
) -> np.ndarray:
    """Posterior over ``(H00, H10, H01, H11)``.

    ``model_log_priors`` defaults to uniform; ``-inf`` excludes a hypothesis.
    """
    if model_log_priors is None:
        model_log_priors = np.full(4, -math.log(4.0))
    lp = np.asarray(model_log_priors, dtype=float)
    if lp.shape != (4,) or np.any(np.isnan(lp)) or np.any(lp == np.inf):
        raise ValueError("need four log priors, each finite or -inf")
    if method == "laplace":
        ev = contingency_laplace_log_evidence
    elif method == "exact":
        ev = contingency_exact_log_evidence
    else:
        raise ValueError(f"unknown method {method!r}; use 'laplace' or 'exact'")
    log_w = np.array(
        [lp[i] + ev(counts, h) if lp[i] > -np.inf else -np.inf for i, h in enumerate(HYPOTHESES)]
    )
    return normalize_log_weights(log_w)


def with_cell(counts: ContingencyCounts, name: str, value: tuple[int, int]) -> ContingencyCounts:
    if name not in CELLS:
        raise ValueError(f"unknown cell {name!r}; expected one of {', '.join(CELLS)}")
    return replace(counts, **{name: value})
