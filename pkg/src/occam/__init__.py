"""Bayesian model selection with Occam factors.

Evidence-based comparison of basis-function regression models, plus exact
and Laplace-approximated comparison of Bernoulli count models.
"""
from ._backend import BACKEND
from .basis import BasisFamily, BasisKind, basis_dimension, build_design_matrix, evaluate_basis, parse_hypothesis_spec
from .bernoulli_models import (
    MACKAY_28_4,
    CoinPosterior,
    CoinState,
    ContingencyCounts,
    ContingencyHypothesis,
    beta_log_evidence,
    coin_posterior_batch,
    coin_update_naive_iterative,
    coin_update_quasi_iterative,
    contingency_exact_log_evidence,
    contingency_laplace_log_evidence,
    contingency_map,
    contingency_model_posterior,
)
from .datagen import GeneratorSpec, PRESETS, generate, generate_coin, load_csv
from .gaussian_posterior import GaussianBelief, NoiseModel, map_estimate, ml_estimate, prior_belief, update_batch, update_online
from .laplace import gaussian_exact_log_evidence, laplace_log_evidence, regression_hessian
from .selection import SelectionTrajectory, model_log_evidences, model_posterior, observe, registry_create, run_selection

__version__ = "0.1.0"
