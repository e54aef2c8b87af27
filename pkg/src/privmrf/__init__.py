"""Differentially private structure and parameter learning for Markov random
fields, with exact brute-force oracles for desk-scale verification."""

from .models import (
    BinaryMRF,
    IsingModel,
    PairwiseModel,
    center_pairwise,
    delta_unbiased_bound,
    matched_pairs_edges,
    matched_pairs_ising,
    model_from_json,
    model_to_json,
    model_width,
    to_mrf,
)
from .oracle import (
    exact_conditional,
    exact_distribution,
    exact_parity,
    tv_distance,
)
from .polynomial import MultilinearPolynomial
from .privacy import (
    Accountant,
    BudgetExceededError,
    PrivacyBudget,
    pure_to_zcdp,
    zcdp_to_approx,
)
from .learners import (
    IsingEstimate,
    MRFEstimate,
    PairwiseEstimate,
    learn_ising,
    learn_mrf_l1,
    learn_mrf_linf,
    learn_pairwise,
)
from .query_release import ParityTable, empirical_parities, pmw_release
from .sampler import Dataset, exact_sample, gibbs_sample
from .structure import (
    GraphEstimate,
    StabilityConfig,
    base_structure,
    bottom,
    stable_mode_structure,
)

__version__ = "0.1.0"

__all__ = [
    "Accountant",
    "BinaryMRF",
    "BudgetExceededError",
    "Dataset",
    "GraphEstimate",
    "IsingEstimate",
    "IsingModel",
    "MRFEstimate",
    "MultilinearPolynomial",
    "PairwiseEstimate",
    "PairwiseModel",
    "ParityTable",
    "PrivacyBudget",
    "StabilityConfig",
    "base_structure",
    "bottom",
    "center_pairwise",
    "delta_unbiased_bound",
    "empirical_parities",
    "exact_conditional",
    "exact_distribution",
    "exact_parity",
    "exact_sample",
    "gibbs_sample",
    "learn_ising",
    "learn_mrf_l1",
    "learn_mrf_linf",
    "learn_pairwise",
    "matched_pairs_edges",
    "matched_pairs_ising",
    "model_from_json",
    "model_to_json",
    "model_width",
    "pmw_release",
    "pure_to_zcdp",
    "stable_mode_structure",
    "to_mrf",
    "tv_distance",
    "zcdp_to_approx",
]
