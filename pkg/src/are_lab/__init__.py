"""Pitman asymptotic relative efficiency of Kendall's T versus Spearman's S."""
from .are_engine import AreResult, are_closed_micd, are_numeric, snd_diagnostics, theorem_check
from .asymptotics import AsymptoticMoments, moments, mu_s, mu_t, sigma2_s, sigma2_t
from .model_core import DependenceModel, PairedSample, association, kolmogorov_distance, variation_distance
from .models import MODELS, get_model
from .rank_stats import kendall_t, ranks, spearman_s, spearman_u_tilde

__all__ = [
    "AreResult", "AsymptoticMoments", "DependenceModel", "MODELS", "PairedSample",
    "are_closed_micd", "are_numeric", "association", "get_model", "kendall_t",
    "kolmogorov_distance", "moments", "mu_s", "mu_t", "ranks", "sigma2_s", "sigma2_t",
    "snd_diagnostics", "spearman_s", "spearman_u_tilde", "theorem_check", "variation_distance",
]
