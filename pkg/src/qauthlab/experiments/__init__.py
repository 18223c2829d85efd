"""Security games, derived games and numerical studies."""

from .concentration import ConcentrationResult, haar_concentration
from .games import (
    CounterexampleResult,
    EncryptionResult,
    SecurityReport,
    acceptance_probability,
    counterexample_keyed_vs_averaged,
    encryption_game,
    epsilon_between,
    forgery_probability,
    ideal_experiment,
    indist_from_measured,
    real_experiment,
    security_game,
    total_auth_game,
    wegman_carter_bound,
)
from .keyleak import ScalingFit, fit_scaling, keyleak_scaling, keyleak_sq_distance_fast, keyleak_sq_distance_literal
from .lifting import HybridReport, lifting_hybrid_check
from .moments import MomentCheck, haar_moment_checks, random_index_patterns
from .qkd import QKDRun, QKDSummary, qkd_batch, qkd_simulation
