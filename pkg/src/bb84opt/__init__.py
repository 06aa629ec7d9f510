"""Optimal individual attacks on BB84: certificates, synthesis and simulation."""

from __future__ import annotations

from .info import (
    RateCurvePoint,
    binary_entropy,
    bloch_shrink,
    chsh_sum,
    helstrom_fidelity,
    ig_star,
    key_rate,
    mi_curves,
    phi,
    qber_threshold,
    secrecy_bound,
)
from .optimality import NscReport, nsc_battery, old_new_equivalence, perturb_ivs
from .sim import SimConfig, SimStats, brute_force_ig, exact_joint_distribution, eve_reduced_density, run_eb_chsh, run_pm
from .states import (
    Basis,
    DegenerateRateError,
    ErrorRates,
    InteractionVectors,
    MeasurementSetup,
    Pijs,
    computational_setup,
    conjugate_setup,
    fuchs_setup,
    optimal_ivs,
    optimal_pijs,
    random_setup,
)
from .synth import AttackUnitary, Factorization, factorize, synth_by_basis_completion, synth_chain, synth_delta_hadamard

__version__ = "0.1.0"
