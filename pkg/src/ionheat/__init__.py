"""Heating of the motional ground state of trapped ions by classical noise fields.

Closed-form fidelity and occupation results for exponentially correlated
Gaussian fields, normal-mode heating times of linear ion chains, and a Monte
Carlo engine that checks the closed forms against sampled noise.
"""

__version__ = "0.1.0"

from .analytics import (
    AsymptoteParams,
    MomentPair,
    QuadratureError,
    exponential_kernel,
    fidelity_from_moments,
    long_time_asymptotes,
    mode_moments_exponential,
    moments_exponential,
    moments_quadrature,
    short_time_nbar,
    tau_N,
    tau_N_incoherent,
    tau_N_mode,
    thermal_tau1,
    thermal_theta,
)
from .chain import ChainModes, EquilibriumError, build_chain, coupling_matrix, eigensystem, equilibrium_positions
from .montecarlo import (
    Ensemble,
    EnsembleEstimate,
    GridMismatchError,
    RealizationAmplitudes,
    ensemble_fidelity,
    ensemble_moments,
    propagate_chain,
    propagate_single,
    sample_amplitudes,
)
from .noise import NoisePath, NotPositiveSemidefinite, SeedSpec, correlated_paths, gamma_matrix, ou_path
from .trap import (
    Coherent,
    ExponentialDistance,
    Incoherent,
    NoiseConfig,
    TrapConfig,
    coupling_strength,
    heating_time_tau1,
    length_scale,
    load_config,
    mercury_trap,
    rabi_scale,
)
