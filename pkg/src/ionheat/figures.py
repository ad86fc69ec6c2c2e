"""Curve and table builders behind the ``fig1``, ``fig2`` and ``modes`` commands."""

from __future__ import annotations

import math

import numpy as np

from .analytics import fidelity_from_moments, moments_exponential, mode_heating_times, tau_N, tau_N_incoherent
from .chain import build_chain
from .noise import gamma_matrix
from .trap import Coherent, ExponentialDistance, Incoherent, TrapConfig, mercury_trap, thermal_coherence_length

# (omega0 T, omega0 tau1) for curves a-d
FIG1_PARAMS = ((1.0, 1.0), (1.0, 8.5), (1.0, 41.0), (1.0, 128.5))
FIG1_GRID = (0.0, 25.0, 500)
CURVE_LABELS = "abcdefghijklmnopqrstuvwxyz"


def fig1_curves(params=FIG1_PARAMS, times=None) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form fidelity curves, shape (len(params), len(times))."""
    if times is None:
        times = np.linspace(*FIG1_GRID)
    times = np.asarray(times, dtype=float)
    curves = np.array([fidelity_from_moments(moments_exponential(a, tau, times)) for a, tau in params])
    return times, curves


def local_maxima(y: np.ndarray) -> np.ndarray:
    """Indices of strict interior local maxima of a sampled curve."""
    y = np.asarray(y)
    return np.flatnonzero((y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:])) + 1


def fig2_table(n_max: int = 10) -> list[tuple[int, float, float]]:
    """Rows ``(N, tau_N/tau1 coherent, tau_N/tau1 incoherent)`` for N = 1..n_max."""
    if not 1 <= n_max <= 20:
        raise ValueError("n_max must be in [1, 20]")
    rows = []
    for n in range(1, n_max + 1):
        chain = build_chain(n)
        rows.append((n, tau_N(chain, np.ones((n, n)), 1.0), tau_N_incoherent(chain, 1.0)))
    return rows


def default_coherence_length(theta: float = 4.6) -> float:
    return thermal_coherence_length(theta)


def modes_report(n_ions: int, trap: TrapConfig | None = None, coherence_length: float | None = None) -> dict:
    """Chain modes plus per-mode heating times (units of tau1) for each spatial model."""
    trap = trap or mercury_trap()
    if coherence_length is None:
        coherence_length = default_coherence_length()
    chain = build_chain(n_ions)
    models = [Coherent(), Incoherent(), ExponentialDistance(coherence_length)]
    report = chain.to_dict()
    report["heating_times_over_tau1"] = {}
    for model in models:
        gamma = gamma_matrix(chain, trap, model)
        entry = {
            "tau_N": tau_N(chain, gamma, 1.0),
            "modes": mode_heating_times(chain, gamma, 1.0),
        }
        if isinstance(model, ExponentialDistance):
            entry["coherence_length_m"] = coherence_length
            entry["note"] = "interpolating model between the coherent and incoherent limits"
        report["heating_times_over_tau1"][model.name] = entry
    return report


def finite_or_inf(x):
    """JSON-safe representation: unbounded times become the string ``"inf"``."""
    if isinstance(x, dict):
        return {k: finite_or_inf(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [finite_or_inf(v) for v in x]
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x
