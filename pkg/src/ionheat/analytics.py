"""Closed-form and quadrature results for heating of the motional ground state.

Single-ion functions take dimensionless arguments: ``omega0T`` (noise
coherence time), ``omega0tau1`` (heating time) and ``omega0t`` (elapsed
time), all in units of ``1/omega0``.  :func:`moments_quadrature` and the
thermal estimate work in whatever consistent units they are given.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from . import constants as const
from .chain import ChainModes
from .trap import TrapConfig

UNBOUNDED_RTOL = 1e-14
CS_SLACK = 1e-12

KernelFn = Callable[[float], float]


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class MomentPair:
    """Ensemble moments ``m = <|v|^2>`` (real) and ``s = <v^2>`` (complex)."""

    m: np.ndarray | float
    s: np.ndarray | complex


@dataclass(frozen=True)
class AsymptoteParams:
    t0: float
    tau1: float


def fidelity_from_moments(mp: MomentPair):
    """Ground-state fidelity of a Gaussian ensemble of coherent amplitudes.

    ``F = [1 + 2m + m^2 - |s|^2]^(-1/2)``.  Raises ``ValueError`` when the
    moments violate ``|s| <= m`` beyond round-off.
    """
    m = np.asarray(mp.m, dtype=float)
    a = np.abs(np.asarray(mp.s))
    if np.any(m < -CS_SLACK):
        raise ValueError("negative <|v|^2>")
    excess = a - m
    if np.any(excess > CS_SLACK * np.maximum(1.0, m)):
        raise ValueError(
            f"inconsistent ensemble moments: |<v^2>| exceeds <|v|^2> by {np.max(excess):.3e}"
        )
    # factored to avoid cancellation when |s| ~ m >> 1
    a = np.minimum(a, m)
    det = (1.0 + (m - a)) * (1.0 + m + a)
    F = 1.0 / np.sqrt(det)
    return float(F) if F.ndim == 0 else F


def _check_positive(**kw):
    for name, val in kw.items():
        if not val > 0:
            raise ValueError(f"{name} must be positive, got {val}")


def moments_exponential(omega0T: float, omega0tau1: float, omega0t) -> MomentPair:
    """Exact moments for an exponentially correlated field.

    With ``tan(phi) = omega0 T``::

        m = (T/tau1) [exp(-t/T) cos(omega0 t + 2 phi) - cos(2 phi) + t/T]
        s = (T/tau1) / sin(phi) * exp(i omega0 t) [exp(-t/T) sin(phi) + sin(omega0 t - phi)]

    ``omega0t`` may be an array.  ``s`` uses the phase convention
    ``v = g * int eps exp(i s') ds'`` (no leading factor i); other
    conventions differ only by an overall sign of ``s``.
    """
    _check_positive(omega0T=omega0T, omega0tau1=omega0tau1)
    t = np.asarray(omega0t, dtype=float)
    if np.any(t < 0):
        raise ValueError("omega0t must be >= 0")
    a = float(omega0T)
    phi = math.atan(a)
    ratio = a / omega0tau1
    decay = np.exp(-t / a)
    m = ratio * (decay * np.cos(t + 2 * phi) - math.cos(2 * phi) + t / a)
    s = (ratio / math.sin(phi)) * np.exp(1j * t) * (decay * math.sin(phi) + np.sin(t - phi))
    if m.ndim == 0:
        return MomentPair(float(m), complex(s))
    return MomentPair(m, s)


def mode_moments_exponential(omega0T: float, omega0tau1: float, mu: float, overlap: float,
                             omega0t) -> MomentPair:
    """Exact moments of one chain mode driven by exponentially correlated noise.

    ``overlap`` is ``sum_mn b_m b_n gamma_mn`` for the mode, ``mu`` its
    eigenvalue.  The drive strength is the single-ion one fixed by
    ``omega0tau1``; the mode frequency ``sqrt(mu) omega0`` rescales time.
    """
    _check_positive(mu=mu)
    w = math.sqrt(mu)
    a = w * omega0T
    # keep Omega/omega0 fixed while moving to the mode's own time unit
    omega_sq = (1.0 + omega0T**2) / (omega0T * omega0tau1)
    tau_mode = (1.0 + a * a) / (a * omega_sq)
    base = moments_exponential(a, tau_mode, w * np.asarray(omega0t, dtype=float))
    scale = overlap / mu**1.5
    return MomentPair(base.m * scale, base.s * scale)


def exponential_kernel(T: float) -> KernelFn:
    def kernel(tau):
        return np.exp(-np.abs(tau) / T)

    return kernel


def check_kernel(kernel: KernelFn, t_max: float, n: int = 257) -> None:
    """Sample ``kernel`` on [0, t_max]: require gamma(0) = 1 and |gamma| <= 1."""
    if abs(float(kernel(0.0)) - 1.0) > 1e-12:
        raise ValueError("correlation kernel must satisfy gamma(0) = 1")
    taus = np.linspace(0.0, t_max, n)
    vals = np.array([float(kernel(x)) for x in taus])
    if np.any(np.abs(vals) > 1.0 + 1e-12):
        raise ValueError("correlation kernel exceeds 1 in magnitude")


def _oscillatory_integral(f, breaks: np.ndarray, epsabs: float) -> tuple[float, float]:
    total = err = 0.0
    per = epsabs / len(breaks)
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for lo, hi in zip(breaks[:-1], breaks[1:]):
            try:
                val, e = integrate.quad(f, lo, hi, epsabs=per, epsrel=0.0, limit=200)
            except integrate.IntegrationWarning as exc:
                raise QuadratureError(f"quadrature on [{lo:.6g}, {hi:.6g}] failed: {exc}") from exc
            total += val
            err += e
    return total, err


def moments_quadrature(kernel: KernelFn, Omega: float, omega0: float, t: float,
                       tol: float = 1e-10) -> MomentPair:
    """Moments for an arbitrary stationary correlation kernel by quadrature.

    ::

        m = Omega^2 t^2 int_0^1 (1-x) gamma(x t) cos(x omega0 t) dx
        s = (Omega^2 t / omega0) exp(i omega0 t) int_0^1 gamma(x t) sin((1-x) omega0 t) dx

    The unit interval is split at the periods of ``cos(x omega0 t)`` and
    each piece is integrated adaptively (Gauss-Kronrod).  ``tol`` bounds
    the absolute error of the returned moments.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0 or Omega == 0:
        return MomentPair(0.0, 0j)
    check_kernel(kernel, t)
    phase = omega0 * t
    n_periods = max(1, math.ceil(phase / (2 * math.pi)))
    if n_periods > 10_000:
        raise QuadratureError("integrand oscillates too fast for the subinterval budget")
    breaks = np.minimum(np.arange(n_periods + 1) * 2 * math.pi / phase, 1.0)
    breaks[-1] = 1.0

    pref_m = Omega**2 * t**2
    pref_s = Omega**2 * t / omega0
    Im, em = _oscillatory_integral(
        lambda x: (1 - x) * kernel(x * t) * math.cos(x * phase), breaks, tol / pref_m
    )
    Is, es = _oscillatory_integral(
        lambda x: kernel(x * t) * math.sin((1 - x) * phase), breaks, tol / pref_s
    )
    if pref_m * em > tol or pref_s * es > tol:
        raise QuadratureError(
            f"quadrature reached only {max(pref_m * em, pref_s * es):.3e} (requested {tol:.1e})"
        )
    return MomentPair(pref_m * Im, pref_s * complex(math.cos(phase), math.sin(phase)) * Is)


def short_time_nbar(omega0T: float, omega0tau1: float, omega0t):
    """Leading quadratic growth ``(1 + (omega0 T)^2) / (2 T tau1) t^2`` of the occupation."""
    _check_positive(omega0T=omega0T, omega0tau1=omega0tau1)
    t = np.asarray(omega0t, dtype=float)
    out = (1.0 + omega0T**2) / (2.0 * omega0T * omega0tau1) * t**2
    return float(out) if out.ndim == 0 else out


def asymptote_offset(omega0T: float) -> float:
    """``omega0 t0 = omega0 T (1 - (omega0 T)^2) / (1 + (omega0 T)^2)``."""
    a = omega0T
    return a * (1.0 - a * a) / (1.0 + a * a)


def long_time_asymptotes(omega0T: float, omega0tau1: float, omega0t):
    """Leading long-time behaviour of occupation and fidelity.

    Returns ``(nbar, F, AsymptoteParams)`` with ``nbar = (t - t0)/tau1`` and
    ``F = tau1/t - tau1^2 (1 - t0/tau1) / t^2``.
    """
    _check_positive(omega0T=omega0T, omega0tau1=omega0tau1)
    t = np.asarray(omega0t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("omega0t must be positive")
    t0 = asymptote_offset(omega0T)
    tau = omega0tau1
    nbar = (t - t0) / tau
    F = tau / t - tau**2 * (1.0 - t0 / tau) / t**2
    if nbar.ndim == 0:
        nbar, F = float(nbar), float(F)
    return nbar, F, AsymptoteParams(t0=t0, tau1=tau)


# -- thermal estimate --------------------------------------------------------

def _thermal_constant(trap: TrapConfig) -> float:
    return (
        3.0 * const.C_LIGHT * const.EPSILON0 * trap.omega0 * trap.mass * const.K_BOLTZMANN
        / (trap.charge**2 * const.STEFAN_BOLTZMANN)
    )


def thermal_tau1(trap: TrapConfig, theta: float) -> float:
    """Heating time (s) for a thermal ambient field at temperature ``theta`` (K).

    ``tau1 = 3 c eps0 omega0 M k_B / (e^2 sigma theta^3)``, valid for a
    correlation time ``hbar/(k_B theta)`` much shorter than ``1/omega0``.
    """
    _check_positive(theta=theta)
    return _thermal_constant(trap) / theta**3


def thermal_theta(trap: TrapConfig, tau1: float) -> float:
    """Effective temperature (K) that produces heating time ``tau1`` (s)."""
    _check_positive(tau1=tau1)
    return (_thermal_constant(trap) / tau1) ** (1.0 / 3.0)


# -- multi-ion heating times -------------------------------------------------

def mode_overlaps(chain: ChainModes, gamma) -> tuple[np.ndarray, np.ndarray]:
    """``sum_mn b_m b_n gamma_mn`` per mode, and the matching magnitude scale."""
    G = np.asarray(gamma, dtype=float)
    if G.shape != (chain.n_ions, chain.n_ions):
        raise ValueError("gamma shape does not match the chain")
    b = chain.vectors
    overlap = np.einsum("pm,mn,pn->p", b, G, b)
    scale = np.einsum("pm,mn,pn->p", np.abs(b), np.abs(G), np.abs(b))
    return overlap, scale


def tau_N(chain: ChainModes, gamma, tau1: float) -> float:
    """Total heating time of the chain; ``math.inf`` if nothing is heated."""
    overlap, scale = mode_overlaps(chain, gamma)
    root = np.sqrt(chain.eigenvalues)
    bracket = float(np.sum(overlap / root))
    if bracket <= UNBOUNDED_RTOL * float(np.sum(scale / root)):
        return math.inf
    return tau1 / bracket


def tau_N_incoherent(chain: ChainModes, tau1: float) -> float:
    return tau1 / float(np.sum(1.0 / np.sqrt(chain.eigenvalues)))


def tau_N_mode(chain: ChainModes, gamma, p: int, tau1: float) -> float:
    """Heating time of mode ``p`` (1-based, p = 1 is the centre of mass).

    Returns ``math.inf`` when the mode decouples from the field.
    """
    if not 1 <= p <= chain.n_ions:
        raise ValueError(f"mode index must be in [1, {chain.n_ions}]")
    overlap, scale = mode_overlaps(chain, gamma)
    den = float(overlap[p - 1])
    if den <= UNBOUNDED_RTOL * float(scale[p - 1]):
        return math.inf
    return math.sqrt(chain.eigenvalues[p - 1]) * tau1 / den


def mode_heating_times(chain: ChainModes, gamma, tau1: float) -> list[float]:
    return [tau_N_mode(chain, gamma, p, tau1) for p in range(1, chain.n_ions + 1)]
