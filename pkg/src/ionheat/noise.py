"""Stationary Gaussian noise fields with exponential temporal correlation.

Variates are drawn from Philox, a counter-based generator: the stream
index of a realization selects a disjoint block of the counter space, so a
``(seed, stream)`` pair always produces the same path no matter how an
ensemble is scheduled across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .chain import ChainModes
from .trap import Coherent, ExponentialDistance, Incoherent, SpatialCoherenceModel, TrapConfig, length_scale

DEFAULT_DT = 0.02


class NotPositiveSemidefinite(ValueError):
    pass


@dataclass(frozen=True)
class SeedSpec:
    seed: int = 42
    stream: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not 0 <= self.stream < 2**64:
            raise ValueError("stream index must be a 64-bit unsigned integer")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=self.seed, counter=[0, 0, 0, self.stream]))


@dataclass(frozen=True)
class NoisePath:
    """Sampled field values, one row per ion, on the grid ``k * dt``.

    Fields are normalised to unit stationary variance; the physical
    amplitude enters through the coupling strength.
    """

    dt: float
    samples: np.ndarray

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.samples.ndim != 2:
            raise ValueError("samples must be 2-D (ions x time)")

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.samples.shape[1])


def _ou_filter(xi: np.ndarray, a: float) -> np.ndarray:
    # x_0 = xi_0 (stationary start); x_{k+1} = a x_k + sqrt(1-a^2) xi_{k+1}
    b = math.sqrt(1.0 - a * a)
    zi = np.zeros(xi.shape[:-1] + (1,))
    zi[..., 0] = a * xi[..., 0]
    x = lfilter([b], [1.0, -a], xi[..., 1:], axis=-1, zi=zi)[0]
    return np.concatenate([xi[..., :1], x], axis=-1)


def ou_samples(xi: np.ndarray, coherence_ratio: float, dt: float) -> np.ndarray:
    """Turn i.i.d. standard normals (last axis = time) into unit OU paths.

    The update uses the exact transition density, so the lag-k correlation
    at the sample points is ``exp(-k dt / coherence_ratio)`` with no
    discretisation error.
    """
    if not coherence_ratio > 0:
        raise ValueError("coherence_ratio must be positive")
    if not dt > 0:
        raise ValueError("dt must be positive")
    return _ou_filter(xi, math.exp(-dt / coherence_ratio))


def ou_path(coherence_ratio: float, dt: float, n_steps: int, seed: SeedSpec = SeedSpec(),
            variance: float = 1.0) -> NoisePath:
    """Single stationary Ornstein-Uhlenbeck path of ``n_steps`` samples.

    Parameters
    ----------
    coherence_ratio : float
        omega0 * T, the correlation time in units of 1/omega0.
    dt : float
        Sampling step in units of 1/omega0.
    n_steps : int
        Number of samples (the first one at t = 0).
    seed : SeedSpec
    variance : float
        Stationary variance; 0 gives the all-zero path.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if variance < 0:
        raise ValueError("variance must be >= 0")
    if variance == 0:
        return NoisePath(dt, np.zeros((1, n_steps)))
    xi = seed.generator().standard_normal((1, n_steps))
    x = ou_samples(xi, coherence_ratio, dt)
    if variance != 1.0:
        x = x * math.sqrt(variance)
    return NoisePath(dt, x)


def gamma_matrix(chain: ChainModes, trap: TrapConfig, spatial: SpatialCoherenceModel) -> np.ndarray:
    """Equal-time degree of coherence between the ions of ``chain``."""
    n = chain.n_ions
    if isinstance(spatial, Coherent):
        return np.ones((n, n))
    if isinstance(spatial, Incoherent):
        return np.eye(n)
    if isinstance(spatial, ExponentialDistance):
        z = length_scale(trap) * chain.positions
        return np.exp(-np.abs(z[:, None] - z[None, :]) / spatial.coherence_length)
    raise TypeError(f"unsupported spatial model {spatial!r}")


def psd_factor(gamma, tol: float = 1e-12) -> np.ndarray:
    """Factor ``gamma = F @ F.T`` with ``F`` of shape (N, rank).

    A pivoted Cholesky decomposition; ``F`` is lower triangular up to the
    row permutation chosen by the pivoting.  The all-ones (fully coherent)
    matrix returns a single column of ones, i.e. one process copied to
    every ion.
    """
    G = np.array(gamma, dtype=float)
    n = G.shape[0]
    if G.shape != (n, n) or not np.allclose(G, G.T, atol=1e-12):
        raise ValueError("gamma must be a symmetric square matrix")
    if np.all(G == 1.0):
        return np.ones((n, 1))

    scale = max(np.max(np.diag(G)), 1.0)
    R = G.copy()
    perm = np.arange(n)
    L = np.zeros((n, n))
    rank = n
    for k in range(n):
        j = k + int(np.argmax(np.diag(R)[k:]))
        if R[j, j] <= tol * scale:
            if R[j, j] < -tol * scale or np.any(np.diag(R)[k:] < -tol * scale):
                lam = float(np.linalg.eigvalsh(G)[0])
                raise NotPositiveSemidefinite(
                    f"coherence matrix is not positive semidefinite (smallest eigenvalue {lam:.3e})"
                )
            rank = k
            break
        if j != k:
            R[[k, j]] = R[[j, k]]
            R[:, [k, j]] = R[:, [j, k]]
            L[[k, j]] = L[[j, k]]
            perm[[k, j]] = perm[[j, k]]
        L[k, k] = math.sqrt(R[k, k])
        L[k + 1:, k] = R[k + 1:, k] / L[k, k]
        R[k + 1:, k + 1:] -= np.outer(L[k + 1:, k], L[k + 1:, k])
    F = np.zeros((n, rank))
    F[perm] = L[:, :rank]
    if np.max(np.abs(F @ F.T - G)) > 1e-8 * scale:
        lam = float(np.linalg.eigvalsh(G)[0])
        raise NotPositiveSemidefinite(
            f"coherence matrix is not positive semidefinite (smallest eigenvalue {lam:.3e})"
        )
    return F


def correlated_samples(xi: np.ndarray, factor: np.ndarray, coherence_ratio: float, dt: float) -> np.ndarray:
    """Map normals of shape (..., N, K) to fields with spatial factor ``factor``."""
    rank = factor.shape[1]
    x = ou_samples(xi[..., :rank, :], coherence_ratio, dt)
    return np.einsum("nr,...rk->...nk", factor, x)


def correlated_paths(gamma, coherence_ratio: float, dt: float, n_steps: int,
                     seed: SeedSpec = SeedSpec()) -> NoisePath:
    """Jointly Gaussian fields at N ions.

    ``Cov(E_m(t + tau), E_n(t)) = gamma_mn exp(-|tau| / T)``.  Every row
    has unit variance.  For N = 1 the result equals :func:`ou_path` with
    the same seed.
    """
    factor = psd_factor(gamma)
    n = factor.shape[0]
    xi = seed.generator().standard_normal((n, n_steps))
    return NoisePath(dt, correlated_samples(xi, factor, coherence_ratio, dt))
