"""Monte Carlo propagation of coherent amplitudes under sampled noise.

For a single realization of the field, the motional state stays a product
of coherent states, so the whole evolution is captured by the amplitudes

    v_p(s) = g mu_p^(-1/4) int_0^s sum_n eps_n(s') b^(p)_n exp(i sqrt(mu_p) s') ds'

(time in units of ``1/omega0``, ``g`` from :func:`ionheat.trap.coupling_strength`).
The integral is a cumulative trapezoid on the noise grid.  Ensembles are
built from independent counter-based streams, one per realization, and
reduced in stream order, so results do not depend on the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .chain import ChainModes, build_chain
from .noise import DEFAULT_DT, NoisePath, SeedSpec, correlated_samples, psd_factor
from .trap import coupling_strength

CHUNK = 256  # realizations per work unit; fixed so array shapes never depend on workers


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class RealizationAmplitudes:
    times: np.ndarray
    v: np.ndarray  # (n_modes, n_times), complex


@dataclass(frozen=True)
class Ensemble:
    """Everything that defines a noise ensemble, in dimensionless units.

    Parameters
    ----------
    omega0T : float
        Noise coherence time times omega0.
    omega0tau1 : float
        Single-ion heating time times omega0; fixes the noise amplitude.
    chain : ChainModes, optional
        Defaults to a single ion.
    gamma : array, optional
        Spatial coherence matrix; defaults to fully coherent.
    dt : float
        Integration step in units of 1/omega0.
    """

    omega0T: float
    omega0tau1: float
    chain: ChainModes = field(default_factory=lambda: build_chain(1))
    gamma: np.ndarray | None = None
    dt: float = DEFAULT_DT

    @property
    def coupling(self) -> float:
        return coupling_strength(self.omega0T, self.omega0tau1)

    def coherence(self) -> np.ndarray:
        n = self.chain.n_ions
        return np.ones((n, n)) if self.gamma is None else np.asarray(self.gamma, dtype=float)

    def describe(self) -> dict:
        return {
            "omega0T": self.omega0T,
            "omega0tau1": self.omega0tau1,
            "n_ions": self.chain.n_ions,
            "gamma": self.coherence().tolist(),
            "dt": self.dt,
        }


@dataclass
class EnsembleEstimate:
    """Ensemble means and standard errors on a time grid.

    Complex observables carry complex standard errors whose real and
    imaginary parts are the errors of the real and imaginary means.
    """

    times: np.ndarray
    mean: dict
    stderr: dict
    R: int
    seed: int


def _mode_amplitudes(fields: np.ndarray, chain: ChainModes, coupling: float, dt: float) -> np.ndarray:
    """fields (..., N, K) -> amplitudes (..., N_modes, K)."""
    K = fields.shape[-1]
    s = dt * np.arange(K)
    w = np.sqrt(chain.eigenvalues)
    drive = np.einsum("pn,...nk->...pk", chain.vectors, fields)
    drive = drive * np.exp(1j * w[:, None] * s[None, :])
    v = cumulative_trapezoid(drive, dx=dt, axis=-1, initial=0)
    return v * (coupling * chain.eigenvalues[:, None] ** -0.25)


def _check_grid(path: NoisePath, times) -> np.ndarray:
    K = path.samples.shape[1]
    grid = path.times
    if times is None:
        return grid
    times = np.asarray(times, dtype=float)
    if times.shape != grid.shape or not np.allclose(times, grid, rtol=0, atol=1e-9 * max(1.0, grid[-1])):
        raise GridMismatchError(
            f"time grid does not match the noise path ({K} samples, dt={path.dt})"
        )
    return times


def propagate_single(path: NoisePath, coupling: float, times=None) -> RealizationAmplitudes:
    """Coherent amplitude of one ion driven by a single noise row."""
    if path.samples.shape[0] != 1:
        raise GridMismatchError("propagate_single needs exactly one noise row")
    return propagate_chain(path, build_chain(1), coupling, times)


def propagate_chain(path: NoisePath, chain: ChainModes, coupling: float, times=None) -> RealizationAmplitudes:
    """Mode amplitudes ``v_p`` of a chain driven by one row of noise per ion."""
    if path.samples.shape[0] != chain.n_ions:
        raise GridMismatchError(
            f"noise has {path.samples.shape[0]} rows but the chain has {chain.n_ions} ions"
        )
    grid = _check_grid(path, times)
    return RealizationAmplitudes(grid, _mode_amplitudes(path.samples, chain, coupling, path.dt))


def fine_grid(times, dt: float) -> tuple[float, int, np.ndarray]:
    """Integration grid covering ``times``.

    Returns ``(dt_used, n_samples, indices)`` with ``times == dt_used *
    indices``.  Requested times must sit on multiples of ``dt``; a uniform
    request grid that does not is served by refining ``dt`` to an integer
    fraction of its spacing.
    """
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise GridMismatchError("times must be a non-empty 1-D sequence")
    if np.any(t < 0) or np.any(np.diff(t) <= 0):
        raise GridMismatchError("times must be non-negative and strictly increasing")

    def fits(step):
        k = np.rint(t / step)
        return np.all(np.abs(k * step - t) <= 1e-9 * np.maximum(1.0, t)), k.astype(np.int64)

    ok, idx = fits(dt)
    if not ok and t.size > 1:
        h = np.diff(t)
        if np.allclose(h, h[0], rtol=1e-9):
            step = h[0] / math.ceil(h[0] / dt - 1e-9)
            ok, idx = fits(step)
            dt = step
    if not ok:
        raise GridMismatchError(f"times are not on a grid of step {dt}")
    return dt, int(idx[-1]) + 1, idx


def _chunk_amplitudes(ens: Ensemble, factor, seed: int, streams: range, K: int, dt: float,
                      idx: np.ndarray) -> np.ndarray:
    n = ens.chain.n_ions
    xi = np.stack([SeedSpec(seed, r).generator().standard_normal((n, K)) for r in streams])
    fields = correlated_samples(xi, factor, ens.omega0T, dt)
    v = _mode_amplitudes(fields, ens.chain, ens.coupling, dt)
    return v[..., idx]


def sample_amplitudes(ens: Ensemble, times, R: int, seed: int = 42, workers: int = 1) -> np.ndarray:
    """Mode amplitudes of realizations ``0 .. R-1`` at ``times``.

    Returns a complex array of shape (R, n_modes, len(times)).  Row ``r``
    depends only on ``(seed, r)``.
    """
    if R < 1:
        raise ValueError("R must be >= 1")
    dt, K, idx = fine_grid(times, ens.dt)
    factor = psd_factor(ens.coherence())
    chunks = [range(lo, min(lo + CHUNK, R)) for lo in range(0, R, CHUNK)]

    def job(streams):
        return _chunk_amplitudes(ens, factor, seed, streams, K, dt, idx)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, chunks))
    else:
        parts = [job(c) for c in chunks]
    return np.concatenate(parts, axis=0)


def _mean_se(x: np.ndarray):
    R = x.shape[0]
    mean = x.mean(axis=0)
    if np.iscomplexobj(x):
        se = (x.real.std(axis=0, ddof=1) + 1j * x.imag.std(axis=0, ddof=1)) / math.sqrt(R)
    else:
        se = x.std(axis=0, ddof=1) / math.sqrt(R)
    return mean, se


def fidelity_samples(v: np.ndarray) -> np.ndarray:
    """Per-realization ground-state probability ``exp(-sum_p |v_p|^2)``."""
    return np.exp(-np.sum(np.abs(v) ** 2, axis=1))


def estimate_from_amplitudes(v: np.ndarray, times, seed: int) -> EnsembleEstimate:
    if v.shape[0] < 2:
        raise ValueError("need at least two realizations for a standard error")
    mean, se = {}, {}
    mean["fidelity"], se["fidelity"] = _mean_se(fidelity_samples(v))
    mean["nbar"], se["nbar"] = _mean_se(np.abs(v) ** 2)
    mean["vv"], se["vv"] = _mean_se(v**2)
    return EnsembleEstimate(np.asarray(times, dtype=float), mean, se, v.shape[0], seed)


def ensemble_fidelity(ens: Ensemble, times, R: int, seed: int = 42, workers: int = 1) -> EnsembleEstimate:
    """Direct estimate of ``F(t) = <exp(-sum_p |v_p(t)|^2)>`` with standard errors."""
    v = sample_amplitudes(ens, times, R, seed, workers)
    est = estimate_from_amplitudes(v, times, seed)
    est.mean = {"fidelity": est.mean["fidelity"]}
    est.stderr = {"fidelity": est.stderr["fidelity"]}
    return est


def ensemble_moments(ens: Ensemble, times, R: int, seed: int = 42, workers: int = 1) -> EnsembleEstimate:
    """Per-mode ``<|v_p|^2>`` (key ``nbar``) and ``<v_p^2>`` (key ``vv``).

    Arrays have shape (n_modes, len(times)); for a single ion take row 0.
    """
    v = sample_amplitudes(ens, times, R, seed, workers)
    est = estimate_from_amplitudes(v, times, seed)
    del est.mean["fidelity"], est.stderr["fidelity"]
    return est
