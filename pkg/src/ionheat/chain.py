"""Equilibrium positions and axial normal modes of a linear ion chain.

Positions are in units of ``length_scale(trap)`` and eigenvalues are the
squared mode frequencies in units of ``omega0**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_IONS = 50
NEWTON_TOL = 1e-13
NEWTON_MAX_ITER = 200
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


class EquilibriumError(RuntimeError):
    """The force-balance solve did not converge."""


@dataclass(frozen=True)
class ChainModes:
    """Normal-mode data of an N-ion chain.

    ``vectors[p]`` is the normalised eigenvector b^(p) belonging to
    ``eigenvalues[p]``; p = 0 is the centre-of-mass mode.
    """

    n_ions: int
    positions: np.ndarray
    eigenvalues: np.ndarray
    vectors: np.ndarray

    @property
    def frequencies(self) -> np.ndarray:
        """Mode frequencies in units of omega0."""
        return np.sqrt(self.eigenvalues)

    def to_dict(self) -> dict:
        return {
            "n": self.n_ions,
            "u": self.positions.tolist(),
            "mu": self.eigenvalues.tolist(),
            "b": self.vectors.tolist(),
        }


def _force_residual(u: np.ndarray) -> np.ndarray:
    d = u[:, None] - u[None, :]
    np.fill_diagonal(d, np.inf)
    # 1/d^2 carries the sign of d: ions to the left push right and vice versa
    return u - np.sum(np.sign(d) / d**2, axis=1)


def equilibrium_positions(n_ions: int) -> np.ndarray:
    """Dimensionless equilibrium positions of ``n_ions`` ions, ascending.

    Solves ``u_m - sum_{n<m} (u_m-u_n)^-2 + sum_{n>m} (u_m-u_n)^-2 = 0`` by
    Newton iteration with step halving.  The Jacobian of this system is
    exactly :func:`coupling_matrix`.
    """
    if not 1 <= n_ions <= MAX_IONS:
        raise ValueError(f"n_ions must be in [1, {MAX_IONS}], got {n_ions}")
    if n_ions == 1:
        return np.zeros(1)

    u = (np.arange(1, n_ions + 1) - (n_ions + 1) / 2.0) * 2.0 / math.sqrt(n_ions)
    f = _force_residual(u)
    for _ in range(NEWTON_MAX_ITER):
        err = np.max(np.abs(f))
        if err <= NEWTON_TOL:
            break
        step = np.linalg.solve(coupling_matrix(u), f)
        lam = 1.0
        while lam > 1e-6:
            trial = u - lam * step
            if np.all(np.diff(trial) > 0):
                f_trial = _force_residual(trial)
                if np.max(np.abs(f_trial)) < err:
                    break
            lam *= 0.5
        else:
            # no descent direction left; round-off floor reached
            break
        u, f = trial, f_trial
    err = np.max(np.abs(f))
    if err > NEWTON_TOL:
        raise EquilibriumError(
            f"equilibrium solve for {n_ions} ions did not converge "
            f"(max residual {err:.3e} after {NEWTON_MAX_ITER} iterations)"
        )
    return u


def coupling_matrix(positions) -> np.ndarray:
    """Axial coupling matrix ``A`` of a chain at the given positions.

    ``A_mm = 1 + 2 sum_{p != m} |u_m - u_p|^-3`` and
    ``A_mn = -2 |u_m - u_n|^-3``.
    """
    u = np.asarray(positions, dtype=float)
    d = np.abs(u[:, None] - u[None, :])
    off = ~np.eye(len(u), dtype=bool)
    if np.any(d[off] == 0):
        raise ValueError("coincident ion positions: Coulomb coupling is singular")
    np.fill_diagonal(d, 1.0)
    A = -2.0 / d**3
    np.fill_diagonal(A, 0.0)
    np.fill_diagonal(A, 1.0 - A.sum(axis=1))
    return A


def _fix_sign(v: np.ndarray) -> np.ndarray:
    mag = np.abs(v)
    # near-ties (mirror-symmetric modes) go to the lowest index
    k = int(np.flatnonzero(mag >= mag.max() * (1 - 1e-9))[0])
    return v if v[k] > 0 else -v


def eigensystem(matrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Returns
    -------
    eigenvalues : ndarray, shape (N,)
        Ascending.
    vectors : ndarray, shape (N, N)
        Row ``p`` is the unit eigenvector for ``eigenvalues[p]``; its
        largest-magnitude entry is positive.
    """
    A = np.array(matrix, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    if not np.allclose(A, A.T, rtol=0, atol=1e-12 * max(1.0, np.abs(A).max())):
        raise ValueError("matrix must be symmetric")
    A = 0.5 * (A + A.T)
    V = np.eye(n)
    scale = max(np.linalg.norm(A), np.finfo(float).tiny)

    for _ in range(JACOBI_MAX_SWEEPS):
        off = math.sqrt(np.sum(np.triu(A, 1) ** 2) * 2.0)
        if off <= JACOBI_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    A[p, q] = A[q, p] = 0.0
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                Ap, Aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap, Aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                A[p, q] = A[q, p] = 0.0
                Vp, Vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
    else:
        raise RuntimeError("Jacobi iteration did not converge")

    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    vectors = np.array([_fix_sign(V[:, k]) for k in order])
    return w[order], vectors


def build_chain(n_ions: int) -> ChainModes:
    u = equilibrium_positions(n_ions)
    mu, b = eigensystem(coupling_matrix(u))
    return ChainModes(n_ions=n_ions, positions=u, eigenvalues=mu, vectors=b)
