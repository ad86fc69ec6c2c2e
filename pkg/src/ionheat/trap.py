"""Trap and noise configuration, unit conversions and derived scales.

Everything downstream works in dimensionless variables: time is measured
as ``omega0 * t``, the noise coherence time as ``omega0 * T`` and the
heating time as ``omega0 * tau1``.  This module is the only place where
SI quantities (and hbar) enter.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from os import PathLike
from typing import Any, Mapping, Union

from . import constants as const


@dataclass(frozen=True)
class Coherent:
    """Spatially coherent field: every ion sees the same E(t)."""

    name = "coherent"


@dataclass(frozen=True)
class Incoherent:
    """Independent fields at every ion."""

    name = "incoherent"


@dataclass(frozen=True)
class ExponentialDistance:
    """Interpolating model ``gamma_mn = exp(-|z_m - z_n| / coherence_length)``.

    This is not a physical coherence function; it interpolates between the
    two limits and is labelled as such in every report.
    """

    coherence_length: float  # m
    name = "exponential-distance"

    def __post_init__(self):
        if not self.coherence_length > 0:
            raise ValueError("coherence_length must be positive")


SpatialCoherenceModel = Union[Coherent, Incoherent, ExponentialDistance]


@dataclass(frozen=True)
class TrapConfig:
    """Single-ion axial trap.

    Parameters
    ----------
    charge : float
        Ion charge in C.
    mass : float
        Ion mass in kg.
    omega0 : float
        Axial angular frequency in rad/s.
    """

    charge: float = const.E_CHARGE
    mass: float = const.MERCURY_MASS_KG
    omega0: float = 2 * math.pi * const.MERCURY_FREQ_HZ

    def __post_init__(self):
        if self.charge == 0:
            raise ValueError("charge must be non-zero")
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if not self.omega0 > 0:
            raise ValueError("omega0 must be positive")


@dataclass(frozen=True)
class NoiseConfig:
    """Stationary Gaussian field ensemble.

    Parameters
    ----------
    mean_square_field : float
        <E(t)^2> in V^2/m^2.
    coherence_time : float
        Correlation time T of the exponential kernel, in s.
    spatial : SpatialCoherenceModel
        Equal-time spatial coherence across the chain.
    """

    mean_square_field: float
    coherence_time: float
    spatial: SpatialCoherenceModel = field(default_factory=Coherent)

    def __post_init__(self):
        if not self.mean_square_field >= 0:
            raise ValueError("mean_square_field must be >= 0")
        if not self.coherence_time > 0:
            raise ValueError("coherence_time must be positive")


def mercury_trap() -> TrapConfig:
    """Singly charged mercury ion at 4.66 MHz axial frequency."""
    return TrapConfig()


def rabi_scale(trap: TrapConfig, noise: NoiseConfig) -> float:
    """Characteristic transition rate ``sqrt(e^2 <E^2> / (M hbar omega0))`` in rad/s."""
    return math.sqrt(
        trap.charge**2 * noise.mean_square_field / (trap.mass * const.HBAR * trap.omega0)
    )


def heating_time_tau1(trap: TrapConfig, noise: NoiseConfig) -> float:
    """Single-ion heating time in s; ``math.inf`` for a vanishing field."""
    rate = rabi_scale(trap, noise) ** 2
    T = noise.coherence_time
    rate *= T / (1.0 + (trap.omega0 * T) ** 2)
    if rate == 0.0:
        return math.inf
    return 1.0 / rate


def length_scale(trap: TrapConfig) -> float:
    """Chain length unit ``l`` with ``l^3 = e^2 / (4 pi eps0 M omega0^2)``, in m."""
    return (
        trap.charge**2 / (4 * math.pi * const.EPSILON0 * trap.mass * trap.omega0**2)
    ) ** (1.0 / 3.0)


def coupling_strength(omega0T: float, omega0tau1: float) -> float:
    """Dimensionless drive prefactor for a unit-variance noise path.

    With time in units of ``1/omega0`` the coherent amplitude is
    ``v(s) = g * int_0^s eps(s') exp(i s') ds'`` where ``eps`` has unit
    variance; ``g = Omega / (sqrt(2) omega0)``, and the heating time fixes
    ``(Omega/omega0)^2 = (1 + (omega0 T)^2) / (omega0 T * omega0 tau1)``.
    """
    if not omega0T > 0:
        raise ValueError("omega0T must be positive")
    if math.isinf(omega0tau1):
        return 0.0
    if not omega0tau1 > 0:
        raise ValueError("omega0tau1 must be positive")
    return math.sqrt((1.0 + omega0T**2) / (omega0T * omega0tau1) / 2.0)


def thermal_coherence_length(theta: float) -> float:
    """Coherence length ``hbar c / (k_B theta)`` of thermal radiation, in m."""
    return const.HBAR * const.C_LIGHT / (const.K_BOLTZMANN * theta)


# -- configuration files ---------------------------------------------------

def _pick(cfg: Mapping[str, Any], si_key: str, alt_key: str, factor: float, default=None):
    si = cfg.get(si_key)
    alt = cfg.get(alt_key)
    if si is None and alt is None:
        if default is None:
            raise ValueError(f"config needs one of {si_key!r} or {alt_key!r}")
        return default
    if alt is None:
        return float(si)
    converted = float(alt) * factor
    if si is not None and not math.isclose(float(si), converted, rel_tol=1e-9):
        raise ValueError(
            f"inconsistent {si_key}={si} and {alt_key}={alt} (= {converted:.10g})"
        )
    return converted


def spatial_from_dict(spec: Mapping[str, Any] | str | None) -> SpatialCoherenceModel:
    if spec is None:
        return Coherent()
    if isinstance(spec, str):
        spec = {"model": spec}
    model = str(spec.get("model", "coherent")).lower().replace("_", "-")
    if model == "coherent":
        return Coherent()
    if model == "incoherent":
        return Incoherent()
    if model in ("exponential-distance", "exponential"):
        if "coherence_length_m" not in spec:
            raise ValueError("exponential-distance model needs coherence_length_m")
        return ExponentialDistance(float(spec["coherence_length_m"]))
    raise ValueError(f"unknown spatial model {model!r}")


def spatial_to_dict(spatial: SpatialCoherenceModel) -> dict:
    out = {"model": spatial.name}
    if isinstance(spatial, ExponentialDistance):
        out["coherence_length_m"] = spatial.coherence_length
    return out


def trap_from_dict(cfg: Mapping[str, Any]) -> TrapConfig:
    """Build a :class:`TrapConfig`; missing entries default to the mercury trap."""
    default = mercury_trap()
    charge = _pick(cfg, "charge_C", "charge_e", const.E_CHARGE, default.charge)
    mass = _pick(cfg, "mass_kg", "mass_amu", const.AMU, default.mass)
    omega0 = _pick(cfg, "omega0_rad_s", "freq_Hz", 2 * math.pi, default.omega0)
    return TrapConfig(charge=charge, mass=mass, omega0=omega0)


def noise_from_dict(cfg: Mapping[str, Any]) -> NoiseConfig:
    for key in ("mean_square_field", "coherence_time_s"):
        if key not in cfg:
            raise ValueError(f"config is missing {key!r}")
    return NoiseConfig(
        mean_square_field=float(cfg["mean_square_field"]),
        coherence_time=float(cfg["coherence_time_s"]),
        spatial=spatial_from_dict(cfg.get("spatial")),
    )


def load_config(source: str | PathLike | Mapping[str, Any]) -> tuple[TrapConfig, NoiseConfig | None]:
    """Read a JSON key-value configuration.

    Recognised keys::

        charge_C | charge_e, mass_kg | mass_amu, omega0_rad_s | freq_Hz,
        mean_square_field, coherence_time_s,
        spatial: {model: coherent | incoherent | exponential-distance,
                  coherence_length_m}

    Either member of a pair may be given; giving both with inconsistent
    values raises ``ValueError``.  The noise part is optional and ``None``
    is returned for it when ``mean_square_field`` is absent.
    """
    if isinstance(source, Mapping):
        cfg = dict(source)
    else:
        with open(source) as fh:
            cfg = json.load(fh)
    trap = trap_from_dict(cfg)
    noise = noise_from_dict(cfg) if "mean_square_field" in cfg else None
    return trap, noise


def trap_to_dict(trap: TrapConfig) -> dict:
    return {"charge_C": trap.charge, "mass_kg": trap.mass, "omega0_rad_s": trap.omega0}
