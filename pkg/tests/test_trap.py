import json
import math

import pytest
from hypothesis import given, strategies as st

from ionheat import constants as const
from ionheat.trap import (
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
    thermal_coherence_length,
)

# desk evaluations with independently typed constants
MERCURY_ELL = 9.352152396165647e-07
MERCURY_OMEGA_AT_1E4 = 50267.984423198366

positive = st.floats(min_value=1e-3, max_value=1e3)


def test_zero_field_has_zero_rate_and_unbounded_heating_time():
    noise = NoiseConfig(0.0, 1e-6)
    assert rabi_scale(mercury_trap(), noise) == 0.0
    assert heating_time_tau1(mercury_trap(), noise) == math.inf


def test_rabi_scale_is_homogeneous_of_degree_half():
    trap = mercury_trap()
    a = rabi_scale(trap, NoiseConfig(2.5e-3, 1e-6))
    b = rabi_scale(trap, NoiseConfig(4 * 2.5e-3, 1e-6))
    assert b == pytest.approx(2 * a, rel=1e-14)


def test_rabi_scale_mercury_desk_value():
    assert rabi_scale(mercury_trap(), NoiseConfig(1e-4, 1e-6)) == pytest.approx(MERCURY_OMEGA_AT_1E4, rel=1e-12)


@given(e2=positive, T=positive, w=positive)
def test_tau1_matches_rabi_scale_identity(e2, T, w):
    trap = TrapConfig(omega0=w * 1e6)
    noise = NoiseConfig(e2, T * 1e-6)
    omega = rabi_scale(trap, noise)
    expected = omega**2 * noise.coherence_time / (1 + (trap.omega0 * noise.coherence_time) ** 2)
    assert 1 / heating_time_tau1(trap, noise) == pytest.approx(expected, rel=1e-12)
    assert math.isfinite(heating_time_tau1(trap, noise)) and heating_time_tau1(trap, noise) > 0


def test_tau1_at_unit_coherence_ratio_is_twice_the_long_coherence_asymptote():
    trap = mercury_trap()
    T = 1.0 / trap.omega0
    noise = NoiseConfig(1e-4, T)
    omega = rabi_scale(trap, noise)
    asymptote = trap.omega0**2 * T / omega**2  # tau1 for omega0 T >> 1
    assert heating_time_tau1(trap, noise) == pytest.approx(2 * asymptote, rel=1e-13)


def test_length_scale_mercury_and_scaling():
    trap = mercury_trap()
    assert length_scale(trap) == pytest.approx(MERCURY_ELL, rel=1e-12)
    faster = TrapConfig(omega0=8 * trap.omega0)
    assert length_scale(faster) == pytest.approx(length_scale(trap) / 4, rel=1e-14)
    # same e^2 / (M omega0^2)
    other = TrapConfig(charge=2 * trap.charge, mass=4 * trap.mass, omega0=trap.omega0)
    assert length_scale(other) == pytest.approx(length_scale(trap), rel=1e-14)


def test_coupling_strength_reproduces_rabi_scale():
    trap = mercury_trap()
    noise = NoiseConfig(1e-4, 0.3 / trap.omega0)
    tau1 = heating_time_tau1(trap, noise)
    g = coupling_strength(trap.omega0 * noise.coherence_time, trap.omega0 * tau1)
    assert 2 * g**2 == pytest.approx((rabi_scale(trap, noise) / trap.omega0) ** 2, rel=1e-12)
    assert coupling_strength(1.0, math.inf) == 0.0


def test_invalid_configs_are_rejected():
    with pytest.raises(ValueError):
        TrapConfig(charge=0.0)
    with pytest.raises(ValueError):
        TrapConfig(mass=-1.0)
    with pytest.raises(ValueError):
        NoiseConfig(-1.0, 1.0)
    with pytest.raises(ValueError):
        NoiseConfig(1.0, 0.0)
    with pytest.raises(ValueError):
        ExponentialDistance(0.0)


def test_thermal_coherence_length_is_about_2p3_mm_kelvin():
    assert thermal_coherence_length(1.0) == pytest.approx(2.29e-3, rel=2e-3)


class TestConfigFiles:
    def test_alternative_units_agree(self, tmp_path):
        cfg = {
            "charge_e": 1,
            "mass_amu": 198.0,
            "freq_Hz": 1e6,
            "mean_square_field": 1e-4,
            "coherence_time_s": 1e-7,
            "spatial": {"model": "exponential-distance", "coherence_length_m": 1e-3},
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        trap, noise = load_config(path)
        assert trap.charge == const.E_CHARGE
        assert trap.mass == pytest.approx(198 * const.AMU)
        assert trap.omega0 == pytest.approx(2 * math.pi * 1e6)
        assert noise.spatial == ExponentialDistance(1e-3)

    def test_both_members_consistent_is_fine(self):
        trap, noise = load_config({"charge_C": const.E_CHARGE, "charge_e": 1})
        assert trap.charge == const.E_CHARGE
        assert noise is None

    def test_inconsistent_pair_is_an_error(self):
        with pytest.raises(ValueError, match="inconsistent"):
            load_config({"mass_kg": 1e-25, "mass_amu": 198})

    @pytest.mark.parametrize("spec, expected", [
        ("coherent", Coherent()),
        ({"model": "incoherent"}, Incoherent()),
    ])
    def test_spatial_models(self, spec, expected):
        _, noise = load_config({"mean_square_field": 1.0, "coherence_time_s": 1.0, "spatial": spec})
        assert noise.spatial == expected

    def test_unknown_spatial_model(self):
        with pytest.raises(ValueError):
            load_config({"mean_square_field": 1.0, "coherence_time_s": 1.0, "spatial": "gaussian"})
