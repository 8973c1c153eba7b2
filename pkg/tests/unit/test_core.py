"""
Unit tests — constants, cavity modes, coupled systems and platform presets.

Verifies:
- lifetime_from_q matches the demonstrated platform lifetimes
- Mode volume and effective lifetime formulas
- CoupledSystem keeps the stored detuning consistent with its modes
- Preset lookup and rejection of unknown names
"""

import math

import pytest
from pydantic import ValidationError

from chi2cavity.core import (
    CONSTANTS,
    PRESETS,
    CavityMode,
    CoupledSystem,
    Platform,
    Scheme,
    angular_frequency,
    effective_lifetime,
    get_preset,
    lifetime_from_q,
    mode_volume,
    wavelength_from_angular,
)
from chi2cavity.errors import DomainError

# ---------------------------------------------------------------------------
# Scalar conversions
# ---------------------------------------------------------------------------


class TestLifetimeFromQ:
    @pytest.mark.parametrize(
        ("q", "wavelength", "expected"),
        [
            (18_000, 1.0e-6, 9.5e-12),
            (27_700, 930e-9, 13.6e-12),
            (360_000, 1.4e-6, 267.3e-12),
        ],
    )
    def test_platform_lifetimes(self, q, wavelength, expected):
        assert lifetime_from_q(q, wavelength) == pytest.approx(expected, rel=0.01)

    def test_is_q_over_omega(self):
        assert lifetime_from_q(1e4, 1.5e-6) == pytest.approx(1e4 / angular_frequency(1.5e-6))

    def test_non_positive_q_rejected(self):
        with pytest.raises(DomainError):
            lifetime_from_q(0.0, 1e-6)


class TestConversions:
    def test_wavelength_round_trip(self):
        assert wavelength_from_angular(angular_frequency(1.5e-6)) == pytest.approx(1.5e-6)

    def test_angular_frequency_value(self):
        assert angular_frequency(1.0) == pytest.approx(2 * math.pi * CONSTANTS.c)

    def test_zero_wavelength_rejected(self):
        with pytest.raises(DomainError):
            angular_frequency(0.0)

    def test_micropillar_mode_volume(self):
        assert mode_volume(930e-9, 3.4, 100) == pytest.approx(2.05e-18, rel=0.01)

    def test_mode_volume_rejects_zero_index(self):
        with pytest.raises(DomainError):
            mode_volume(1e-6, 0.0, 1.0)


class TestEffectiveLifetime:
    def test_three_mode_pcdmc(self):
        tau = effective_lifetime(Scheme.THREE_MODE, 7.17e-12, 14.33e-12)
        assert tau == pytest.approx(4.78e-12, rel=1e-3)

    def test_two_mode_equal_lifetimes(self):
        # 1/τ_eff = 1/(2τ) + 1/τ
        assert effective_lifetime(Scheme.TWO_MODE, 9e-12, 9e-12) == pytest.approx(6e-12)

    def test_infinite_tau_b_switches_channel_off(self):
        assert effective_lifetime(Scheme.THREE_MODE, 5e-12, math.inf) == pytest.approx(5e-12)

    def test_negative_lifetime_rejected(self):
        with pytest.raises(DomainError):
            effective_lifetime(Scheme.TWO_MODE, -1.0, 1.0)


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------


class TestCavityMode:
    def test_from_lifetime_round_trip(self):
        mode = CavityMode.from_lifetime(1.5e-6, 12e-12)
        assert mode.lifetime == pytest.approx(12e-12)

    def test_volume_in_material_wavelengths(self):
        mode = CavityMode.from_q(1.5e-6, 1e4, n=3.4, volume_factor=0.7)
        assert mode.mode_volume == pytest.approx(0.7 * (1.5e-6 / 3.4) ** 3)

    def test_index_below_one_rejected(self):
        with pytest.raises(ValidationError):
            CavityMode(wavelength=1e-6, quality_factor=1e3, refractive_index=0.5, mode_volume=1e-18)

    def test_frozen(self):
        mode = CavityMode.from_q(1.5e-6, 1e4)
        with pytest.raises(ValidationError):
            mode.quality_factor = 2e4


class TestCoupledSystem:
    def _modes(self):
        return CavityMode.from_q(0.75e-6, 1e4), CavityMode.from_q(1.5e-6, 1e4)

    def test_two_mode_degenerate_detuning_is_zero(self):
        mode_a, mode_b = self._modes()
        system = CoupledSystem.two_mode(mode_a, mode_b, 1e10)
        assert system.detuning == pytest.approx(0.0, abs=1e-12 * mode_a.angular_frequency)

    def test_three_mode_detuning(self):
        mode_a = CavityMode.from_q(0.74e-6, 1e4)
        _, mode_b = self._modes()
        system = CoupledSystem.three_mode(mode_a, mode_b, mode_b, 1e10, 2.0)
        expected = mode_a.angular_frequency - 2 * mode_b.angular_frequency
        assert system.detuning == pytest.approx(expected)
        assert system.recomputed_detuning() == system.detuning

    def test_inconsistent_detuning_rejected(self):
        mode_a, mode_b = self._modes()
        with pytest.raises(ValidationError, match="does not match"):
            CoupledSystem(
                scheme=Scheme.TWO_MODE,
                mode_a=mode_a,
                mode_b=mode_b,
                omega_coupling=1e10,
                detuning=1e12,
            )

    def test_two_mode_rejects_seed(self):
        mode_a, mode_b = self._modes()
        with pytest.raises(ValidationError, match="seed_amplitude"):
            CoupledSystem(
                scheme=Scheme.TWO_MODE,
                mode_a=mode_a,
                mode_b=mode_b,
                omega_coupling=1e10,
                seed_amplitude=1.0,
                detuning=0.0,
            )

    def test_three_mode_needs_mode_c(self):
        mode_a, mode_b = self._modes()
        with pytest.raises(ValidationError, match="mode_c"):
            CoupledSystem(
                scheme=Scheme.THREE_MODE,
                mode_a=mode_a,
                mode_b=mode_b,
                omega_coupling=1e10,
                seed_amplitude=1.0,
                detuning=0.0,
            )

    def test_from_rates_keeps_lifetimes_and_detuning(self):
        system = CoupledSystem.from_rates(Scheme.TWO_MODE, 9.5e-12, 20e-12, 1e11, detuning=5e10)
        assert system.mode_a.lifetime == pytest.approx(9.5e-12)
        assert system.mode_b.lifetime == pytest.approx(20e-12)
        assert system.recomputed_detuning() == pytest.approx(5e10, abs=1e4)

    def test_from_rates_three_mode_defaults_seed(self):
        system = CoupledSystem.from_rates(Scheme.THREE_MODE, 1e-11, 1e-11, 1e10)
        assert system.seed_amplitude == 1.0
        assert system.mode_c is not None

    def test_from_rates_rejects_detuning_below_zero_frequency(self):
        with pytest.raises(DomainError):
            CoupledSystem.from_rates(Scheme.TWO_MODE, 1e-11, 1e-11, 1e10, detuning=-1e20)


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------


class TestPresets:
    def test_all_platforms_present(self):
        assert set(PRESETS) == set(Platform)

    def test_quality_factors(self):
        assert get_preset("pcdmc").quality_factor == 18_000
        assert get_preset(Platform.MICROPILLAR).quality_factor == 27_700
        assert get_preset("microdisk").quality_factor == 360_000

    def test_reference_lifetime(self):
        assert get_preset("pcdmc").reference_lifetime == pytest.approx(9.5e-12, rel=0.01)

    def test_mode_scales_volume(self):
        preset = get_preset("pcdmc")
        assert preset.mode(1.5e-6, 4.0).mode_volume == pytest.approx(
            4.0 * preset.mode(1.5e-6).mode_volume
        )

    def test_unknown_platform(self):
        with pytest.raises(DomainError, match="unknown platform"):
            get_preset("nanobeam")
