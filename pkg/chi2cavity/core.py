"""Physical constants, cavity-mode and coupled-system records, platform presets.

All quantities are SI: seconds, metres, rad/s, joules. Unit suffixes are parsed
only at the CLI boundary (see ``chi2cavity.units``).
"""

from __future__ import annotations

import math
from enum import StrEnum
from typing import Final

from pydantic import BaseModel, ConfigDict, Field, model_validator

from chi2cavity.errors import DomainError

# ---------------------------------------------------------------------------
# Constants
# ---------------------------------------------------------------------------


class PhysicalConstants:
    """CODATA values. Not configurable."""

    __slots__ = ()

    c: Final[float] = 2.99792458e8
    hbar: Final[float] = 1.054571817e-34
    eps0: Final[float] = 8.8541878128e-12


CONSTANTS: Final = PhysicalConstants()

DETUNING_RTOL = 1e-12
GAAS_CHI2 = 200e-12  # |χ⁽²⁾| of GaAs near 1.5 μm, m/V


class Scheme(StrEnum):
    TWO_MODE = "two-mode"
    THREE_MODE = "three-mode"


class Platform(StrEnum):
    PCDMC = "pcdmc"
    MICROPILLAR = "micropillar"
    MICRODISK = "microdisk"


# ---------------------------------------------------------------------------
# Scalar conversions
# ---------------------------------------------------------------------------


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise DomainError(f"{name} must be > 0, got {value!r}")


def angular_frequency(wavelength: float) -> float:
    _require_positive(wavelength=wavelength)
    return 2.0 * math.pi * CONSTANTS.c / wavelength


def wavelength_from_angular(omega: float) -> float:
    _require_positive(omega=omega)
    return 2.0 * math.pi * CONSTANTS.c / omega


def lifetime_from_q(q: float, wavelength: float) -> float:
    """Photon lifetime τ = Q/ω = Qλ/(2πc)."""
    _require_positive(q=q, wavelength=wavelength)
    return q * wavelength / (2.0 * math.pi * CONSTANTS.c)


def mode_volume(wavelength: float, n: float, factor: float) -> float:
    """Mode volume expressed as ``factor`` cubic material wavelengths, factor·(λ/n)³."""
    _require_positive(wavelength=wavelength, n=n, factor=factor)
    return factor * (wavelength / n) ** 3


def effective_lifetime(scheme: Scheme, tau_a: float, tau_b: float) -> float:
    """1/e lifetime of the Rabi envelope.

    two-mode:   1/τ_eff = 1/(2τ_a) + 1/τ_b
    three-mode: 1/τ_eff = 1/τ_a + 1/τ_b

    ``tau_b`` may be ``math.inf`` to switch its loss channel off.
    """
    _require_positive(tau_a=tau_a, tau_b=tau_b)
    if scheme is Scheme.TWO_MODE:
        return 1.0 / (1.0 / (2.0 * tau_a) + 1.0 / tau_b)
    return 1.0 / (1.0 / tau_a + 1.0 / tau_b)


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------


class CavityMode(BaseModel):
    model_config = ConfigDict(frozen=True)

    wavelength: float = Field(gt=0.0)
    quality_factor: float = Field(gt=0.0)
    refractive_index: float = Field(ge=1.0)
    mode_volume: float = Field(gt=0.0)

    @property
    def angular_frequency(self) -> float:
        return angular_frequency(self.wavelength)

    @property
    def lifetime(self) -> float:
        return self.quality_factor / self.angular_frequency

    @classmethod
    def from_q(
        cls, wavelength: float, q: float, n: float = 3.4, volume_factor: float = 1.0
    ) -> CavityMode:
        return cls(
            wavelength=wavelength,
            quality_factor=q,
            refractive_index=n,
            mode_volume=mode_volume(wavelength, n, volume_factor),
        )

    @classmethod
    def from_lifetime(
        cls, wavelength: float, lifetime: float, n: float = 3.4, volume_factor: float = 1.0
    ) -> CavityMode:
        _require_positive(lifetime=lifetime)
        return cls.from_q(wavelength, lifetime * angular_frequency(wavelength), n, volume_factor)


def detuning_of(
    scheme: Scheme, mode_a: CavityMode, mode_b: CavityMode, mode_c: CavityMode | None = None
) -> float:
    if scheme is Scheme.TWO_MODE:
        return mode_a.angular_frequency - 2.0 * mode_b.angular_frequency
    if mode_c is None:
        raise DomainError("three-mode detuning needs mode_c")
    return mode_a.angular_frequency - mode_b.angular_frequency - mode_c.angular_frequency


class CoupledSystem(BaseModel):
    model_config = ConfigDict(frozen=True)

    scheme: Scheme
    mode_a: CavityMode
    mode_b: CavityMode
    mode_c: CavityMode | None = None
    omega_coupling: float = Field(ge=0.0)
    seed_amplitude: float | None = Field(default=None, ge=0.0)
    detuning: float

    @model_validator(mode="after")
    def _check_scheme(self) -> CoupledSystem:
        if self.scheme is Scheme.TWO_MODE:
            if self.mode_c is not None:
                raise ValueError("two-mode system takes no mode_c")
            if self.seed_amplitude is not None:
                raise ValueError("two-mode system takes no seed_amplitude")
        else:
            if self.mode_c is None:
                raise ValueError("three-mode system needs mode_c")
            if self.seed_amplitude is None:
                raise ValueError("three-mode system needs seed_amplitude")
        expected = detuning_of(self.scheme, self.mode_a, self.mode_b, self.mode_c)
        tolerance = DETUNING_RTOL * self.mode_a.angular_frequency
        if abs(self.detuning - expected) > tolerance:
            raise ValueError(
                f"detuning {self.detuning!r} does not match modes (expected {expected!r})"
            )
        return self

    @classmethod
    def two_mode(cls, mode_a: CavityMode, mode_b: CavityMode, omega: float) -> CoupledSystem:
        return cls(
            scheme=Scheme.TWO_MODE,
            mode_a=mode_a,
            mode_b=mode_b,
            omega_coupling=omega,
            detuning=detuning_of(Scheme.TWO_MODE, mode_a, mode_b),
        )

    @classmethod
    def three_mode(
        cls,
        mode_a: CavityMode,
        mode_b: CavityMode,
        mode_c: CavityMode,
        omega: float,
        seed_amplitude: float,
    ) -> CoupledSystem:
        return cls(
            scheme=Scheme.THREE_MODE,
            mode_a=mode_a,
            mode_b=mode_b,
            mode_c=mode_c,
            omega_coupling=omega,
            seed_amplitude=seed_amplitude,
            detuning=detuning_of(Scheme.THREE_MODE, mode_a, mode_b, mode_c),
        )

    @classmethod
    def from_rates(
        cls,
        scheme: Scheme,
        tau_a: float,
        tau_b: float,
        omega: float,
        *,
        detuning: float = 0.0,
        seed_amplitude: float = 1.0,
        wavelength_b: float = 1.5e-6,
        n: float = 3.4,
    ) -> CoupledSystem:
        """Build a system from lifetimes and detuning alone.

        Mode b (and c, degenerate with b) sits at ``wavelength_b``; mode a is
        placed so the stored detuning is exact. Mode volumes are one cubic
        material wavelength; they do not enter the dynamics.
        """
        omega_b = angular_frequency(wavelength_b)
        omega_a = 2.0 * omega_b + detuning
        if omega_a <= 0:
            raise DomainError(f"detuning {detuning!r} leaves mode a at non-positive frequency")
        mode_a = CavityMode.from_lifetime(wavelength_from_angular(omega_a), tau_a, n)
        mode_b = CavityMode.from_lifetime(wavelength_b, tau_b, n)
        if scheme is Scheme.TWO_MODE:
            return cls(
                scheme=scheme,
                mode_a=mode_a,
                mode_b=mode_b,
                omega_coupling=omega,
                detuning=detuning,
            )
        return cls(
            scheme=scheme,
            mode_a=mode_a,
            mode_b=mode_b,
            mode_c=CavityMode.from_q(wavelength_b, 1.0, n),
            omega_coupling=omega,
            seed_amplitude=seed_amplitude,
            detuning=detuning,
        )

    def recomputed_detuning(self) -> float:
        return detuning_of(self.scheme, self.mode_a, self.mode_b, self.mode_c)


# ---------------------------------------------------------------------------
# Platform presets
# ---------------------------------------------------------------------------


class PlatformPreset(BaseModel):
    """A demonstrated GaAs microcavity.

    ``reference_wavelength`` is where the quality factor was measured;
    ``design_wavelength`` is the λ_b assumed by feasibility reports.
    """

    model_config = ConfigDict(frozen=True)

    name: Platform
    quality_factor: float = Field(gt=0.0)
    reference_wavelength: float = Field(gt=0.0)
    design_wavelength: float = Field(gt=0.0)
    mode_volume_factor: float = Field(gt=0.0)
    chi2_magnitude: float = Field(gt=0.0)
    refractive_index: float = Field(ge=1.0)

    @property
    def reference_lifetime(self) -> float:
        return lifetime_from_q(self.quality_factor, self.reference_wavelength)

    def mode(self, wavelength: float, volume_scale: float = 1.0) -> CavityMode:
        return CavityMode.from_q(
            wavelength,
            self.quality_factor,
            self.refractive_index,
            self.mode_volume_factor * volume_scale,
        )


PRESETS: Final[dict[Platform, PlatformPreset]] = {
    Platform.PCDMC: PlatformPreset(
        name=Platform.PCDMC,
        quality_factor=18_000,
        reference_wavelength=1.0e-6,
        design_wavelength=1.5e-6,
        mode_volume_factor=0.7,
        chi2_magnitude=GAAS_CHI2,
        refractive_index=3.4,
    ),
    # λ_b = 1.45 μm: at 1.5 μm the half-period coefficient leaves the 15-130 ns range.
    Platform.MICROPILLAR: PlatformPreset(
        name=Platform.MICROPILLAR,
        quality_factor=27_700,
        reference_wavelength=930e-9,
        design_wavelength=1.45e-6,
        mode_volume_factor=100.0,
        chi2_magnitude=GAAS_CHI2,
        refractive_index=3.4,
    ),
    # Design at 1.5 μm like the photonic-crystal estimate, not the 1.4 μm measurement.
    Platform.MICRODISK: PlatformPreset(
        name=Platform.MICRODISK,
        quality_factor=360_000,
        reference_wavelength=1.4e-6,
        design_wavelength=1.5e-6,
        mode_volume_factor=6.0,
        chi2_magnitude=GAAS_CHI2,
        refractive_index=3.4,
    ),
}


def get_preset(name: str | Platform) -> PlatformPreset:
    try:
        return PRESETS[Platform(name)]
    except ValueError as exc:
        raise DomainError(f"unknown platform {name!r}") from exc
