"""Closed-form results for the reduced two-level model.

Both schemes reduce to two states |1⟩, |2⟩ coupled at rate g and decaying at
γ₁, γ₂; the scheme only decides how g and the γ's follow from the cavities:

    two-mode:   g = √2·Ω,   γ₁ = 1/τ_a, γ₂ = 2/τ_b
    three-mode: g = |α|·Ω,  γ₁ = 1/τ_a, γ₂ = 1/τ_b
"""

from __future__ import annotations

import cmath
import math
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field

from chi2cavity.core import CONSTANTS, CoupledSystem, Scheme
from chi2cavity.errors import DomainError

# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


class ReducedModel(BaseModel):
    model_config = ConfigDict(frozen=True)

    scheme: Scheme = Scheme.TWO_MODE
    g: float = Field(ge=0.0)
    gamma1: float = Field(ge=0.0)
    gamma2: float = Field(ge=0.0)
    detuning: float = 0.0

    @property
    def tau_eff(self) -> float:
        total = self.gamma1 + self.gamma2
        if total == 0:
            return math.inf
        # three-mode: (1/τ_a + 1/τ_b)⁻¹; two-mode: inverse of the mean decay rate
        return (1.0 if self.scheme is Scheme.THREE_MODE else 2.0) / total

    @property
    def bare_linewidths(self) -> tuple[float, float]:
        """Energy decay rates (Γ_a, Γ_b) = (1/τ_a, 1/τ_b) recovered from γ₁, γ₂."""
        if self.scheme is Scheme.THREE_MODE:
            return self.gamma1, self.gamma2
        return self.gamma1, 0.5 * self.gamma2

    @property
    def mean_decay(self) -> float:
        return 0.5 * (self.gamma1 + self.gamma2)

    @classmethod
    def from_lifetimes(
        cls,
        scheme: Scheme,
        tau_a: float,
        tau_b: float,
        omega: float,
        *,
        seed_amplitude: float = 1.0,
        detuning: float = 0.0,
    ) -> ReducedModel:
        if tau_a <= 0 or tau_b <= 0:
            raise DomainError(f"lifetimes must be > 0, got tau_a={tau_a!r}, tau_b={tau_b!r}")
        if scheme is Scheme.TWO_MODE:
            return cls(
                scheme=scheme,
                g=math.sqrt(2.0) * omega,
                gamma1=1.0 / tau_a,
                gamma2=2.0 / tau_b,
                detuning=detuning,
            )
        return cls(
            scheme=scheme,
            g=seed_amplitude * omega,
            gamma1=1.0 / tau_a,
            gamma2=1.0 / tau_b,
            detuning=detuning,
        )

    @classmethod
    def from_system(cls, system: CoupledSystem) -> ReducedModel:
        return cls.from_lifetimes(
            system.scheme,
            system.mode_a.lifetime,
            system.mode_b.lifetime,
            system.omega_coupling,
            seed_amplitude=system.seed_amplitude or 0.0,
            detuning=system.detuning,
        )


class DressedSpectrum(BaseModel):
    model_config = ConfigDict(frozen=True)

    e_plus: float
    e_minus: float
    gamma_plus: float
    gamma_minus: float
    omega_prime: float


class CriterionResult(NamedTuple):
    passed: bool
    margin: float


# ---------------------------------------------------------------------------
# Dressed states
# ---------------------------------------------------------------------------


def generalized_rabi(g: float, detuning: float) -> float:
    """Ω′ = √((2g)² + Δ²)."""
    return math.hypot(2.0 * g, detuning)


def dressed_energies(
    omega_a: float,
    omega_b: float,
    g_bare: float,
    *,
    scheme: Scheme = Scheme.TWO_MODE,
    omega_c: float | None = None,
    seed_amplitude: float = 1.0,
) -> tuple[float, float]:
    """E± = (ħ/2)·Σω ± (ħ/2)·√((2g)² + Δ²) in joules.

    ``g_bare`` is Ω; the scheme supplies g (√2Ω or |α|Ω) and the frequency sum.
    """
    if omega_a <= 0 or omega_b <= 0:
        raise DomainError("mode frequencies must be > 0")
    if scheme is Scheme.TWO_MODE:
        total = omega_a + 2.0 * omega_b
        detuning = omega_a - 2.0 * omega_b
        g = math.sqrt(2.0) * g_bare
    else:
        if omega_c is None or omega_c <= 0:
            raise DomainError("three-mode dressed energies need omega_c > 0")
        total = omega_a + omega_b + omega_c
        detuning = omega_a - omega_b - omega_c
        g = seed_amplitude * g_bare
    half_split = 0.5 * CONSTANTS.hbar * generalized_rabi(g, detuning)
    center = 0.5 * CONSTANTS.hbar * total
    return center + half_split, center - half_split


def effective_linewidths(
    model: ReducedModel, gamma_a: float, gamma_b: float
) -> tuple[float, float]:
    """Γ± = (Γ_a/2)(Ω′±Δ)/(2Ω′) + Γ_b(Ω′∓Δ)/(2Ω′)."""
    omega_prime = generalized_rabi(model.g, model.detuning)
    if omega_prime == 0.0:
        raise DomainError("linewidths undefined at zero coupling and zero detuning")
    delta = model.detuning
    plus = 0.5 * gamma_a * (omega_prime + delta) / (2.0 * omega_prime) + gamma_b * (
        omega_prime - delta
    ) / (2.0 * omega_prime)
    minus = 0.5 * gamma_a * (omega_prime - delta) / (2.0 * omega_prime) + gamma_b * (
        omega_prime + delta
    ) / (2.0 * omega_prime)
    return plus, minus


def dressed_spectrum(model: ReducedModel, omega_sum: float) -> DressedSpectrum:
    """Dressed lines for a model whose bare energies add up to ħ·``omega_sum``.

    Γ_a and Γ_b come from ``model.bare_linewidths``.
    """
    omega_prime = generalized_rabi(model.g, model.detuning)
    gamma_plus, gamma_minus = effective_linewidths(model, *model.bare_linewidths)
    center = 0.5 * CONSTANTS.hbar * omega_sum
    half_split = 0.5 * CONSTANTS.hbar * omega_prime
    return DressedSpectrum(
        e_plus=center + half_split,
        e_minus=center - half_split,
        gamma_plus=gamma_plus,
        gamma_minus=gamma_minus,
        omega_prime=omega_prime,
    )


class CrossingPoint(NamedTuple):
    detuning: float
    e_plus: float  # E+/ħ, rad/s
    e_minus: float
    splitting: float
    gamma_plus: float | None
    gamma_minus: float | None


def avoided_crossing(
    model: ReducedModel, omega_a: float, detunings: ArrayLike
) -> list[CrossingPoint]:
    """Dressed branches versus Δ at fixed ω_a (the bare energies sum to 2ω_a − Δ).

    Linewidths are None where the branches touch (g = 0, Δ = 0).
    """
    if omega_a <= 0:
        raise DomainError(f"omega_a must be > 0, got {omega_a!r}")
    points = []
    for detuning in np.asarray(detunings, dtype=float).ravel():
        delta = float(detuning)
        at = model.model_copy(update={"detuning": delta})
        splitting = generalized_rabi(at.g, delta)
        center = omega_a - 0.5 * delta
        widths: tuple[float | None, float | None] = (None, None)
        if splitting > 0.0:
            widths = effective_linewidths(at, *at.bare_linewidths)
        upper, lower = center + 0.5 * splitting, center - 0.5 * splitting
        points.append(CrossingPoint(delta, upper, lower, splitting, *widths))
    return points


def transmission_spectrum(
    spectrum: DressedSpectrum, omega_range: ArrayLike
) -> tuple[NDArray, NDArray]:
    """Two unit-height Lorentzians at E±/ħ with FWHM Γ±."""
    if spectrum.gamma_plus <= 0 or spectrum.gamma_minus <= 0:
        raise DomainError("transmission spectrum needs positive linewidths")
    omega = np.asarray(omega_range, dtype=float)
    total = np.zeros_like(omega)
    for energy, width in (
        (spectrum.e_plus, spectrum.gamma_plus),
        (spectrum.e_minus, spectrum.gamma_minus),
    ):
        half = 0.5 * width
        total += half**2 / ((omega - energy / CONSTANTS.hbar) ** 2 + half**2)
    return omega, total


# ---------------------------------------------------------------------------
# Damped dynamics
# ---------------------------------------------------------------------------


def decay_eigenvalues(model: ReducedModel) -> tuple[complex, complex, complex]:
    """(λ₀, λ+, λ−) of the closed {ρ₁₁, ρ₂₂, V} generator at zero detuning."""
    lam0 = -model.mean_decay
    half_difference = 0.5 * (model.gamma1 - model.gamma2)
    root = cmath.sqrt(half_difference**2 - (2.0 * model.g) ** 2)
    return complex(lam0), lam0 + root, lam0 - root


def oscillation_condition(model: ReducedModel) -> bool:
    return 2.0 * model.g > 0.5 * abs(model.gamma1 - model.gamma2)


def damped_rabi_frequency(model: ReducedModel) -> float | None:
    """2Ω_R, or None when the eigenvalues are real (no oscillation)."""
    if not oscillation_condition(model):
        return None
    half_difference = 0.5 * (model.gamma1 - model.gamma2)
    return math.sqrt((2.0 * model.g) ** 2 - half_difference**2)


def half_period(model: ReducedModel) -> float:
    """τ_R/2 = 2π/(2g): the time for one full population revival."""
    if model.g <= 0:
        raise DomainError("half period undefined for g = 0")
    return math.pi / model.g


def strong_coupling_time_criterion(model: ReducedModel) -> CriterionResult:
    """τ_eff ≥ τ_R/2, with margin τ_eff/(τ_R/2)."""
    if model.g <= 0:
        raise DomainError("strong-coupling criterion undefined for g = 0")
    margin = model.tau_eff / half_period(model)
    return CriterionResult(margin >= 1.0, margin)


def strong_coupling_spectral_criterion(model: ReducedModel) -> CriterionResult:
    """π·τ_eff ≥ τ_R/2 (Rayleigh resolvability of the splitting)."""
    if model.g <= 0:
        raise DomainError("strong-coupling criterion undefined for g = 0")
    margin = math.pi * model.tau_eff / half_period(model)
    return CriterionResult(margin >= 1.0, margin)
