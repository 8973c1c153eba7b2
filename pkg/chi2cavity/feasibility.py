"""Platform feasibility estimates for the seeded and unseeded schemes.

For each microcavity platform the seeded half period scales as
τ_R/2 = coeff·√(f_c/n); inverting the strong-coupling criteria gives the
mean seed photon number n needed in mode c.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from enum import StrEnum
from typing import Final

import structlog
from pydantic import BaseModel, ConfigDict, Field

from chi2cavity.analytic import (
    CriterionResult,
    ReducedModel,
    strong_coupling_spectral_criterion,
    strong_coupling_time_criterion,
)
from chi2cavity.chi2_overlap import coupling_constant, estimated_overlap
from chi2cavity.core import (
    CoupledSystem,
    Platform,
    PlatformPreset,
    Scheme,
    effective_lifetime,
    get_preset,
)
from chi2cavity.errors import DomainError
from chi2cavity.metrics import feasibility_reports_total
from chi2cavity.output import format_value

log = structlog.get_logger()

QUOTE_MISMATCH_TOL = 0.2


class Criterion(StrEnum):
    TIME = "time"
    SPECTRAL = "spectral"


# ---------------------------------------------------------------------------
# Assumptions and published numbers
# ---------------------------------------------------------------------------


class AssumptionSet(BaseModel):
    """Geometry choices behind a report; printed with every report."""

    model_config = ConfigDict(frozen=True)

    name: str
    pump_wavelength_ratio: float = Field(default=0.5, gt=0.0)  # λ_a/λ_b
    design_wavelength: float | None = Field(default=None, gt=0.0)  # λ_b, preset's if None
    overlap_fraction: float = Field(default=0.5, gt=0.0)  # overlap = fraction·|χ⁽²⁾|·V_a
    description: str = ""


PUBLISHED: Final = AssumptionSet(
    name="published",
    description=(
        "λ_a = λ_b/2, λ_c = λ_b at the preset design wavelength; per-mode volumes "
        "factor·(λ/n)³ at each mode's own wavelength; V_c = f_c·V_c(f_c=1); "
        "(111)-grown, well-overlapping modes: overlap = ½|χ⁽²⁾|V_a"
    ),
)

ASSUMPTION_SETS: Final[dict[str, AssumptionSet]] = {PUBLISHED.name: PUBLISHED}


def get_assumptions(name: str) -> AssumptionSet:
    try:
        return ASSUMPTION_SETS[name]
    except KeyError as exc:
        raise DomainError(
            f"unknown assumption set {name!r}; choose from {sorted(ASSUMPTION_SETS)}"
        ) from exc


class PublishedEstimate(BaseModel):
    """Numbers quoted for a platform, kept for side-by-side comparison."""

    model_config = ConfigDict(frozen=True)

    tau_eff: float
    half_period_coeff: float
    threshold: float  # seed photons per f_c
    unseeded_half_period: float
    gap_orders: int

    @property
    def implied_threshold(self) -> float:
        """Time-criterion inversion of the quoted coefficient and lifetime."""
        return (self.half_period_coeff / self.tau_eff) ** 2


PUBLISHED_ESTIMATES: Final[dict[Platform, PublishedEstimate]] = {
    Platform.PCDMC: PublishedEstimate(
        tau_eff=4.8e-12,
        half_period_coeff=5e-9,
        threshold=1e6,
        unseeded_half_period=18e-9,
        gap_orders=3,
    ),
    Platform.MICROPILLAR: PublishedEstimate(
        tau_eff=8.0e-12,
        half_period_coeff=44e-9,
        threshold=3e7,
        unseeded_half_period=177e-9,
        gap_orders=4,
    ),
    Platform.MICRODISK: PublishedEstimate(
        tau_eff=95e-12,
        half_period_coeff=37e-9,
        threshold=76e3,
        unseeded_half_period=148e-9,
        gap_orders=2,
    ),
}


# ---------------------------------------------------------------------------
# Threshold algebra
# ---------------------------------------------------------------------------


def _seeded_margin(
    half_period_coeff: float, tau_eff: float, f_c: float, n: float, criterion: Criterion
) -> float:
    margin = tau_eff / (half_period_coeff * math.sqrt(f_c / n))
    return math.pi * margin if criterion is Criterion.SPECTRAL else margin


def photon_threshold(
    half_period_coeff: float,
    tau_eff: float,
    f_c: float = 1.0,
    criterion: Criterion | str = Criterion.TIME,
) -> float:
    """Smallest mean seed photon number n whose criterion margin is ≥ 1.

    time: n = f_c·(coeff/τ_eff)²; spectral: that divided by π².
    """
    criterion = Criterion(criterion)
    inputs = {"half_period_coeff": half_period_coeff, "tau_eff": tau_eff, "f_c": f_c}
    for name, value in inputs.items():
        if not value > 0:
            raise DomainError(f"{name} must be > 0, got {value!r}")
    n = f_c * (half_period_coeff / tau_eff) ** 2
    if criterion is Criterion.SPECTRAL:
        n /= math.pi**2
    # roundoff can leave the margin a few ulps short of 1
    while _seeded_margin(half_period_coeff, tau_eff, f_c, n, criterion) < 1.0:
        n = math.nextafter(n, math.inf)
    return n


def unseeded_gap(half_period: float, tau_eff: float) -> float:
    """Orders of magnitude by which the unseeded scheme misses the spectral criterion."""
    if not half_period > 0 or not tau_eff > 0:
        raise DomainError("unseeded gap needs positive half period and lifetime")
    return math.log10(half_period / (math.pi * tau_eff))


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


class FeasibilityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    platform: Platform
    assumptions: str
    f_c: float = Field(gt=0.0)
    wavelength_a: float
    wavelength_b: float
    tau_a: float
    tau_b: float
    tau_eff: float
    overlap: float
    omega_single: float  # Ω at n = 1, f_c = 1
    half_period_coeff: float  # τ_R/2 at n = f_c = 1
    n_min_time: float
    n_min_spectral: float
    unseeded_omega: float
    unseeded_half_period: float
    unseeded_gap_orders: float
    published: PublishedEstimate | None = None
    notes: list[str] = Field(default_factory=list)

    @property
    def unseeded_gap_rounded(self) -> int:
        return round(self.unseeded_gap_orders)

    def seeded_half_period(self, photons: float) -> float:
        if not photons > 0:
            raise DomainError(f"photon number must be > 0, got {photons!r}")
        return self.half_period_coeff * math.sqrt(self.f_c / photons)

    def reduced_model(self, photons: float) -> ReducedModel:
        """Seeded model with mean photon number ``photons`` in mode c."""
        if not photons > 0:
            raise DomainError(f"photon number must be > 0, got {photons!r}")
        return ReducedModel.from_lifetimes(
            Scheme.THREE_MODE,
            self.tau_a,
            self.tau_b,
            self.omega_single / math.sqrt(self.f_c),
            seed_amplitude=math.sqrt(photons),
        )

    def margins(self, photons: float) -> tuple[CriterionResult, CriterionResult]:
        model = self.reduced_model(photons)
        return strong_coupling_time_criterion(model), strong_coupling_spectral_criterion(model)


def _quote_notes(platform: Platform, quote: PublishedEstimate) -> list[str]:
    implied = quote.implied_threshold
    ratio = quote.threshold / implied
    if abs(ratio - 1.0) <= QUOTE_MISMATCH_TOL:
        return []
    log.warning(
        "published_threshold_discrepancy",
        platform=platform.value,
        quoted=quote.threshold,
        implied=implied,
        ratio=ratio,
    )
    return [
        f"quoted threshold {quote.threshold:.3g} f_c differs from the time-criterion "
        f"inversion of the quoted numbers, {implied:.3g} f_c (ratio {ratio:.2f})"
    ]


def platform_report(
    preset: PlatformPreset | Platform | str,
    assumptions: AssumptionSet = PUBLISHED,
    f_c: float = 1.0,
) -> FeasibilityReport:
    if not isinstance(preset, PlatformPreset):
        preset = get_preset(preset)
    if not f_c > 0:
        raise DomainError(f"f_c must be > 0, got {f_c!r}")

    wavelength_b = assumptions.design_wavelength or preset.design_wavelength
    wavelength_a = assumptions.pump_wavelength_ratio * wavelength_b
    mode_a = preset.mode(wavelength_a)
    mode_b = preset.mode(wavelength_b)
    tau_a, tau_b = mode_a.lifetime, mode_b.lifetime
    tau_eff = effective_lifetime(Scheme.THREE_MODE, tau_a, tau_b)
    overlap = estimated_overlap(
        preset.chi2_magnitude, mode_a.mode_volume, assumptions.overlap_fraction
    )

    seeded = CoupledSystem.three_mode(mode_a, mode_b, preset.mode(wavelength_b), 0.0, 1.0)
    omega_single = coupling_constant(seeded, overlap)
    unseeded = CoupledSystem.two_mode(mode_a, mode_b, 0.0)
    unseeded_omega = coupling_constant(unseeded, overlap)
    if omega_single == 0.0 or unseeded_omega == 0.0:
        raise DomainError("coupling constant vanishes for this preset")

    half_period_coeff = math.pi / omega_single
    unseeded_half_period = math.pi / (math.sqrt(2.0) * unseeded_omega)
    quote = PUBLISHED_ESTIMATES.get(preset.name)

    report = FeasibilityReport(
        platform=preset.name,
        assumptions=assumptions.name,
        f_c=f_c,
        wavelength_a=wavelength_a,
        wavelength_b=wavelength_b,
        tau_a=tau_a,
        tau_b=tau_b,
        tau_eff=tau_eff,
        overlap=overlap,
        omega_single=omega_single,
        half_period_coeff=half_period_coeff,
        n_min_time=photon_threshold(half_period_coeff, tau_eff, f_c, Criterion.TIME),
        n_min_spectral=photon_threshold(half_period_coeff, tau_eff, f_c, Criterion.SPECTRAL),
        unseeded_omega=unseeded_omega,
        unseeded_half_period=unseeded_half_period,
        unseeded_gap_orders=unseeded_gap(unseeded_half_period, tau_eff),
        published=quote,
        notes=_quote_notes(preset.name, quote) if quote is not None else [],
    )
    feasibility_reports_total.labels(platform=preset.name.value).inc()
    log.info(
        "feasibility_report",
        platform=preset.name.value,
        tau_eff=tau_eff,
        half_period_coeff=half_period_coeff,
        n_min_time=report.n_min_time,
    )
    return report


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

_TEXT_FIELDS = (
    "assumptions",
    "f_c",
    "wavelength_a",
    "wavelength_b",
    "tau_a",
    "tau_b",
    "tau_eff",
    "overlap",
    "omega_single",
    "half_period_coeff",
    "n_min_time",
    "n_min_spectral",
    "unseeded_omega",
    "unseeded_half_period",
    "unseeded_gap_orders",
)


def report_text(reports: Iterable[FeasibilityReport]) -> str:
    """``key: value`` lines grouped under one ``[platform]`` heading each."""
    blocks = []
    for report in reports:
        lines = [f"[{report.platform.value}]"]
        for name in _TEXT_FIELDS:
            lines.append(f"{name}: {format_value(getattr(report, name))}")
        lines.append(f"unseeded_gap_rounded: {report.unseeded_gap_rounded}")
        if report.published is not None:
            for name, value in report.published.model_dump().items():
                lines.append(f"published_{name}: {format_value(value)}")
        for note in report.notes:
            lines.append(f"note: {note}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def report_payload(reports: Iterable[FeasibilityReport]) -> dict:
    return {"reports": [report.model_dump(mode="json") for report in reports]}
