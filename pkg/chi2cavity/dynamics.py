"""Time evolution of the coupled cavities.

Two integrators share one fixed-step rule:

* the closed subsystem {ρ₁₁, ρ₂₂, Im V} (plus Re V when detuned, and the
  ρ₃₃/ρ₄₄ feeds), a 6×6 real linear system;
* the full Lindblad master equation on a truncated Fock space, vectorised
  row-major so ρ̇ = L·vec(ρ).

Both are linear, so one classical RK4 step is the matrix polynomial
P = I + hM + (hM)²/2 + (hM)³/6 + (hM)⁴/24 and the evolution is repeated
application of P.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, NamedTuple, TextIO

import numpy as np
import structlog
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.linalg import eigvalsh
from scipy.signal import find_peaks

from chi2cavity.analytic import ReducedModel
from chi2cavity.core import CoupledSystem, Scheme
from chi2cavity.errors import DomainError, ResourceError
from chi2cavity.metrics import integration_steps, simulations_total
from chi2cavity.output import open_output, write_csv

log = structlog.get_logger()

MAX_STEPS = 10**8
DEFAULT_MAX_SAMPLES = 10_000
STEPS_PER_TIMESCALE = 50
POPULATION_TOL = 1e-8

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-8
POSITIVITY_TOL = 1e-8

TRACE_COLUMNS = ("t", "rho11", "rho22", "rho33", "rho44", "imV", "trace_total")

# column order of the subsystem vector
_R11, _R22, _W, _U, _R33, _R44 = range(6)


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------


class SubsystemState(BaseModel):
    """Populations of the four joint states plus V = ρ₁₂ − ρ₂₁.

    ``v`` is Im V = 2·Im ρ₁₂ and ``u`` is 2·Re ρ₁₂; ``u`` only moves when Δ ≠ 0.
    """

    model_config = ConfigDict(frozen=True)

    rho11: float
    rho22: float
    rho33: float = 0.0
    rho44: float = 0.0
    v: float = 0.0
    u: float = 0.0

    @model_validator(mode="after")
    def _check_populations(self) -> SubsystemState:
        populations = (self.rho11, self.rho22, self.rho33, self.rho44)
        for value in populations:
            if not -POPULATION_TOL <= value <= 1.0 + POPULATION_TOL:
                raise ValueError(f"population {value!r} outside [0, 1]")
        if sum(populations) > 1.0 + POPULATION_TOL:
            raise ValueError(f"total population {sum(populations)!r} exceeds 1")
        return self

    @classmethod
    def excited(cls) -> SubsystemState:
        """One photon in mode a: ρ₁₁ = 1."""
        return cls(rho11=1.0, rho22=0.0)

    @property
    def total(self) -> float:
        return self.rho11 + self.rho22 + self.rho33 + self.rho44

    def as_vector(self) -> NDArray:
        return np.array([self.rho11, self.rho22, self.v, self.u, self.rho33, self.rho44])

    @classmethod
    def from_vector(cls, x: NDArray) -> SubsystemState:
        return cls(
            rho11=float(x[_R11]),
            rho22=float(x[_R22]),
            v=float(x[_W]),
            u=float(x[_U]),
            rho33=float(x[_R33]),
            rho44=float(x[_R44]),
        )


@dataclass(frozen=True)
class DensityMatrix:
    """ρ on the (N_a+1)(N_b+1) Fock space, index n_a·(N_b+1) + n_b."""

    dims: tuple[int, int]
    entries: NDArray[np.complex128] = field(repr=False)

    def __post_init__(self) -> None:
        size = self.dims[0] * self.dims[1]
        entries = np.asarray(self.entries, dtype=complex)
        if entries.shape != (size, size):
            raise DomainError(f"density matrix must be {size}×{size}, got {entries.shape}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def fock(cls, dims: tuple[int, int], n_a: int, n_b: int) -> DensityMatrix:
        size = dims[0] * dims[1]
        entries = np.zeros((size, size), dtype=complex)
        idx = fock_index(dims, n_a, n_b)
        entries[idx, idx] = 1.0
        return cls(dims, entries)

    def population(self, n_a: int, n_b: int) -> float:
        idx = fock_index(self.dims, n_a, n_b)
        return float(self.entries[idx, idx].real)

    def coherence(self, first: tuple[int, int], second: tuple[int, int]) -> complex:
        return complex(self.entries[fock_index(self.dims, *first), fock_index(self.dims, *second)])

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def validate(self, expected_trace: float = 1.0) -> None:
        rho = self.entries
        if not np.allclose(rho, rho.conj().T, rtol=0.0, atol=HERMITIAN_TOL):
            raise DomainError("density matrix is not Hermitian")
        if abs(self.trace - expected_trace) > TRACE_TOL:
            raise DomainError(f"density matrix trace {self.trace!r} != {expected_trace!r}")
        floor = float(eigvalsh(0.5 * (rho + rho.conj().T)).min())
        if floor < -POSITIVITY_TOL:
            raise DomainError(f"density matrix has negative eigenvalue {floor!r}")


def fock_index(dims: tuple[int, int], n_a: int, n_b: int) -> int:
    if not (0 <= n_a < dims[0] and 0 <= n_b < dims[1]):
        raise DomainError(f"Fock state |{n_a},{n_b}⟩ outside truncation {dims}")
    return n_a * dims[1] + n_b


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimulationTrace:
    """Sampled evolution. ``values`` columns: ρ₁₁, ρ₂₂, Im V, 2Re ρ₁₂, ρ₃₃, ρ₄₄."""

    times: NDArray[np.float64]
    values: NDArray[np.float64] = field(repr=False)
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def rho11(self) -> NDArray:
        return self.values[:, _R11]

    @property
    def rho22(self) -> NDArray:
        return self.values[:, _R22]

    @property
    def rho33(self) -> NDArray:
        return self.values[:, _R33]

    @property
    def rho44(self) -> NDArray:
        return self.values[:, _R44]

    @property
    def imag_v(self) -> NDArray:
        return self.values[:, _W]

    @property
    def total_population(self) -> NDArray:
        return self.rho11 + self.rho22 + self.rho33 + self.rho44

    @property
    def states(self) -> list[SubsystemState]:
        return [SubsystemState.from_vector(row) for row in self.values]

    @property
    def final(self) -> SubsystemState:
        return SubsystemState.from_vector(self.values[-1])

    def rows(self) -> list[tuple[float, ...]]:
        total = self.total_population
        return [
            (
                float(t),
                float(row[_R11]),
                float(row[_R22]),
                float(row[_R33]),
                float(row[_R44]),
                float(row[_W]),
                float(s),
            )
            for t, row, s in zip(self.times, self.values, total, strict=True)
        ]


def write_trace_csv(trace: SimulationTrace, target: str | Path | TextIO | None) -> None:
    """CSV with header ``t,rho11,rho22,rho33,rho44,imV,trace_total``."""
    if target is None or isinstance(target, str | Path):
        with open_output(target) as stream:
            write_csv(stream, TRACE_COLUMNS, trace.rows(), trace.metadata)
    else:
        write_csv(target, TRACE_COLUMNS, trace.rows(), trace.metadata)


# ---------------------------------------------------------------------------
# Fixed-step integration
# ---------------------------------------------------------------------------


def shortest_timescale(model: ReducedModel) -> float:
    rates = [model.gamma1, model.gamma2, 2.0 * model.g, abs(model.detuning)]
    fastest = max(rates)
    return math.inf if fastest == 0.0 else 1.0 / fastest


def step_count(
    model: ReducedModel, t_final: float, dt_max: float, max_steps: int = MAX_STEPS
) -> int:
    """N = ceil(t_final / min(dt_max, τ_min/50)); the step is then t_final/N."""
    if not t_final > 0:
        raise DomainError(f"t_final must be > 0, got {t_final!r}")
    if not dt_max > 0:
        raise DomainError(f"dt_max must be > 0, got {dt_max!r}")
    dt = min(dt_max, shortest_timescale(model) / STEPS_PER_TIMESCALE)
    steps = max(1, math.ceil(t_final / dt))
    if steps > max_steps:
        raise ResourceError(
            f"integration needs {steps} steps, limit is {max_steps} "
            f"(t_final={t_final!r}, dt={dt!r})"
        )
    return steps


def rk4_propagator(generator: NDArray, h: float) -> NDArray:
    """One classical RK4 step of ẋ = Mx as a matrix."""
    hm = h * np.asarray(generator)
    identity = np.eye(hm.shape[0], dtype=hm.dtype)
    hm2 = hm @ hm
    hm3 = hm2 @ hm
    return identity + hm + hm2 / 2.0 + hm3 / 6.0 + (hm3 @ hm) / 24.0


def _sample_indices(steps: int, max_samples: int) -> tuple[int, list[int]]:
    stride = max(1, math.ceil(steps / max_samples))
    indices = list(range(0, steps + 1, stride))
    if indices[-1] != steps:
        indices.append(steps)
    return stride, indices


def _propagate(
    propagator: NDArray, x0: NDArray, steps: int, max_samples: int
) -> tuple[list[int], list[NDArray]]:
    stride, indices = _sample_indices(steps, max_samples)
    jump = np.linalg.matrix_power(propagator, stride)
    states = [x0]
    x = x0
    for previous, current in zip(indices[:-1], indices[1:], strict=True):
        if current - previous == stride:
            x = jump @ x
        else:
            x = np.linalg.matrix_power(propagator, current - previous) @ x
        states.append(x)
    return indices, states


# ---------------------------------------------------------------------------
# Closed subsystem
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubsystemGenerator:
    """ẋ = M x for x = (ρ₁₁, ρ₂₂, Im V, 2Re ρ₁₂, ρ₃₃, ρ₄₄)."""

    block: NDArray  # 3×3 on (ρ₁₁, ρ₂₂, Im V)
    full: NDArray  # 6×6
    feeds: NDArray  # rows of ``full`` for ρ₃₃ and ρ₄₄


def subsystem_generator(model: ReducedModel) -> SubsystemGenerator:
    g, g1, g2, delta = model.g, model.gamma1, model.gamma2, model.detuning
    mean = model.mean_decay
    m = np.zeros((6, 6))
    m[_R11, [_R11, _W]] = (-g1, -g)
    m[_R22, [_R22, _W]] = (-g2, g)
    m[_W, [_R11, _R22, _W, _U]] = (2.0 * g, -2.0 * g, -mean, -delta)
    m[_U, [_W, _U]] = (delta, -mean)
    if model.scheme is Scheme.TWO_MODE:
        # |0,2⟩ → |0,1⟩ → |0,0⟩ and |1,0⟩ → |0,0⟩
        m[_R33, [_R22, _R33]] = (g2, -0.5 * g2)
        m[_R44, [_R11, _R33]] = (g1, 0.5 * g2)
    else:
        # both single-photon states decay to the vacuum, stored in ρ₃₃
        m[_R33, [_R11, _R22]] = (g1, g2)
    block = m[np.ix_([_R11, _R22, _W], [_R11, _R22, _W])].copy()
    return SubsystemGenerator(block=block, full=m, feeds=m[[_R33, _R44]].copy())


def evolve_subsystem(
    model: ReducedModel,
    initial: SubsystemState,
    t_final: float,
    dt_max: float,
    *,
    max_samples: int = DEFAULT_MAX_SAMPLES,
    max_steps: int = MAX_STEPS,
) -> SimulationTrace:
    if max_samples < 1:
        raise DomainError(f"max_samples must be >= 1, got {max_samples!r}")
    if model.scheme is Scheme.THREE_MODE and initial.rho44 != 0.0:
        raise DomainError("three-mode states have no ρ₄₄")
    steps = step_count(model, t_final, dt_max, max_steps)
    h = t_final / steps
    propagator = rk4_propagator(subsystem_generator(model).full, h)
    indices, states = _propagate(propagator, initial.as_vector(), steps, max_samples)

    simulations_total.labels(integrator="subsystem").inc()
    integration_steps.labels(integrator="subsystem").observe(steps)
    log.debug("subsystem_evolved", scheme=model.scheme.value, steps=steps, step=h, t_final=t_final)
    return SimulationTrace(
        times=np.array(indices, dtype=float) * h,
        values=np.array(states),
        metadata={
            "integrator": "subsystem-rk4",
            "scheme": model.scheme.value,
            "g": model.g,
            "gamma1": model.gamma1,
            "gamma2": model.gamma2,
            "detuning": model.detuning,
            "steps": steps,
            "step": h,
        },
    )


# ---------------------------------------------------------------------------
# Full Lindblad
# ---------------------------------------------------------------------------


def _ladder(n_max: int) -> NDArray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)


def default_truncation(scheme: Scheme) -> tuple[int, int]:
    return (1, 2) if scheme is Scheme.TWO_MODE else (1, 1)


@dataclass(frozen=True)
class LindbladGenerator:
    """ρ̇ = −i[H, ρ] + Σ γ (CρC† − ½{C†C, ρ}) with C ∈ {â, b̂}."""

    scheme: Scheme
    dims: tuple[int, int]
    hamiltonian: NDArray = field(repr=False)  # H/ħ, rad/s
    jumps: tuple[tuple[float, NDArray], ...] = field(repr=False)
    superoperator: NDArray = field(repr=False)

    def __call__(self, rho: DensityMatrix | NDArray) -> NDArray:
        matrix = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
        size = self.hamiltonian.shape[0]
        return (self.superoperator @ matrix.reshape(-1)).reshape(size, size)

    @property
    def excited_state(self) -> tuple[int, int]:
        return (1, 0)

    @property
    def converted_state(self) -> tuple[int, int]:
        return (0, 2) if self.scheme is Scheme.TWO_MODE else (0, 1)


def build_lindblad(
    system: CoupledSystem, trunc: tuple[int, int] | None = None
) -> LindbladGenerator:
    n_a, n_b = trunc if trunc is not None else default_truncation(system.scheme)
    min_b = 2 if system.scheme is Scheme.TWO_MODE else 1
    if n_a < 1 or n_b < min_b:
        raise DomainError(
            f"truncation ({n_a}, {n_b}) too small for {system.scheme.value}: "
            f"need N_a >= 1 and N_b >= {min_b}"
        )
    dims = (n_a + 1, n_b + 1)
    a = np.kron(_ladder(n_a), np.eye(n_b + 1))
    b = np.kron(np.eye(n_a + 1), _ladder(n_b))
    ad, bd = a.conj().T, b.conj().T

    if system.scheme is Scheme.TWO_MODE:
        hamiltonian = system.omega_coupling * (a @ bd @ bd + ad @ b @ b)
    else:
        assert system.seed_amplitude is not None
        hamiltonian = system.seed_amplitude * system.omega_coupling * (a @ bd + ad @ b)
    hamiltonian = hamiltonian + system.detuning * (ad @ a)

    jumps = ((1.0 / system.mode_a.lifetime, a), (1.0 / system.mode_b.lifetime, b))
    identity = np.eye(dims[0] * dims[1])
    superop = -1j * (np.kron(hamiltonian, identity) - np.kron(identity, hamiltonian.T))
    for rate, c in jumps:
        cdc = c.conj().T @ c
        superop += rate * (
            np.kron(c, c.conj()) - 0.5 * (np.kron(cdc, identity) + np.kron(identity, cdc.T))
        )
    return LindbladGenerator(
        scheme=system.scheme,
        dims=dims,
        hamiltonian=hamiltonian,
        jumps=jumps,
        superoperator=superop,
    )


def embed_state(generator: LindbladGenerator, state: SubsystemState) -> DensityMatrix:
    size = generator.dims[0] * generator.dims[1]
    rho = np.zeros((size, size), dtype=complex)
    i1 = fock_index(generator.dims, *generator.excited_state)
    i2 = fock_index(generator.dims, *generator.converted_state)
    rho[i1, i1] = state.rho11
    rho[i2, i2] = state.rho22
    rho[i1, i2] = 0.5 * (state.u + 1j * state.v)
    rho[i2, i1] = np.conj(rho[i1, i2])
    if generator.scheme is Scheme.TWO_MODE:
        rho[fock_index(generator.dims, 0, 1), fock_index(generator.dims, 0, 1)] = state.rho33
        rho[0, 0] = state.rho44
    else:
        rho[0, 0] = state.rho33
    return DensityMatrix(generator.dims, rho)


def project_state(generator: LindbladGenerator, rho: DensityMatrix) -> NDArray:
    """Subsystem vector read off a full density matrix."""
    rho12 = rho.coherence(generator.excited_state, generator.converted_state)
    if generator.scheme is Scheme.TWO_MODE:
        rho33, rho44 = rho.population(0, 1), rho.population(0, 0)
    else:
        rho33, rho44 = rho.population(0, 0), 0.0
    x = np.empty(6)
    x[_R11] = rho.population(*generator.excited_state)
    x[_R22] = rho.population(*generator.converted_state)
    x[_W] = 2.0 * rho12.imag
    x[_U] = 2.0 * rho12.real
    x[_R33] = rho33
    x[_R44] = rho44
    return x


class LindbladResult(NamedTuple):
    trace: SimulationTrace
    final: DensityMatrix


def evolve_lindblad(
    system: CoupledSystem,
    t_final: float,
    dt_max: float,
    *,
    trunc: tuple[int, int] | None = None,
    initial: SubsystemState | DensityMatrix | None = None,
    max_samples: int = DEFAULT_MAX_SAMPLES,
    max_steps: int = MAX_STEPS,
) -> LindbladResult:
    """Full master-equation evolution, projected onto the subsystem variables.

    Uses the same step rule as :func:`evolve_subsystem` for the same system.
    """
    if max_samples < 1:
        raise DomainError(f"max_samples must be >= 1, got {max_samples!r}")
    generator = build_lindblad(system, trunc)
    if initial is None:
        initial = SubsystemState.excited()
    if isinstance(initial, SubsystemState):
        rho0 = embed_state(generator, initial)
    else:
        if initial.dims != generator.dims:
            raise DomainError(
                f"initial state truncation {initial.dims} does not match {generator.dims}"
            )
        rho0 = initial
    rho0.validate(expected_trace=rho0.trace)

    model = ReducedModel.from_system(system)
    steps = step_count(model, t_final, dt_max, max_steps)
    h = t_final / steps
    propagator = rk4_propagator(generator.superoperator, h)
    size = generator.dims[0] * generator.dims[1]
    indices, vectors = _propagate(propagator, rho0.entries.reshape(-1), steps, max_samples)
    matrices = [DensityMatrix(generator.dims, v.reshape(size, size)) for v in vectors]

    simulations_total.labels(integrator="lindblad").inc()
    integration_steps.labels(integrator="lindblad").observe(steps)
    log.debug("lindblad_evolved", scheme=system.scheme.value, dims=generator.dims, steps=steps)
    trace = SimulationTrace(
        times=np.array(indices, dtype=float) * h,
        values=np.array([project_state(generator, m) for m in matrices]),
        metadata={
            "integrator": "lindblad-rk4",
            "scheme": system.scheme.value,
            "truncation": list(generator.dims),
            "steps": steps,
            "step": h,
        },
    )
    return LindbladResult(trace=trace, final=matrices[-1])


# ---------------------------------------------------------------------------
# π pulse
# ---------------------------------------------------------------------------


class PiPulseResult(NamedTuple):
    duration: float
    fidelity: float
    trace: SimulationTrace


def pi_pulse(
    system: CoupledSystem,
    pulse_amplitude: float,
    *,
    hold: float = 0.0,
    max_samples: int = DEFAULT_MAX_SAMPLES,
) -> PiPulseResult:
    """Seed at |α| for π/(2|α|Ω), then off for ``hold``; fidelity is the final ρ₂₂."""
    if system.scheme is not Scheme.THREE_MODE:
        raise DomainError("a π pulse needs the seeded three-mode scheme")
    if not pulse_amplitude > 0 or not system.omega_coupling > 0:
        raise DomainError("π pulse duration is infinite for |α|Ω = 0")
    if hold < 0:
        raise DomainError(f"hold must be >= 0, got {hold!r}")
    driven = ReducedModel.from_system(system.model_copy(update={"seed_amplitude": pulse_amplitude}))
    duration = math.pi / (2.0 * driven.g)
    trace = evolve_subsystem(
        driven, SubsystemState.excited(), duration, duration / 200.0, max_samples=max_samples
    )
    if hold > 0:
        idle = driven.model_copy(update={"g": 0.0})
        tail = evolve_subsystem(idle, trace.final, hold, hold / 200.0, max_samples=max_samples)
        trace = SimulationTrace(
            times=np.concatenate([trace.times, duration + tail.times[1:]]),
            values=np.vstack([trace.values, tail.values[1:]]),
            metadata={**trace.metadata, "hold": hold},
        )
    fidelity = float(trace.rho22[-1])
    log.info("pi_pulse", amplitude=pulse_amplitude, duration=duration, fidelity=fidelity)
    return PiPulseResult(duration=duration, fidelity=fidelity, trace=trace)


# ---------------------------------------------------------------------------
# Trace analysis
# ---------------------------------------------------------------------------


def _refined_peaks(times: NDArray, values: NDArray) -> tuple[NDArray, NDArray]:
    """Local maxima of ``values``, refined by a parabola through each peak sample."""
    idx, _ = find_peaks(values)
    peak_t, peak_v = [], []
    for i in idx:
        t0, t1, t2 = times[i - 1 : i + 2]
        y0, y1, y2 = values[i - 1 : i + 2]
        # uniform sampling within a stride
        h = 0.5 * (t2 - t0)
        curvature = y0 - 2.0 * y1 + y2
        if curvature == 0.0 or not math.isclose(t1 - t0, t2 - t1, rel_tol=1e-9):
            peak_t.append(t1)
            peak_v.append(y1)
            continue
        offset = 0.5 * (y0 - y2) / curvature
        peak_t.append(t1 + offset * h)
        peak_v.append(y1 - 0.25 * (y0 - y2) * offset)
    return np.array(peak_t), np.array(peak_v)


def revival_time(trace: SimulationTrace) -> float | None:
    """Time of the first ρ₁₁ maximum after t = 0, or None if there is none."""
    times, values = _refined_peaks(trace.times, trace.rho11)
    return float(times[0]) if times.size else None


def envelope_rate(
    trace: SimulationTrace, column: Callable[[SimulationTrace], NDArray] | None = None
) -> float:
    """Envelope decay rate from a log-linear fit to the peaks of ρ₁₁ (or ``column``)."""
    values = column(trace) if column is not None else trace.rho11
    times, peaks = _refined_peaks(trace.times, values)
    mask = peaks > 0
    if np.count_nonzero(mask) < 2:
        raise DomainError("need at least two positive peaks to fit an envelope")
    slope, _ = np.polyfit(times[mask], np.log(peaks[mask]), 1)
    return float(-slope)
