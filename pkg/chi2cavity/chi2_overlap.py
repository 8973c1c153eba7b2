"""χ⁽²⁾ tensor algebra and the mode-overlap coupling constant.

The coupling constant follows from the overlap of three normalised mode
profiles contracted with the susceptibility tensor:

    ħΩ = ε₀ · Π_modes √(ħω/(2ε₀n²V)) · ∫ dV χ_ijk E_a^i E_b^j E_c^k

(two-mode: mode b counted twice, without the square root).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import structlog
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.transform import Rotation

from chi2cavity.core import CONSTANTS, CavityMode, CoupledSystem, Scheme
from chi2cavity.errors import DomainError

log = structlog.get_logger()

UNIT_NORM_TOL = 1e-9
ROTATION_TOL = 1e-9
FIELD_MAX_TOL = 1e-12

# Index triples with all-distinct axes: the only non-zero 4̄3m entries.
_DISTINCT_TRIPLES = tuple(itertools.permutations(range(3)))


# ---------------------------------------------------------------------------
# Tensor
# ---------------------------------------------------------------------------


def _frozen(array: NDArray) -> NDArray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Chi2Tensor:
    """Rank-3 second-order susceptibility χ_ijk in m/V."""

    entries: NDArray[np.float64]

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=float)
        if entries.shape != (3, 3, 3):
            raise DomainError(f"χ⁽²⁾ tensor must be 3×3×3, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise DomainError("χ⁽²⁾ tensor has non-finite entries")
        object.__setattr__(self, "entries", _frozen(entries))

    @classmethod
    def cubic_43m(cls, magnitude: float) -> Chi2Tensor:
        """Zinc-blende (4̄3m, e.g. GaAs): χ_ijk = |χ| for i, j, k all distinct."""
        entries = np.zeros((3, 3, 3))
        for i, j, k in _DISTINCT_TRIPLES:
            entries[i, j, k] = abs(magnitude)
        return cls(entries)

    @classmethod
    def for_growth_axis(cls, magnitude: float, axis: ArrayLike = (0.0, 0.0, 1.0)) -> Chi2Tensor:
        """4̄3m tensor in the lab frame of a crystal grown with ``axis`` along lab z."""
        rotation = rotation_aligning(axis, (0.0, 0.0, 1.0))
        return rotate_tensor(cls.cubic_43m(magnitude), rotation)


def _unit_vector(name: str, vector: ArrayLike) -> NDArray:
    v = np.asarray(vector)
    if v.shape != (3,):
        raise DomainError(f"{name} must be a 3-vector, got shape {v.shape}")
    norm = float(np.sqrt(np.sum(np.abs(v) ** 2)))
    if abs(norm - 1.0) > UNIT_NORM_TOL:
        raise DomainError(f"{name} must have unit norm, got |{name}| = {norm!r}")
    return v


def contract_polarizations(
    tensor: Chi2Tensor, e1: ArrayLike, e2: ArrayLike, e3: ArrayLike
) -> float | complex:
    """Σ_ijk χ_ijk e1_i e2_j e3_k for unit polarisation vectors."""
    v1 = _unit_vector("e1", e1)
    v2 = _unit_vector("e2", e2)
    v3 = _unit_vector("e3", e3)
    value = np.einsum("ijk,i,j,k->", tensor.entries, v1, v2, v3)
    if np.iscomplexobj(value):
        return complex(value)
    return float(value)


def _check_rotation(rotation: ArrayLike) -> NDArray:
    r = np.asarray(rotation, dtype=float)
    if r.shape != (3, 3):
        raise DomainError(f"rotation must be 3×3, got shape {r.shape}")
    if not np.allclose(r.T @ r, np.eye(3), rtol=0.0, atol=ROTATION_TOL):
        raise DomainError("rotation is not orthogonal")
    if abs(np.linalg.det(r) - 1.0) > ROTATION_TOL:
        raise DomainError("rotation is improper (det R != +1)")
    return r


def rotate_tensor(tensor: Chi2Tensor, rotation: ArrayLike) -> Chi2Tensor:
    """χ'_ijk = Σ_lmn R_il R_jm R_kn χ_lmn."""
    r = _check_rotation(rotation)
    return Chi2Tensor(np.einsum("il,jm,kn,lmn->ijk", r, r, r, tensor.entries))


def rotation_aligning(source: ArrayLike, target: ArrayLike) -> NDArray:
    """Proper rotation R with R·ŝ = t̂ (shortest arc)."""
    s = np.asarray(source, dtype=float)
    t = np.asarray(target, dtype=float)
    if s.shape != (3,) or t.shape != (3,):
        raise DomainError("rotation_aligning takes two 3-vectors")
    s_norm, t_norm = np.linalg.norm(s), np.linalg.norm(t)
    if s_norm == 0 or t_norm == 0:
        raise DomainError("cannot align a zero vector")
    s, t = s / s_norm, t / t_norm
    axis = np.cross(s, t)
    sin_angle = np.linalg.norm(axis)
    cos_angle = float(np.clip(np.dot(s, t), -1.0, 1.0))
    if sin_angle < 1e-12:
        if cos_angle > 0:
            return np.eye(3)
        # antiparallel: half turn about any axis perpendicular to s
        helper = np.eye(3)[int(np.argmin(np.abs(s)))]
        perpendicular = np.cross(s, helper)
        perpendicular /= np.linalg.norm(perpendicular)
        return Rotation.from_rotvec(math.pi * perpendicular).as_matrix()
    angle = math.atan2(sin_angle, cos_angle)
    return Rotation.from_rotvec(angle * axis / sin_angle).as_matrix()


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Uniform Cartesian grid: ``dims`` cells of size ``spacing`` from ``origin``."""

    origin: tuple[float, float, float]
    spacing: tuple[float, float, float]
    dims: tuple[int, int, int]

    def __post_init__(self) -> None:
        if len(self.origin) != 3 or len(self.spacing) != 3 or len(self.dims) != 3:
            raise DomainError("grid origin, spacing and dims must have three entries")
        if any(not s > 0 for s in self.spacing):
            raise DomainError(f"grid spacing must be positive, got {self.spacing}")
        if any(int(d) < 1 for d in self.dims):
            raise DomainError(f"grid dims must be positive, got {self.dims}")
        object.__setattr__(self, "origin", tuple(float(o) for o in self.origin))
        object.__setattr__(self, "spacing", tuple(float(s) for s in self.spacing))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    @classmethod
    def box(
        cls,
        lower: tuple[float, float, float],
        upper: tuple[float, float, float],
        dims: tuple[int, int, int],
    ) -> GridSpec:
        spacing = tuple((hi - lo) / n for lo, hi, n in zip(lower, upper, dims, strict=True))
        return cls(origin=lower, spacing=spacing, dims=dims)  # type: ignore[arg-type]

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def volume(self) -> float:
        return self.cell_volume * int(np.prod(self.dims))

    def centers(self) -> tuple[NDArray, NDArray, NDArray]:
        """Cell-centre coordinates, each shaped ``dims`` (ij indexing)."""
        axes = [
            o + (np.arange(n) + 0.5) * h
            for o, h, n in zip(self.origin, self.spacing, self.dims, strict=True)
        ]
        x, y, z = np.meshgrid(*axes, indexing="ij")
        return x, y, z

    def matches(self, other: GridSpec) -> bool:
        if self.dims != other.dims:
            return False
        scale = max(self.spacing)
        return bool(
            np.allclose(self.origin, other.origin, rtol=0.0, atol=1e-12 * scale)
            and np.allclose(self.spacing, other.spacing, rtol=1e-12, atol=0.0)
        )


@dataclass(frozen=True)
class FieldGrid:
    """Complex vector mode profile sampled at cell centres, peak norm 1."""

    spec: GridSpec
    values: NDArray[np.complex128] = field(repr=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (*self.spec.dims, 3):
            raise DomainError(
                f"field values must have shape {(*self.spec.dims, 3)}, got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("field has non-finite values")
        peak = float(np.max(np.linalg.norm(values, axis=-1)))
        if abs(peak - 1.0) > FIELD_MAX_TOL:
            raise DomainError(f"field must be normalised to peak norm 1, got {peak!r}")
        object.__setattr__(self, "values", _frozen(values))

    @classmethod
    def normalized(cls, spec: GridSpec, values: ArrayLike) -> FieldGrid:
        raw = np.asarray(values, dtype=complex)
        peak = float(np.max(np.linalg.norm(raw, axis=-1)))
        if peak == 0.0:
            raise DomainError("cannot normalise an identically zero field")
        return cls(spec, raw / peak)

    @property
    def origin(self) -> tuple[float, float, float]:
        return self.spec.origin

    @property
    def spacing(self) -> tuple[float, float, float]:
        return self.spec.spacing

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.spec.dims


# ---------------------------------------------------------------------------
# Overlap and coupling
# ---------------------------------------------------------------------------


def complex_overlap_integral(
    tensor: Chi2Tensor, fa: FieldGrid, fb: FieldGrid, fc: FieldGrid
) -> complex:
    """Midpoint-rule ∫ dV χ_ijk fa_i fb_j fc_k, before taking the real part."""
    if not (fa.spec.matches(fb.spec) and fa.spec.matches(fc.spec)):
        raise DomainError("overlap fields must share origin, spacing and dims")
    bc = np.einsum("ijk,...j,...k->...i", tensor.entries, fb.values, fc.values, optimize=True)
    total = np.sum(fa.values * bc)
    return complex(total * fa.spec.cell_volume)


def overlap_integral(tensor: Chi2Tensor, fa: FieldGrid, fb: FieldGrid, fc: FieldGrid) -> float:
    """Real overlap in m³·(m/V). Pass ``fb`` twice for the two-mode scheme."""
    value = complex_overlap_integral(tensor, fa, fb, fc)
    log.debug("overlap_integral", dims=fa.dims, real=value.real, imag=value.imag)
    return value.real


def estimated_overlap(chi2_magnitude: float, volume_a: float, fraction: float = 0.5) -> float:
    """Shortcut for well-overlapping modes in a (111)-grown crystal: ½|χ⁽²⁾|V_a."""
    if volume_a <= 0:
        raise DomainError(f"volume_a must be > 0, got {volume_a!r}")
    if fraction <= 0:
        raise DomainError(f"overlap fraction must be > 0, got {fraction!r}")
    return fraction * abs(chi2_magnitude) * volume_a


def field_per_photon(mode: CavityMode) -> float:
    """Peak single-photon field amplitude √(ħω/(2ε₀n²V)) in V/m."""
    return math.sqrt(
        CONSTANTS.hbar
        * mode.angular_frequency
        / (2.0 * CONSTANTS.eps0 * mode.refractive_index**2 * mode.mode_volume)
    )


def coupling_constant(system: CoupledSystem, overlap: float) -> float:
    """Ω in rad/s from the overlap integral (seed amplitude not included)."""
    if not math.isfinite(overlap):
        raise DomainError(f"overlap must be finite, got {overlap!r}")
    prefactor = CONSTANTS.eps0 / CONSTANTS.hbar
    e_a = field_per_photon(system.mode_a)
    e_b = field_per_photon(system.mode_b)
    if system.scheme is Scheme.TWO_MODE:
        product = e_a * e_b * e_b
    else:
        assert system.mode_c is not None
        product = e_a * e_b * field_per_photon(system.mode_c)
    return abs(prefactor * product * overlap)
