"""Analytic mode profiles and FieldGrid file I/O.

Every profile here has a closed-form overlap, which is what the quadrature
tests compare against. File layout (text and binary alike): origin, spacing,
dims, then one row per cell with Re/Im of x, y, z in row-major order, z fastest.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from chi2cavity.chi2_overlap import FieldGrid, GridSpec
from chi2cavity.errors import DomainError

_HEADER_KEYS = ("origin", "spacing", "dims")


def _polarization(polarization: ArrayLike) -> NDArray:
    p = np.asarray(polarization, dtype=complex)
    if p.shape != (3,):
        raise DomainError(f"polarization must be a 3-vector, got shape {p.shape}")
    norm = float(np.linalg.norm(p))
    if norm == 0.0:
        raise DomainError("polarization must be non-zero")
    return p / norm


def _with_envelope(spec: GridSpec, envelope: NDArray, polarization: ArrayLike) -> FieldGrid:
    values = envelope[..., np.newaxis] * _polarization(polarization)
    return FieldGrid.normalized(spec, values)


def constant_field(spec: GridSpec, polarization: ArrayLike) -> FieldGrid:
    return _with_envelope(spec, np.ones(spec.dims), polarization)


def standing_wave(
    spec: GridSpec,
    polarization: ArrayLike,
    wavenumbers: tuple[float, float, float],
    phases: tuple[float, float, float] = (0.0, 0.0, 0.0),
) -> FieldGrid:
    """Separable real profile Π sin(k_i x_i + φ_i); k_i = 0 leaves an axis flat."""
    coords = spec.centers()
    envelope = np.ones(spec.dims)
    for x, k, phi in zip(coords, wavenumbers, phases, strict=True):
        if k != 0.0:
            envelope = envelope * np.sin(k * x + phi)
    return _with_envelope(spec, envelope, polarization)


def plane_wave(
    spec: GridSpec, polarization: ArrayLike, wavevector: tuple[float, float, float]
) -> FieldGrid:
    """Travelling wave e^{i k·r}."""
    x, y, z = spec.centers()
    kx, ky, kz = wavevector
    return _with_envelope(spec, np.exp(1j * (kx * x + ky * y + kz * z)), polarization)


def gaussian_envelope(
    spec: GridSpec,
    polarization: ArrayLike,
    center: tuple[float, float, float],
    widths: tuple[float, float, float],
) -> FieldGrid:
    """exp(-Σ (x_i - c_i)²/w_i²), renormalised to the sampled peak."""
    coords = spec.centers()
    exponent = np.zeros(spec.dims)
    for x, c, w in zip(coords, center, widths, strict=True):
        if w <= 0:
            raise DomainError(f"Gaussian widths must be positive, got {widths}")
        exponent += ((x - c) / w) ** 2
    return _with_envelope(spec, np.exp(-exponent), polarization)


def rotating_polarization(spec: GridSpec, wavenumber: float, axis: int = 0) -> FieldGrid:
    """Unit-norm field (cos kx, sin kx, 0) turning along one axis."""
    coordinate = spec.centers()[axis]
    values = np.zeros((*spec.dims, 3), dtype=complex)
    values[..., 0] = np.cos(wavenumber * coordinate)
    values[..., 1] = np.sin(wavenumber * coordinate)
    return FieldGrid(spec, values)


# ---------------------------------------------------------------------------
# I/O
# ---------------------------------------------------------------------------


def _columns(grid: FieldGrid) -> NDArray:
    flat = grid.values.reshape(-1, 3)
    columns = np.empty((flat.shape[0], 6))
    columns[:, 0::2] = flat.real
    columns[:, 1::2] = flat.imag
    return columns


def _from_columns(spec: GridSpec, columns: NDArray) -> FieldGrid:
    expected = int(np.prod(spec.dims))
    columns = np.asarray(columns, dtype=float)
    if columns.size % 6 != 0 or (columns.ndim == 2 and columns.shape[1] != 6):
        raise DomainError("field file rows must have 6 columns (Re, Im per component)")
    columns = columns.reshape(-1, 6)
    if columns.shape[0] != expected:
        raise DomainError(f"field file has {columns.shape[0]} cells, header says {expected}")
    values = (columns[:, 0::2] + 1j * columns[:, 1::2]).reshape(*spec.dims, 3)
    return FieldGrid(spec, values)


def write_field_text(grid: FieldGrid, path: str | Path) -> None:
    spec = grid.spec
    header = "\n".join(
        [
            "origin " + " ".join(repr(v) for v in spec.origin),
            "spacing " + " ".join(repr(v) for v in spec.spacing),
            "dims " + " ".join(str(v) for v in spec.dims),
            "re_x im_x re_y im_y re_z im_z",
        ]
    )
    np.savetxt(path, _columns(grid), fmt="%.17g", header=header, comments="# ")


def read_field_text(path: str | Path) -> FieldGrid:
    header: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            parts = line.lstrip("#").split()
            if parts and parts[0] in _HEADER_KEYS:
                header[parts[0]] = parts[1:]
    missing = [key for key in _HEADER_KEYS if len(header.get(key, [])) != 3]
    if missing:
        raise DomainError(f"field file {path} lacks header entries: {missing}")
    spec = GridSpec(
        origin=tuple(float(v) for v in header["origin"]),  # type: ignore[arg-type]
        spacing=tuple(float(v) for v in header["spacing"]),  # type: ignore[arg-type]
        dims=tuple(int(v) for v in header["dims"]),  # type: ignore[arg-type]
    )
    return _from_columns(spec, np.loadtxt(path, comments="#", ndmin=2))


def write_field_binary(grid: FieldGrid, path: str | Path) -> None:
    """Little-endian float64: 9 header values then 6 per cell."""
    spec = grid.spec
    header = np.array([*spec.origin, *spec.spacing, *spec.dims], dtype="<f8")
    np.concatenate([header, _columns(grid).ravel()]).astype("<f8").tofile(path)


def read_field_binary(path: str | Path) -> FieldGrid:
    raw = np.fromfile(path, dtype="<f8")
    if raw.size < 9:
        raise DomainError(f"field file {path} is too short for a header")
    spec = GridSpec(
        origin=tuple(raw[0:3]),  # type: ignore[arg-type]
        spacing=tuple(raw[3:6]),  # type: ignore[arg-type]
        dims=tuple(int(round(v)) for v in raw[6:9]),  # type: ignore[arg-type]
    )
    return _from_columns(spec, raw[9:])


def read_field(path: str | Path) -> FieldGrid:
    """Dispatch on suffix: ``.bin`` is binary, anything else is text."""
    if Path(path).suffix == ".bin":
        return read_field_binary(path)
    return read_field_text(path)
