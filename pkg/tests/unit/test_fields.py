"""Unit tests — analytic mode profiles and field file I/O"""

import math

import numpy as np
import pytest

from chi2cavity.chi2_overlap import GridSpec
from chi2cavity.errors import DomainError
from chi2cavity.fields import (
    constant_field,
    gaussian_envelope,
    read_field,
    read_field_text,
    standing_wave,
    write_field_binary,
    write_field_text,
)

_SPEC = GridSpec(origin=(-1e-6, 0.0, 0.0), spacing=(2.5e-7, 5e-7, 1e-6), dims=(8, 4, 2))


class TestProfiles:
    def test_constant_field_normalises_polarization(self):
        grid = constant_field(_SPEC, (3.0, 4.0, 0.0))
        np.testing.assert_allclose(grid.values[0, 0, 0], [0.6, 0.8, 0.0])

    def test_zero_polarization_rejected(self):
        with pytest.raises(DomainError):
            constant_field(_SPEC, (0.0, 0.0, 0.0))

    def test_zero_wavenumber_leaves_axis_flat(self):
        grid = standing_wave(_SPEC, (1.0, 0.0, 0.0), (math.pi / 2e-6, 0.0, 0.0))
        x_profile = grid.values[:, 0, 0, 0]
        np.testing.assert_allclose(grid.values[:, 3, 1, 0], x_profile)
        assert np.max(np.abs(grid.values)) == pytest.approx(1.0)

    def test_gaussian_peaks_at_centre(self):
        spec = GridSpec(origin=(0.0, 0.0, 0.0), spacing=(1.0, 1.0, 1.0), dims=(5, 5, 5))
        grid = gaussian_envelope(spec, (0.0, 0.0, 1.0), (2.5, 2.5, 2.5), (1.0, 1.0, 1.0))
        norms = np.linalg.norm(grid.values, axis=-1)
        assert np.unravel_index(np.argmax(norms), norms.shape) == (2, 2, 2)

    def test_gaussian_rejects_zero_width(self):
        with pytest.raises(DomainError, match="widths"):
            gaussian_envelope(_SPEC, (1.0, 0.0, 0.0), (0.0, 0.0, 0.0), (1e-6, 0.0, 1e-6))


class TestFieldFiles:
    def test_text_file_keeps_grid_and_values(self, tmp_path):
        grid = standing_wave(_SPEC, (1.0, 1j, 0.0), (math.pi / 2e-6, 0.0, math.pi / 2e-6))
        path = tmp_path / "mode_a.txt"
        write_field_text(grid, path)
        loaded = read_field(path)
        assert loaded.spec == grid.spec
        np.testing.assert_array_equal(loaded.values, grid.values)

    def test_binary_dispatch_on_suffix(self, tmp_path):
        grid = constant_field(_SPEC, (0.0, 0.0, 1.0))
        path = tmp_path / "mode_b.bin"
        write_field_binary(grid, path)
        loaded = read_field(path)
        assert loaded.dims == (8, 4, 2)
        np.testing.assert_array_equal(loaded.values, grid.values)

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("# origin 0 0 0\n1 0 0 0 0 0\n")
        with pytest.raises(DomainError, match="header"):
            read_field_text(path)

    def test_cell_count_mismatch_rejected(self, tmp_path):
        path = tmp_path / "short.txt"
        path.write_text(
            "# origin 0 0 0\n# spacing 1 1 1\n# dims 2 1 1\n1 0 0 0 0 0\n"
        )
        with pytest.raises(DomainError, match="cells"):
            read_field_text(path)

    def test_short_rows_rejected(self, tmp_path):
        # six 5-column rows hold exactly five cells' worth of numbers
        path = tmp_path / "five_columns.txt"
        rows = "\n".join(["1 0 0 0 0"] * 6)
        path.write_text(f"# origin 0 0 0\n# spacing 1 1 1\n# dims 5 1 1\n{rows}\n")
        with pytest.raises(DomainError, match="6 columns"):
            read_field_text(path)

    def test_ragged_binary_payload_rejected(self, tmp_path):
        path = tmp_path / "ragged.bin"
        header = [0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]
        np.array(header + [0.5] * 7, dtype="<f8").tofile(path)
        with pytest.raises(DomainError, match="6 columns"):
            read_field(path)

    def test_truncated_binary_rejected(self, tmp_path):
        path = tmp_path / "tiny.bin"
        np.zeros(4, dtype="<f8").tofile(path)
        with pytest.raises(DomainError, match="too short"):
            read_field(path)
