"""
Unit tests — cavity-api endpoints, awaited in-process.

Verifies:
- /health, /presets, /status and /metrics payloads
- /feasibility returns a report per platform
- /evolve and /spectrum tables, plus 413 on resource limits and 422 on domain errors
- Request validation at the pydantic layer
"""

import math
import sys

import pytest
from fastapi import HTTPException
from pydantic import ValidationError

_api = sys.modules["api_main"]


def _evolve_request(**overrides):
    params = {"tau_a": 10e-12, "tau_b": 10e-12, "omega": 1e11, "t_final": 20e-12, "max_samples": 11}
    params.update(overrides)
    return _api.EvolveRequest(**params)


def _spectrum_request(**overrides):
    params = {
        "tau_a": 10e-12,
        "tau_b": 20e-12,
        "omega": 1e11,
        "detuning_min": -1e12,
        "detuning_max": 1e12,
        "points": 21,
    }
    params.update(overrides)
    return _api.SpectrumRequest(**params)


class TestServiceEndpoints:
    async def test_health(self):
        body = await _api.health()
        assert body["status"] == "healthy"
        assert body["service"] == "cavity-api"

    async def test_status_reports_limits(self):
        body = await _api.status()
        assert body["limits"]["max_steps"] == _api.MAX_SIMULATION_STEPS
        assert body["memory_mb"] > 0

    async def test_presets(self):
        body = await _api.presets()
        assert {p["name"] for p in body} == {"pcdmc", "micropillar", "microdisk"}

    async def test_metrics_exposes_request_counter(self):
        await _api.health()
        response = await _api.metrics()
        assert b"cavity_api_requests_total" in response.body


class TestFeasibility:
    async def test_report(self):
        body = await _api.feasibility(_api.FeasibilityRequest(platform="pcdmc"))
        assert body["platform"] == "pcdmc"
        assert body["tau_eff"] == pytest.approx(4.8e-12, rel=0.02)

    async def test_unknown_assumptions_is_422(self):
        req = _api.FeasibilityRequest(platform="microdisk", assumptions="optimistic")
        with pytest.raises(HTTPException) as exc_info:
            await _api.feasibility(req)
        assert exc_info.value.status_code == 422


class TestEvolve:
    async def test_trace(self):
        body = await _api.evolve(_evolve_request())
        assert body.columns[0] == "t"
        assert 2 <= len(body.rows) <= 12
        assert body.rows[0][1] == 1.0
        assert body.rows[-1][0] == pytest.approx(20e-12)

    async def test_step_limit_is_413(self):
        with pytest.raises(HTTPException) as exc_info:
            await _api.evolve(_evolve_request(t_final=1.0))
        assert exc_info.value.status_code == 413

    async def test_seed_on_two_mode_is_422(self):
        with pytest.raises(HTTPException) as exc_info:
            await _api.evolve(_evolve_request(seed_amplitude=2.0))
        assert exc_info.value.status_code == 422
        assert "seed_amplitude" in exc_info.value.detail

    def test_validation(self):
        with pytest.raises(ValidationError):
            _evolve_request(tau_a=0.0)
        with pytest.raises(ValidationError):
            _evolve_request(max_samples=0)


class TestSpectrum:
    async def test_minimum_splitting(self):
        body = await _api.spectrum(_spectrum_request())
        index = body.columns.index("splitting")
        assert min(row[index] for row in body.rows) == pytest.approx(
            2 * math.sqrt(2) * 1e11, rel=1e-9
        )

    async def test_point_limit_is_413(self):
        with pytest.raises(HTTPException) as exc_info:
            await _api.spectrum(_spectrum_request(points=200_000))
        assert exc_info.value.status_code == 413

    async def test_three_mode_widths_at_resonance(self):
        req = _spectrum_request(
            scheme="three-mode",
            tau_b=10e-12,
            omega=1e10,
            detuning_min=0.0,
            detuning_max=0.0,
            points=1,
        )
        body = await _api.spectrum(req)
        (row,) = body.rows
        # Γ_a/4 + Γ_b/2 with 1/τ_a = 1/τ_b = 1e11
        assert row[body.columns.index("gamma_plus")] == pytest.approx(7.5e10, rel=1e-12)
        assert row[body.columns.index("gamma_minus")] == pytest.approx(7.5e10, rel=1e-12)
