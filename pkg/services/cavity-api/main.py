"""cavity-api — HTTP surface over the chi2cavity library.

Responsibilities:
  • Platform presets and feasibility reports
  • Subsystem time evolution (step-capped)
  • Avoided-crossing spectra
  • Prometheus metrics
"""

from __future__ import annotations

import asyncio
import os
import time
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from contextlib import asynccontextmanager
from functools import partial
from typing import Any, TypeVar

import numpy as np
import structlog
import uvicorn
from dotenv import load_dotenv
from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from metrics import cavity_latency_seconds, cavity_rejected_total, cavity_requests_total
from prometheus_client import CONTENT_TYPE_LATEST, generate_latest
from pydantic import BaseModel, Field

from chi2cavity import __version__ as LIBRARY_VERSION
from chi2cavity.analytic import CrossingPoint, ReducedModel, avoided_crossing
from chi2cavity.core import PRESETS, CoupledSystem, Platform, Scheme, angular_frequency
from chi2cavity.dynamics import TRACE_COLUMNS, SubsystemState, evolve_subsystem
from chi2cavity.errors import DomainError, ResourceError
from chi2cavity.feasibility import get_assumptions, platform_report

load_dotenv()

log = structlog.get_logger()

SERVICE_NAME = "cavity-api"
SERVICE_VERSION = "0.1.0"
CAVITY_API_PORT = int(os.getenv("CAVITY_API_PORT", "8010"))
CAVITY_API_WORKERS = int(os.getenv("CAVITY_API_WORKERS", "2"))
MAX_SIMULATION_STEPS = int(float(os.getenv("MAX_SIMULATION_STEPS", "1e7")))
MAX_SWEEP_POINTS = int(float(os.getenv("MAX_SWEEP_POINTS", "1e5")))

_executor = ThreadPoolExecutor(max_workers=CAVITY_API_WORKERS)
_started_at = time.monotonic()

T = TypeVar("T")


# ---------------------------------------------------------------------------
# Request / response models
# ---------------------------------------------------------------------------


class FeasibilityRequest(BaseModel):
    platform: Platform
    f_c: float = Field(default=1.0, gt=0.0)
    assumptions: str = "published"


class SchemeRequest(BaseModel):
    scheme: Scheme = Scheme.TWO_MODE
    tau_a: float = Field(gt=0.0)
    tau_b: float = Field(gt=0.0)
    omega: float = Field(ge=0.0)
    seed_amplitude: float | None = Field(default=None, ge=0.0)


class EvolveRequest(SchemeRequest):
    detuning: float = 0.0
    t_final: float = Field(gt=0.0)
    dt_max: float | None = Field(default=None, gt=0.0)
    max_samples: int = Field(default=1000, ge=1, le=10_000)


class SpectrumRequest(SchemeRequest):
    lambda_a: float = Field(default=0.75e-6, gt=0.0)
    detuning_min: float
    detuning_max: float
    points: int = Field(default=201, ge=1)


class TableResponse(BaseModel):
    columns: list[str]
    rows: list[list[float | None]]
    metadata: dict[str, Any] = Field(default_factory=dict)


# ---------------------------------------------------------------------------
# Compute helpers (run in the executor)
# ---------------------------------------------------------------------------


def _seed(req: SchemeRequest) -> float:
    if req.scheme is Scheme.TWO_MODE:
        if req.seed_amplitude is not None:
            raise DomainError("seed_amplitude only applies to the three-mode scheme")
        return 1.0
    return 1.0 if req.seed_amplitude is None else req.seed_amplitude


def _evolve_sync(req: EvolveRequest) -> TableResponse:
    system = CoupledSystem.from_rates(
        req.scheme,
        req.tau_a,
        req.tau_b,
        req.omega,
        detuning=req.detuning,
        seed_amplitude=_seed(req),
    )
    trace = evolve_subsystem(
        ReducedModel.from_system(system),
        SubsystemState.excited(),
        req.t_final,
        req.dt_max or req.t_final / 1000.0,
        max_samples=req.max_samples,
        max_steps=MAX_SIMULATION_STEPS,
    )
    return TableResponse(
        columns=list(TRACE_COLUMNS),
        rows=[list(row) for row in trace.rows()],
        metadata=trace.metadata,
    )


def _spectrum_sync(req: SpectrumRequest) -> TableResponse:
    if req.points > MAX_SWEEP_POINTS:
        raise ResourceError(f"{req.points} points exceed the limit of {MAX_SWEEP_POINTS}")
    model = ReducedModel.from_lifetimes(
        req.scheme, req.tau_a, req.tau_b, req.omega, seed_amplitude=_seed(req)
    )
    detunings = np.linspace(req.detuning_min, req.detuning_max, req.points)
    points = avoided_crossing(model, angular_frequency(req.lambda_a), detunings)
    return TableResponse(
        columns=list(CrossingPoint._fields),
        rows=[list(p) for p in points],
        metadata={"g": model.g, "gamma1": model.gamma1, "gamma2": model.gamma2},
    )


async def _run(endpoint: str, fn: Callable[..., T], *args: Any) -> T:
    start = time.perf_counter()
    loop = asyncio.get_running_loop()
    try:
        result = await loop.run_in_executor(_executor, partial(fn, *args))
    except ResourceError as exc:
        cavity_rejected_total.labels(endpoint=endpoint).inc()
        cavity_requests_total.labels(endpoint=endpoint, status="413").inc()
        log.warning(f"{endpoint}_rejected", error=str(exc))
        raise HTTPException(status_code=413, detail=str(exc)) from exc
    except (DomainError, ValueError) as exc:
        cavity_requests_total.labels(endpoint=endpoint, status="422").inc()
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except Exception as exc:
        cavity_requests_total.labels(endpoint=endpoint, status="500").inc()
        log.error(f"{endpoint}_failed", error=str(exc))
        raise HTTPException(status_code=500, detail=f"{endpoint} failed") from exc
    cavity_requests_total.labels(endpoint=endpoint, status="200").inc()
    cavity_latency_seconds.labels(endpoint=endpoint).observe(time.perf_counter() - start)
    return result


# ---------------------------------------------------------------------------
# App lifecycle
# ---------------------------------------------------------------------------


@asynccontextmanager
async def lifespan(app: FastAPI):
    log.info(
        "cavity_api_started",
        workers=CAVITY_API_WORKERS,
        max_steps=MAX_SIMULATION_STEPS,
        max_points=MAX_SWEEP_POINTS,
    )
    try:
        yield
    finally:
        _executor.shutdown(wait=False)
        log.info("cavity_api_stopped")


app = FastAPI(title=SERVICE_NAME, version=SERVICE_VERSION, lifespan=lifespan)


# ---------------------------------------------------------------------------
# Endpoints
# ---------------------------------------------------------------------------


@app.get("/health")
async def health() -> dict[str, Any]:
    cavity_requests_total.labels(endpoint="health", status="200").inc()
    return {
        "status": "healthy",
        "service": SERVICE_NAME,
        "version": SERVICE_VERSION,
        "library_version": LIBRARY_VERSION,
    }


@app.get("/status")
async def status() -> dict[str, Any]:
    import psutil

    process = psutil.Process()
    mem_mb = process.memory_info().rss / 1024 / 1024
    return {
        "memory_mb": round(mem_mb, 2),
        "uptime_s": round(time.monotonic() - _started_at, 1),
        "workers": CAVITY_API_WORKERS,
        "limits": {"max_steps": MAX_SIMULATION_STEPS, "max_points": MAX_SWEEP_POINTS},
    }


@app.get("/presets")
async def presets() -> list[dict[str, Any]]:
    cavity_requests_total.labels(endpoint="presets", status="200").inc()
    return [preset.model_dump(mode="json") for preset in PRESETS.values()]


@app.post("/feasibility")
async def feasibility(req: FeasibilityRequest) -> dict[str, Any]:
    def build() -> dict[str, Any]:
        report = platform_report(req.platform, get_assumptions(req.assumptions), req.f_c)
        return report.model_dump(mode="json")

    return await _run("feasibility", build)


@app.post("/evolve", response_model=TableResponse)
async def evolve(req: EvolveRequest) -> TableResponse:
    return await _run("evolve", _evolve_sync, req)


@app.post("/spectrum", response_model=TableResponse)
async def spectrum(req: SpectrumRequest) -> TableResponse:
    return await _run("spectrum", _spectrum_sync, req)


@app.get("/metrics")
async def metrics() -> PlainTextResponse:
    return PlainTextResponse(generate_latest(), media_type=CONTENT_TYPE_LATEST)


# ---------------------------------------------------------------------------
# Entrypoint
# ---------------------------------------------------------------------------

if __name__ == "__main__":
    uvicorn.run("main:app", host="0.0.0.0", port=CAVITY_API_PORT, reload=False)
