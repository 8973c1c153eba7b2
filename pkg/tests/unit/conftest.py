"""
Unit test fixtures — load the cavity-api service module exactly once to prevent
Prometheus duplicate-registration errors across test files.
"""

import importlib.util
import os
import sys

import pytest
import structlog


def _load_once(alias: str, svc_dir: str, filename: str):
    """Load a module from an explicit path, registering under `alias`.
    Skips exec if already loaded (prevents Prometheus double-registration)."""
    if alias in sys.modules:
        return sys.modules[alias]
    path = os.path.join(os.path.dirname(__file__), svc_dir, filename)
    spec = importlib.util.spec_from_file_location(alias, path)
    mod = importlib.util.module_from_spec(spec)
    sys.modules[alias] = mod
    spec.loader.exec_module(mod)
    return mod


# ── cavity-api ───────────────────────────────────────────────────────────────
_api_dir = "../../services/cavity-api"
api_metrics = _load_once("api_metrics", _api_dir, "metrics.py")
sys.modules["metrics"] = api_metrics  # satisfies `from metrics import ...` in main.py
api_main = _load_once("api_main", _api_dir, "main.py")


@pytest.fixture(autouse=True)
def _reset_structlog():
    """cli.main binds structlog to the stderr it sees; capsys closes that stream."""
    yield
    structlog.reset_defaults()
