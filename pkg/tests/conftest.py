"""
Shared fixtures for the chi2cavity test suite.
Loads settings from .env with fallback to the committed tests/files/.env.test,
so smoke tests find the service without extra setup.

The service URL is configurable via CAVITY_API_URL so the same smoke tests
run locally (default → localhost) and against a deployed instance.
"""

import os
from pathlib import Path

import pytest
import requests
from dotenv import load_dotenv

_ROOT = Path(__file__).parent.parent

# .env takes precedence; fall back to committed .env.test
if (_ROOT / ".env").exists():
    load_dotenv(_ROOT / ".env")
else:
    load_dotenv(_ROOT / "tests" / "files" / ".env.test")


@pytest.fixture(scope="session")
def api_url() -> str:
    return os.environ.get("CAVITY_API_URL", "http://localhost:8010")


@pytest.fixture(scope="session")
def http():
    """Requests session. Default timeout of 30s; feasibility and evolve run in a thread pool."""
    s = requests.Session()
    s.request = lambda method, url, **kw: requests.Session.request(
        s, method, url, timeout=kw.pop("timeout", 30), **kw
    )
    yield s
    s.close()
