"""Shared test configuration.

The whole suite must run with network access disabled: socket connections
are denied for every test, so anything touching the hub or an LLM endpoint
has to go through offline fixtures, scripted mocks, or in-process ASGI.
"""

from __future__ import annotations

import socket
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))  # tests/oracles imports

REPO_ROOT = Path(__file__).resolve().parents[1]


class NetworkDenied(RuntimeError):
    pass


def _deny(*_args, **_kwargs):
    raise NetworkDenied("network access is disabled in the test suite")


@pytest.fixture(autouse=True)
def deny_network(monkeypatch):
    monkeypatch.setattr(socket.socket, "connect", _deny)
    monkeypatch.setattr(socket.socket, "connect_ex", _deny)
    monkeypatch.setattr(socket, "create_connection", _deny)
    monkeypatch.setattr(socket, "getaddrinfo", _deny)
    yield


@pytest.fixture()
def repo_root() -> Path:
    return REPO_ROOT


@pytest.fixture()
def gallery_path() -> Path:
    return REPO_ROOT / "gallery" / "benchmarks.json"


@pytest.fixture()
def hub_fixtures() -> Path:
    return REPO_ROOT / "fixtures" / "hub"
