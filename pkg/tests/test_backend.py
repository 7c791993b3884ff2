"""Backend selection: env flag, runtime override, error handling."""
from __future__ import annotations

import subprocess
import sys

import pytest

from roadjoin import DomainError, backend


def test_default_prefers_numba_when_available():
    if "numba" in backend.available_backends():
        assert set(backend.available_backends()) == {"numba", "python"}
    else:
        assert backend.available_backends() == ["python"]


def test_set_backend_roundtrip():
    previous = backend.set_backend("python")
    try:
        assert backend.get_backend() == "python"
    finally:
        backend.set_backend(previous)
    assert backend.get_backend() == previous


def test_unknown_backend_rejected():
    with pytest.raises(DomainError):
        backend.set_backend("fortran")


def test_env_flag_selects_backend():
    code = ("import roadjoin.backend as b; "
            "print(b.get_backend())")
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={"PATH": "/usr/bin:/bin", "ROADJOIN_BACKEND": "python"},
        capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
