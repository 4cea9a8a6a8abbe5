"""Shared fixtures: session-scoped spectra, eigenvectors, and CLI runners."""

from __future__ import annotations

import contextlib
import io
import subprocess

import pytest

from filmspec import cli as cli_mod
from filmspec.eigensolver import compute_spectrum
from filmspec.spectral import build_eigenvector


@pytest.fixture(scope="session")
def spectrum01():
    """First ten eigenvalue records at eps = 0.1, default M."""
    return compute_spectrum(0.1, 10)


@pytest.fixture(scope="session")
def spectrum01_20():
    """First twenty records at eps = 0.1; rows 15 and 20 live here."""
    return compute_spectrum(0.1, 20)


@pytest.fixture(scope="session")
def spectrum1():
    """First five records at eps = 1."""
    return compute_spectrum(1.0, 5)


@pytest.fixture(scope="session")
def vectors01(spectrum01):
    """Unit eigenvectors 1..10 at eps = 0.1 on the default window."""
    return [build_eigenvector(0.1, rec) for rec in spectrum01]


@pytest.fixture(scope="session")
def run_cli():
    """In-process CLI call; returns (exit_code, stdout_text)."""

    def _run(argv):
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = cli_mod.run(list(argv))
        return code, buf.getvalue()

    return _run


@pytest.fixture(scope="session")
def run_cli_proc():
    """Subprocess CLI call via the installed entry point; bytes in/out."""

    def _run(argv):
        return subprocess.run(["filmspec", *argv], capture_output=True, timeout=300)

    return _run
