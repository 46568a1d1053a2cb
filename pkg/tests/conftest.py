import numpy as np
import pytest

from analysis.gate_design import optimize_fidelity
from core.spin_system import SpinChainParams


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (a + a.conj().T) / 2


def random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


@pytest.fixture(scope="session")
def alanine() -> SpinChainParams:
    return SpinChainParams.from_hz(34.8, 53.8, -4320.0, -20100.0, label="L-alanine")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def alanine_optimum(alanine):
    return optimize_fidelity(alanine)


@pytest.fixture
def isolated_env(monkeypatch, tmp_path):
    """Point the run archive at a temp file and keep diagnostics off stdout."""
    monkeypatch.setenv("SOFTPULSE_DB_PATH", str(tmp_path / "runs.db"))
    monkeypatch.setenv("SOFTPULSE_LOG_LEVEL", "ERROR")
    monkeypatch.delenv("SOFTPULSE_MOLECULE", raising=False)
    return tmp_path
