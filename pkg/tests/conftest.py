"""
Pytest configuration and shared fixtures for the mooncat test suite.

Provides:
- Small memory models that keep Liouvillians in the dense regime
- Synthetic repetition-code error models
- Configuration loaders built from INI text
- A mock logger capturing log calls
"""

from typing import Dict
from unittest.mock import MagicMock

import numpy as np
import pytest

from mooncat.config.loader import ConfigLoader
from mooncat.models import CircuitErrorModel, MoonModel


# =============================================================================
# Memory Models
# =============================================================================

@pytest.fixture
def standard_cat_model():
    """Standard cat at alpha=2 with weak single-photon loss."""
    return MoonModel(alpha=2.0, lam=0.0, kappa2=1.0, kappa1=1e-3)


@pytest.fixture
def moon_cat_model():
    """Moon cat at alpha=2, lambda=1 with weak single-photon loss."""
    return MoonModel(alpha=2.0, lam=1.0, kappa2=1.0, kappa1=1e-3)


@pytest.fixture
def small_model():
    """Cat at alpha=1 small enough for fast dense spectra."""
    return MoonModel(alpha=1.0, lam=0.0, kappa2=1.0, kappa1=1e-2)


@pytest.fixture
def pure_loss_model():
    """Single-photon loss only, no engineered dissipation."""
    return MoonModel(alpha=0.0, kappa2=0.0, kappa1=1.0, dim=10)


# =============================================================================
# Repetition Code
# =============================================================================

@pytest.fixture
def uniform_error_model():
    """Every operation fails with probability 1%."""
    return CircuitErrorModel(
        p_prep_Z=0.01,
        p_meas_Z=0.01,
        p_cnot_Zc=0.01,
        p_cnot_Zt=0.01,
        p_cnot_ZcZt=0.01,
    )


@pytest.fixture
def noiseless_error_model():
    """All error probabilities zero."""
    return CircuitErrorModel(p_prep_Z=0.0, p_meas_Z=0.0, p_cnot_Zc=0.0, p_cnot_Zt=0.0, p_cnot_ZcZt=0.0)


# =============================================================================
# Configuration
# =============================================================================

@pytest.fixture
def config_text() -> Dict[str, str]:
    """Small INI snippets per command, sized for quick runs."""
    return {
        "kernel": (
            "[Common]\nseed = 3\nthreads = 1\n"
            "[kernel]\nalphas = 1.0, 2.0\nlams = 0.0, 0.5\n"
        ),
        "wigner": (
            "[Common]\nthreads = 1\n"
            "[wigner]\nalpha = 1.5\nlam = 0.5\nstate = even\nextent = 4.0\npoints = 21\n"
        ),
        "scaling": (
            "[Common]\nthreads = 1\n"
            "[moon]\nalpha = 1.0\nkappa2 = 1.0\nkappa1 = 1e-3\n"
            "[scaling]\nn_bars = 1.0, 1.5, 2.0\nlams = 0.0\n"
        ),
        "zeno": (
            "[Common]\nthreads = 1\n"
            "[moon]\nalpha = 1.5\nlam = 0.0\nkappa2 = 1.0\nkappa1 = 1e-3\n"
            "[zeno]\nmethod = analytic\nxi_points = 9\n"
        ),
        "adaptive": (
            "[Common]\nseed = 11\nthreads = 1\n"
            "[adaptive]\nmode = campaign\nrate = 1.0\nshots = 50\nmax_rounds = 2\n"
        ),
        "repcode": (
            "[Common]\nseed = 5\nthreads = 1\n"
            "[repcode]\nkinds = moon\ndistances = 3\nratios = 1e-3\nshots = 2000\nmin_errors = 10\n"
        ),
        "circuit": (
            "[Common]\nthreads = 1\n"
            "[circuit]\npoints = 7\n"
        ),
    }


@pytest.fixture
def write_config(tmp_path):
    """Write INI text to a file under tmp_path and return its path."""
    def _write(text: str, name: str = "run.ini") -> str:
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return _write


@pytest.fixture
def loader_from_text():
    """Build a ConfigLoader from INI text."""
    return ConfigLoader.from_string


# =============================================================================
# Utilities
# =============================================================================

@pytest.fixture
def rng():
    """Seeded numpy generator."""
    return np.random.default_rng(1234)


@pytest.fixture
def mock_logger():
    """Create a mock logger that captures all log calls."""
    logger = MagicMock()
    logger._logs = {"debug": [], "info": [], "warning": [], "error": []}

    def capture_log(level):
        def _log(msg, *args):
            logger._logs[level].append(msg % args if args else msg)
        return _log

    logger.debug = MagicMock(side_effect=capture_log("debug"))
    logger.info = MagicMock(side_effect=capture_log("info"))
    logger.warning = MagicMock(side_effect=capture_log("warning"))
    logger.error = MagicMock(side_effect=capture_log("error"))
    return logger
