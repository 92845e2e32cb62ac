"""
Shared pytest fixtures for bessel-rkbs tests
"""
import pytest
import tempfile
import shutil
import os
from pathlib import Path
import json

import numpy as np

import spectral


ENV_VARS = [
    'BESSEL_RKBS_OUTPUT_DIR', 'LOG_DIR', 'DEBUG_MODE', 'GRID_BUDGET',
    'DEFAULT_SEED', 'MAX_WORKERS', 'REFERENCE_PERIOD', 'REFERENCE_POINTS'
]


@pytest.fixture(autouse=True)
def clean_env():
    """Clean environment variables and logging handlers before each test"""
    import logging

    # Save original values
    original_env = {key: os.environ.get(key) for key in ENV_VARS}

    # Clear them
    for key in ENV_VARS:
        os.environ.pop(key, None)

    yield

    # Restore original values
    for key in ENV_VARS:
        os.environ.pop(key, None)
        if original_env[key] is not None:
            os.environ[key] = original_env[key]

    # Clean up logging handlers to prevent test interference
    for logger_name in ['rkbs_main', 'rkbs_numerics']:
        logger = logging.getLogger(logger_name)
        for handler in logger.handlers:
            handler.close()
        logger.handlers.clear()
        logger.setLevel(logging.NOTSET)


@pytest.fixture
def temp_dir():
    """Create a temporary directory for tests"""
    temp_path = Path(tempfile.mkdtemp())
    yield temp_path
    # Cleanup
    if temp_path.exists():
        shutil.rmtree(temp_path)


@pytest.fixture
def mock_env_file(temp_dir):
    """Create a mock .env file for testing"""
    env_path = temp_dir / ".env"
    env_content = f"""BESSEL_RKBS_OUTPUT_DIR={temp_dir / 'out'}
LOG_DIR={temp_dir / 'logs'}
DEBUG_MODE=true
GRID_BUDGET=1048576
DEFAULT_SEED=11
MAX_WORKERS=2
REFERENCE_PERIOD=42
REFERENCE_POINTS=2048
"""
    env_path.write_text(env_content)
    return env_path


@pytest.fixture
def mock_config_json(temp_dir):
    """Create a mock config.json file for testing"""
    config_path = temp_dir / "config.json"
    config_data = {
        "default_seed": 99,
        "max_workers": 8,
        "plot_style": "loglog",
    }
    with open(config_path, 'w') as f:
        json.dump(config_data, f)
    return config_path


@pytest.fixture
def cli_workspace(temp_dir, monkeypatch):
    """Run cli commands inside a scratch directory with its own output and log dirs"""
    monkeypatch.chdir(temp_dir)
    monkeypatch.setenv("BESSEL_RKBS_OUTPUT_DIR", str(temp_dir / "reports"))
    monkeypatch.setenv("LOG_DIR", str(temp_dir / "logs"))
    return temp_dir


@pytest.fixture
def small_grid():
    """1-D grid fine enough for unit Gaussians: L = 32, n = 1024"""
    return spectral.GridSpec(1, 1024, 32.0)


@pytest.fixture
def reference_grid():
    """The 1-D reference grid L = 84, n = 4096"""
    return spectral.GridSpec(1, 4096, 84.0)


@pytest.fixture
def rng():
    """Seeded numpy generator"""
    return np.random.default_rng(7)
