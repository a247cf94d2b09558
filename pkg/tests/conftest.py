"""
Shared pytest configuration.
"""

import sys
from pathlib import Path

import pytest
from loguru import logger

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-scale runs (deselect with -m 'not slow')")


@pytest.fixture(autouse=True)
def quiet_logger():
    """Keep loguru at WARNING during tests."""
    logger.remove()
    logger.add(sys.stderr, level="WARNING")
    yield
