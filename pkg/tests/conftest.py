"""
Global test configuration for stirlingblocks
"""
import logging
import os

import pytest
from click.testing import CliRunner

from stirlingblocks.core.stirling import KStirlingWord
from stirlingblocks.core.trees import parse_tree
from stirlingblocks.services.enumeration import bundled_spec

# Worked example: levels {4,1,3}, {5,2,6}, {7,8}
WORKED_WORD = "4415778852213663"


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Keep developer STIRLINGBLOCKS_* variables out of the tests"""
    for name in list(os.environ):
        if name.startswith("STIRLINGBLOCKS_"):
            monkeypatch.delenv(name, raising=False)
    monkeypatch.setattr("stirlingblocks.config.settings._dotenv_loaded", True)


@pytest.fixture(autouse=True)
def reset_package_logger():
    """The CLI installs its own handler; undo it so caplog keeps working"""
    logger = logging.getLogger("stirlingblocks")
    saved = (list(logger.handlers), logger.level, logger.propagate)
    yield
    logger.handlers[:] = saved[0]
    logger.setLevel(saved[1])
    logger.propagate = saved[2]


@pytest.fixture
def worked_word():
    return KStirlingWord.parse(WORKED_WORD)


@pytest.fixture
def example_tree():
    """Four-leaf tree with leaves 1,4,2,3; reduces to (((0,3),1),2)"""
    return parse_tree("(((1,4),2),3)")


@pytest.fixture
def phi_tree():
    return parse_tree("(0,((1,3),2))")


@pytest.fixture
def spec():
    """Bundled pattern sequence by name"""
    return bundled_spec


@pytest.fixture
def runner():
    """Click CLI runner with stderr kept apart from stdout"""
    try:
        return CliRunner(mix_stderr=False)
    except TypeError:
        # click 8.2 always captures stderr separately
        return CliRunner()
