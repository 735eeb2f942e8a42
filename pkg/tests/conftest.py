"""Shared fixtures for the test suite."""

import pytest

from maskattack.attack import AttackConfig
from maskattack.backends import toy_backends
from maskattack.core import AttackMode, Label, tokenize
from maskattack.fixtures import food_fixture


@pytest.fixture
def food_backends():
    """Backends for the canonical 'the food was good' fixture."""
    return toy_backends(food_fixture())


@pytest.fixture
def food_sentence():
    return tokenize("the food was good")


@pytest.fixture
def positive():
    return Label(1)


@pytest.fixture
def replace_config():
    # 0.7 keeps single replacements on 4-token sentences above threshold
    return AttackConfig(mode=AttackMode.R, k=50, sim_threshold=0.7, sentiment_task=True)
