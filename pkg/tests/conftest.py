import pathlib
import random

import pytest

from quadfe.group import setup_group

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def ctx():
    return setup_group(128)


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


@pytest.fixture
def fixtures_dir():
    return FIXTURES
