import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from unitalkit.finite_field import make_tower  # noqa: E402


@pytest.fixture(scope="session")
def F3():
    return make_tower(3, 1)


@pytest.fixture(scope="session")
def F4():
    return make_tower(2, 2)


@pytest.fixture(scope="session")
def F5():
    return make_tower(5, 1)
