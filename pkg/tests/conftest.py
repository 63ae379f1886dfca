import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from persuaded_search import dist as D  # noqa: E402
from persuaded_search.search import Environment  # noqa: E402


@pytest.fixture
def uniform_env():
    return Environment(D.uniform(0.0, 1.0), 2.0 / 3.0)
