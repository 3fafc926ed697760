# tests/conftest.py
import os
import sys

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

import pytest  # noqa: E402

import config  # noqa: E402


@pytest.fixture
def allow_p2():
    config.set_allow_p2_runtime(True)
    yield
    config.set_allow_p2_runtime(None)
