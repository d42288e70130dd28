from __future__ import annotations

import os
from functools import lru_cache

import pytest

from persym.engine import census

LONGRUN = os.environ.get("PERSYM_LONGRUN") == "1"


@lru_cache(maxsize=None)
def cached_census(n: int, k: int):
    return census(n, k)


@pytest.fixture(scope="session")
def census_of():
    return cached_census


def pytest_collection_modifyitems(config, items):
    if LONGRUN:
        return
    skip = pytest.mark.skip(reason="long run; set PERSYM_LONGRUN=1")
    for item in items:
        if "longrun" in item.keywords:
            item.add_marker(skip)
