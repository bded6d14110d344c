"""
tests/conftest.py
~~~~~~~~~~~~~~~~~
Shared fixtures: named games and graphs, engine-setting overrides and a
clean bound cache for every test.
"""
from __future__ import annotations

import pytest
from django.core.cache import cache

from apps.games.services import GameFactory
from apps.graphs.services import GraphFactory


@pytest.fixture(autouse=True)
def clear_cache():
    """Wipe the cache before every test so memoised NPA bounds don't bleed across tests."""
    cache.clear()
    yield
    cache.clear()


@pytest.fixture
def engine_settings(settings):
    """Override MONOGAMY_ENGINE keys for one test: engine_settings(NPA_MAX_MATRIX=10)."""

    def override(**values):
        settings.MONOGAMY_ENGINE = {**settings.MONOGAMY_ENGINE, **values}
        return settings.MONOGAMY_ENGINE

    return override


@pytest.fixture
def chsh():
    return GameFactory.make_chsh()


@pytest.fixture
def odd_cycle3():
    return GameFactory.make_odd_cycle(3)


@pytest.fixture
def p2():
    return GraphFactory.path(2)


@pytest.fixture
def p3():
    return GraphFactory.path(3)


@pytest.fixture
def p4():
    return GraphFactory.path(4)


@pytest.fixture
def p6():
    return GraphFactory.path(6)


@pytest.fixture
def triangle():
    return GraphFactory.cycle(3)
