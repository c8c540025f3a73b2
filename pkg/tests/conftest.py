from pathlib import Path

import pytest

from ndpong.env import GameConfig
from ndpong.harness import generate_game_set

GOLDEN = Path(__file__).parent / "golden"
_RESULTS = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def config():
    return GameConfig()


@pytest.fixture(scope="session")
def train_set(config):
    return generate_game_set(1000, 50, config)


@pytest.fixture(scope="session")
def test_set(config):
    return generate_game_set(100000, 50, config)


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(name, passed, detail)``."""
    results = request.config.stash.setdefault(_RESULTS, [])

    def record(name: str, passed: bool, detail: str = "") -> bool:
        results.append((name, passed, detail))
        print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS, [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in results:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
