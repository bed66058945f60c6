from __future__ import annotations

import pytest

from pendulum_bell.model import DeckTable
from pendulum_bell.presets import MAXIMAL_DECKS, TSIRELSON_DECKS
from pendulum_bell.source import SourceModel


@pytest.fixture
def tsirelson_model() -> SourceModel:
    return SourceModel(TSIRELSON_DECKS)


@pytest.fixture
def maximal_model() -> SourceModel:
    return SourceModel(MAXIMAL_DECKS)


@pytest.fixture
def uniform_model() -> SourceModel:
    return SourceModel(DeckTable.uniform())


# ---------------------------------------------------------------------------
# acceptance summary: one line per criterion at the end of the run

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


@pytest.fixture
def record_criterion():
    def record(name: str, ok: bool, detail: str = "") -> None:
        ACCEPTANCE_RESULTS.append((name, bool(ok), detail))
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")

    return record
