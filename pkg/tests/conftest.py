from __future__ import annotations

from pathlib import Path

import pytest

from endoqre.io_formats import read_fcidump

DATA = Path(__file__).parent / "data"

_ACCEPTANCE: list[str] = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE.append(line)
    print(line)


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def h2():
    return read_fcidump(DATA / "h2_sto3g.fcidump")


@pytest.fixture(scope="session")
def lih():
    return read_fcidump(DATA / "lih_sto3g.fcidump")


@pytest.fixture(scope="session")
def h2o():
    return read_fcidump(DATA / "h2o_sto3g.fcidump")


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
