from __future__ import annotations

import sys
from pathlib import Path

import pytest

from ssr import _kernels

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

DATA = Path(__file__).resolve().parents[1] / "src" / "ssr" / "data"
CASES = DATA / "worked_cases" / "cases.jsonl"
FIXTURES = DATA / "worked_cases" / "fixtures"

_ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_configure(config):
    # compile the kernels once so no timed test pays for it
    _kernels.warm_up()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


@pytest.fixture
def acceptance():
    """Record one criterion line for the end-of-run summary."""

    def record(name: str, ok: bool, detail: str) -> None:
        _ACCEPTANCE[name] = (bool(ok), detail)

    return record


@pytest.fixture(scope="session")
def cases():
    from ssr.bench.datasets import load_dataset

    return {p.meta["case"]: p for p in load_dataset(CASES, sample_size=None)}


@pytest.fixture(scope="session")
def replay():
    from ssr.gateway import mock_gateway

    return mock_gateway(FIXTURES)


def envelope_of(case: str) -> dict:
    """Translation recorded for one worked case."""
    import json

    src = Path(__file__).resolve().parents[1] / "scripts" / "data" / "worked_cases_source.json"
    for c in json.loads(src.read_text(encoding="utf-8")):
        if c["name"] == case:
            return c["translation"]
    raise KeyError(case)


@pytest.fixture
def envelope():
    return envelope_of
