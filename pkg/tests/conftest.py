from __future__ import annotations

import pytest

from oracles import corpus_terms

ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def corpus():
    return corpus_terms()


@pytest.fixture(scope="session")
def record():
    def put(criterion: int, ok: bool, detail: str = "") -> None:
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else "")
        ACCEPTANCE[criterion] = line
        print(line)
    return put


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
