from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hornify.ontology import parse_ontology  # noqa: E402
from hornify.program import parse_program  # noqa: E402

CORPUS = Path(__file__).resolve().parents[1] / "src" / "hornify" / "corpus"

OEX_TEXT = """\
SubClassOf(A Or(B C))
SubClassOf(B Some(R D))
SubClassOf(Some(R D) D)
SubClassOf(C Some(R B))
SubClassOf(And(D E) Bot)
"""

PEX_TEXT = """\
A(?x) -> B(?x).
B(?x) -> C(?x) | D(?x).
C(?x) -> False(?x).
D(?x) -> C(f(?x)).
"""


@pytest.fixture
def oex():
    return parse_ontology(OEX_TEXT)


@pytest.fixture
def pex():
    return parse_program(PEX_TEXT)


@pytest.fixture
def corpus_dir():
    return CORPUS


# -- one summary line per acceptance criterion ------------------------------------------

_CRITERIA: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.failed):
        _CRITERIA[number] = (title, report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")
