from pathlib import Path

import pytest

from alcomega import parse_kb
from alcomega.semantics import Interpretation

KB_DIR = Path(__file__).resolve().parent.parent / "kb"


@pytest.fixture
def kb_dir():
    return KB_DIR


@pytest.fixture(scope="session")
def eagle_kb():
    return parse_kb((KB_DIR / "eagle.kb").read_text())


@pytest.fixture(scope="session")
def reading_kb():
    return parse_kb((KB_DIR / "reading_group.kb").read_text())


def five_node_model() -> Interpretation:
    """Delta = {a, b, c, {a,b}, {a,c}} with atoms a, b, c."""
    return Interpretation(
        pool=("a", "b", "c", "p1", "p2"),
        elems={"p1": {"a", "b"}, "p2": {"a", "c"}},
        atoms={"a", "b", "c"},
    )


@pytest.fixture
def five_nodes():
    return five_node_model()


CRITERIA: dict[int, str] = {}


def record(number: int, ok: bool, detail: str):
    CRITERIA[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[n])
