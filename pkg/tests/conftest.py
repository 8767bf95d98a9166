import json

import pytest

from hermite_quad.hermite_space import make_space


@pytest.fixture
def space1():
    """s=1, a=1, b=1, omega=1/2."""
    return make_space(1, 1, 0.5, s=1)


@pytest.fixture
def space_file(tmp_path):
    def _write(cfg):
        path = tmp_path / "space.json"
        path.write_text(json.dumps(cfg))
        return str(path)

    return _write


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_line():
    """Record a one-line pass/fail verdict for the acceptance summary."""

    def _record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
