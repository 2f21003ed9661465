import pytest

_ACCEPTANCE_LINES: list[str] = []


class AcceptanceRecorder:
    def record(self, number: int, title: str, ok: bool, detail: str, seconds: float, budget: float) -> None:
        timing = f"{seconds:.1f}s (budget {budget:g}s)"
        ok = ok and seconds < budget
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}; {timing}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line


@pytest.fixture
def acceptance():
    return AcceptanceRecorder()


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
