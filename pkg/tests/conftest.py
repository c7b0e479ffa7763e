import pytest

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def record():
    """Record one acceptance criterion outcome, then assert it."""

    def _record(label: str, ok: bool, detail: str = "") -> None:
        ACCEPTANCE_RESULTS.append((label, bool(ok), detail))
        assert ok, f"{label}: {detail}"

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")
