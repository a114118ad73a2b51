import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "kahlerlift",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("kahlerlift")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report_line(capsys):
    """Record a one-line acceptance verdict; all lines are repeated at the end of the run."""

    def emit(text: str) -> None:
        _ACCEPTANCE_LINES.append(text)
        with capsys.disabled():
            print("\n" + text)

    return emit


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
