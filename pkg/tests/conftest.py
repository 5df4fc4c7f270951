import math

import pytest

from xfreq_noise.pamp import TVCircuitModel

W0 = 2 * math.pi * 300e6


@pytest.fixture(scope="session")
def model():
    return TVCircuitModel()


def mhz(f):
    return 2 * math.pi * f * 1e6


_ACCEPTANCE: list[str] = []


@pytest.fixture
def record_criterion():
    """Record one PASS/FAIL line for the acceptance summary."""

    def record(number: int, ok: bool, detail: str, seconds: float) -> None:
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}  {detail}  [{seconds:.2f} s]"
        _ACCEPTANCE.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
