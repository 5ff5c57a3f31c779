import mpmath
import pytest

from sqden.realnum import RealSpec

CONSTANT_NAMES = ["pi", "e", "sqrt2", "golden", "euler-gamma"]

ACCEPTANCE_LINES: list[str] = []


def mp_constant(name: str, dps: int = 250):
    """Reference value from mpmath, an independent evaluation route."""
    with mpmath.workdps(dps):
        return {
            "pi": +mpmath.pi,
            "e": +mpmath.e,
            "sqrt2": mpmath.sqrt(2),
            "golden": +mpmath.phi,
            "euler-gamma": +mpmath.euler,
        }[name]


def mp_contains(real, value, dps: int = 250) -> bool:
    with mpmath.workdps(dps):
        lo = mpmath.mpf(real.lower.numerator) / real.lower.denominator
        hi = mpmath.mpf(real.upper.numerator) / real.upper.denominator
        return lo <= value <= hi


@pytest.fixture(params=CONSTANT_NAMES)
def constant(request) -> RealSpec:
    return RealSpec.constant(request.param)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
