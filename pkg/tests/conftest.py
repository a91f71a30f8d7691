import pytest
from hypothesis import HealthCheck, settings

from thermalkms import QuadratureSpec, ThermalParams

settings.register_profile("thermalkms", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("thermalkms")


@pytest.fixture
def params():
    return ThermalParams(m=1.0, beta=1.0)


@pytest.fixture
def quad():
    return QuadratureSpec(rel_tol=1e-9, abs_tol=1e-14)


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion and assert on it."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def report(number: int, title: str, ok: bool, detail: str):
        line = f"criterion {number:>2} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
        lines.append((number, line))
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
