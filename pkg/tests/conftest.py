import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nlsff.thermo import find_q, solve_dressed

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def model():
    """Thermodynamic model at c = 2, density D = 0.5."""
    return solve_dressed(2.0, find_q(2.0, 0.5))


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("NLSFF_CACHE_DIR", str(tmp_path / "thermo-cache"))


_ACCEPTANCE = {}


@pytest.fixture
def acceptance(request):
    """Record the outcome of one acceptance criterion for the terminal summary."""

    def record(number, ok, detail):
        _ACCEPTANCE[number] = (bool(ok), detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, f"criterion {number} failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
