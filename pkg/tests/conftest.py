import numpy as np
import pytest

from equilateral import norms


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for the acceptance summary, then assert."""

    def check(label, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        request.config._acceptance_lines.append(f"[{status}] {label}  {detail}".rstrip())
        assert ok, f"{label}: {detail}"

    return check


@pytest.fixture
def linf_two_thirds():
    return norms.WeightedLinf([1.0, 2.0 / 3.0])


def random_vectors(rng, count, dim, scale=10.0):
    return rng.standard_normal((count, dim)) * scale
