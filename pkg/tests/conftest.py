"""Shared fixtures for the test suite.

The acceptance tests lean on a few large Monte Carlo runs. Those are
computed once per session here; the tests themselves only assert on the
frozen summaries. A terminal hook prints one verdict line per numbered
acceptance check at the end of the run.
"""

import pytest

from nrpca.simulation import run_estimation_mc, run_test_mc

# every acceptance-scale run draws from this seed; the bands asserted in
# test_acceptance.py were validated against these exact streams
ACCEPTANCE_SEED = 1729

_criterion_lines: list[tuple[int, str]] = []


def _record(number: int, verdict: str, detail: str) -> None:
    _criterion_lines.append((number, f"[criterion {number}] {verdict}  {detail}"))


@pytest.fixture(scope="session")
def criterion_log():
    """Callable (number, verdict, detail) feeding the end-of-run report."""
    return _record


@pytest.fixture(scope="session")
def acceptance_seed() -> int:
    return ACCEPTANCE_SEED


@pytest.fixture(scope="session")
def est_a_2048():
    # ~7 s: 2000 replications of the geometric-decay scenario at d=2048
    return run_estimation_mc(
        "a", [2048], n=10, reps=2000, seed=ACCEPTANCE_SEED, keep_samples=True
    )


@pytest.fixture(scope="session")
def est_b_2048():
    # same budget for the slow-decay scenario; only the row summary is needed
    return run_estimation_mc("b", [2048], n=10, reps=2000, seed=ACCEPTANCE_SEED)


@pytest.fixture(scope="session")
def tests_2048():
    # ~80 s: 2000 null + 2000 alternative two-sample draws at d=2048
    return run_test_mc(
        [2048], n1=10, n2=20, reps=4000, seed=ACCEPTANCE_SEED, keep_samples=True
    )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criterion_lines:
        return
    terminalreporter.write_sep("-", "acceptance checks")
    for _, line in sorted(_criterion_lines):
        terminalreporter.write_line(line)
