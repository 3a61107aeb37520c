"""Shared fixtures: long Example 2 runs are computed once per session."""

import pytest

from kdvb import conserved_quantities, find_peaks, make_example2, simulate

# criterion name -> (passed, detail); filled by test_acceptance and printed at the end
ACCEPTANCE_REPORT: dict[str, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def example2_run():
    """Example 2, lam = 0, recorded at 0, 100, 200, 400, 600, 800."""
    sc = make_example2()
    sim = simulate(sc, 0.0)
    out = {}
    for t, state in sim.snapshots:
        out[t] = (
            conserved_quantities(state, sim.table, sim.grid, sc.params),
            find_peaks(state, sim.table, sim.grid, sc.threshold),
        )
    return out


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in ACCEPTANCE_REPORT.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
