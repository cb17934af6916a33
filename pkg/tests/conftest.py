import pytest

# Acceptance lines and VQE bound checks collected across the session.
ACCEPTANCE_LINES: list[str] = []
VQE_LEDGER: list[tuple[str, float, float]] = []


def record_vqe(tag: str, energy: float, exact: float) -> None:
    VQE_LEDGER.append((tag, float(energy), float(exact)))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
    if VQE_LEDGER:
        bad = [t for t in VQE_LEDGER if t[1] < t[2] - 1e-9]
        terminalreporter.write_line(
            f"variational bound over the whole session: {len(VQE_LEDGER)} VQE runs, {len(bad)} violations"
        )


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240611)
