import numpy as np
import pytest

from qgamelab.rng import RngStream


@pytest.fixture
def rng():
    return RngStream(20240611)


def kron_unitary(matrix, target, controls, num_qubits):
    """Dense 2^m x 2^m matrix of a controlled single-qubit gate, built from
    projectors and Kronecker products only (independent of the kernels)."""
    eye = np.eye(2)
    p1 = np.diag([0.0, 1.0])

    def chain(factors):
        out = np.array([[1.0 + 0j]])
        for q in reversed(range(num_qubits)):  # qubit 0 is least significant
            out = np.kron(out, factors.get(q, eye))
        return out

    on = {c: p1 for c in controls}
    fired = chain({**on, target: np.asarray(matrix)})
    idle = chain(on)
    return np.eye(2 ** num_qubits) - idle + fired


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    """Record one PASS/FAIL line per acceptance criterion (echoed at the end of the run)."""

    def report(number, title, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} | {title} | {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
