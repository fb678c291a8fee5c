from functools import reduce
import sys

import numpy as np
import pytest

from nonlocal_gates import qstate


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def kron_all(vectors):
    return reduce(np.kron, vectors)


def oracle_vector(ideal, vectors):
    """Ideal gate times a product input, by explicit Kronecker products."""
    return np.asarray(ideal) @ kron_all(vectors)


def branch_vector(branch, labels):
    """Branch amplitudes in the given register order."""
    return qstate.reorder(branch.state, labels).amplitudes


def phase_fidelity(a, b):
    return abs(np.vdot(a, b))


def random_qubit(rng):
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return v / np.linalg.norm(v)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    results = getattr(acceptance, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
