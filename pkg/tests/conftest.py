import sys

import numpy as np
import pytest
from scipy.stats import unitary_group

from isoholonomic.synthesis import gate_library, plan_gate

# ambient dimensions used for the named gates: one ancilla beside the gate
LIBRARY_DIMS = {"t_gate": 3, "t_prime": 4, "hadamard": 3, "cnot": 5}


def random_unitary(n, seed):
    return unitary_group.rvs(n, random_state=seed) if n > 1 else np.exp(1j * np.random.default_rng(seed).uniform(0, 2 * np.pi, (1, 1)))


def random_hermitian(rng, d):
    G = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (G + G.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(20250517)


@pytest.fixture(params=sorted(LIBRARY_DIMS))
def library_plan(request):
    name = request.param
    return name, plan_gate(gate_library(name), ambient_dim=LIBRARY_DIMS[name])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
