import re

import numpy as np
import pytest

from stirap_toffoli.dynamics import integrate
from stirap_toffoli.gates import GateKind, GateParams, encode


def _gate_run(bits, params=None):
    sc = encode(GateKind.TOFFOLI4, bits, params or GateParams())
    return sc, integrate(sc.scheme, sc.pulses, sc.initial, sc.grid)


@pytest.fixture(scope="session")
def fig3():
    return _gate_run("1110")


@pytest.fixture(scope="session")
def fig4():
    return _gate_run("1111")


@pytest.fixture(scope="session")
def fig5():
    return _gate_run("1000")


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240611)


_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def verdict(request, capsys):
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
        request.config.stash.setdefault(_VERDICTS, []).append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: (int(re.match(r"\d+", s.split()[1]).group()), s)):
            terminalreporter.write_line(line)
