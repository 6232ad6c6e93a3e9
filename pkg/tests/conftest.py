import warnings

import numpy as np
import pytest

from dispersion_lab.material import MaterialSpec

DRUDE = MaterialSpec(electric=[(1.0, 0.0, 0.0)], magnetic=[(2.0, 0.0, 0.0)])
LORENTZ_EPS = MaterialSpec(electric=[(1.0, 2.0, 0.0)])
LOSSLESS = MaterialSpec(electric=[(1.0, 1.0, 0.0)], magnetic=[(1.0, 2.0, 0.0)])
STRONG = MaterialSpec(electric=[(1.0, 1.0, 0.5)], magnetic=[(1.0, 2.0, 0.5)])
# lossless electric channel, one damped and one undamped magnetic resonance
WEAK = MaterialSpec(electric=[(1.0, 1.0, 0.0)], magnetic=[(1.0, 2.0, 0.5), (1.0, 3.0, 0.0)])


def random_spec(rng, dissipative=True, max_terms=2, max_total=4):
    """Random Lorentz medium with distinct resonances and no Drude term."""
    while True:
        ne, nm = rng.integers(0, max_terms + 1, size=2)
        if ne + nm == 0 or ne + nm > max_total:
            continue
        res = rng.uniform(0.5, 3.0, size=ne + nm)
        if np.min(np.abs(res[:, None] - res[None, :]) + np.eye(len(res)) * 10) < 0.05:
            continue
        coup = rng.uniform(0.5, 2.0, size=ne + nm)
        damp = rng.uniform(0.05, 1.0, size=ne + nm) if dissipative else np.zeros(ne + nm)
        if dissipative:
            damp[rng.random(ne + nm) < 0.3] = 0.0
            if not damp.any():
                damp[0] = 0.3
        terms = list(zip(coup, res, damp))
        return MaterialSpec(electric=terms[:ne], magnetic=terms[ne:])


@pytest.fixture(autouse=True)
def _quiet_drude():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="medium has a Drude term")
        yield


_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    def record(number, passed, detail):
        _ACCEPTANCE.append((number, bool(passed), detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}")
