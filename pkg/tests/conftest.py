import numpy as np
import pytest

from holo import su2

_ACCEPTANCE = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance():
    """Record (criterion number, passed, detail) for the end-of-run summary."""

    def record(number, passed, detail=""):
        _ACCEPTANCE.append((number, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


def as_matrix(q):
    """SU(2) matrix of a quaternion (independent model for oracles)."""
    w, x, y, z = q
    return np.array([[w + 1j * x, y + 1j * z], [-y + 1j * z, w - 1j * x]])


def from_matrix(m):
    return np.array([m[0, 0].real, m[0, 0].imag, m[0, 1].real, m[0, 1].imag])


def conj(rho, h):
    hi = su2.qinv(h)
    return {g: su2.qmul(su2.qmul(h, q), hi) for g, q in rho.items()}


def perturb(rho, v, h):
    """rho_s(x) = exp(s v_x) rho(x) at s = h."""
    return {g: su2.qmul(su2.exp_im(h * np.asarray(v.get(g, np.zeros(3)))), q)
            for g, q in rho.items()}
