"""Shared oracles and the acceptance summary hook.

The oracle helpers deliberately use different numerical routes than the
package (matrix logarithms and square roots from ``scipy.linalg``, explicit
loops instead of ``einsum``) so tests compare two independent computations.
"""

import numpy as np
import pytest
import scipy.linalg as sla

ACCEPTANCE_LINES = []


def record(criterion, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def oracle_entropy(rho):
    """``-Tr rho logm(rho)`` on the support, via a regularized matrix log."""
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    reg = rho + 1e-300 * np.eye(d)
    w, V = np.linalg.eig(reg)
    w = w.real
    keep = w > 1e-14
    return float(-np.sum(w[keep] * np.log(w[keep])))


def oracle_relent(rho, sigma):
    """``Tr rho (logm rho - logm sigma)`` for full-rank states."""
    return float(np.trace(rho @ (sla.logm(rho) - sla.logm(sigma))).real)


def oracle_partial_trace(rho, dA, dB, keep="A"):
    out = np.zeros((dA, dA) if keep == "A" else (dB, dB), dtype=complex)
    for i in range(dA):
        for k in range(dA):
            for j in range(dB):
                for l in range(dB):
                    v = rho[i * dB + j, k * dB + l]
                    if keep == "A" and j == l:
                        out[i, k] += v
                    if keep == "B" and i == k:
                        out[j, l] += v
    return out


def oracle_fidelity(rho, sigma):
    s = sla.sqrtm(rho)
    return float(np.real(np.trace(sla.sqrtm(s @ sigma @ s))) ** 2)


def ginibre(rng, d, r=None):
    r = d if r is None else r
    G = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
