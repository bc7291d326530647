import numpy as np
import pytest

from tangle_lab import kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # compile the jitted kernels once so timed tests see steady-state speed
    kernels.warmup()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def rho_pair_z4(p: float, phi: float) -> np.ndarray:
    """Pair marginal of the GHZ4/W4 superposition, written out by hand."""
    s = np.sqrt(p * (1.0 - p) / 2.0)
    e = np.exp(1j * phi)
    half = (1.0 - p) / 2.0
    return 0.5 * np.array([
        [1.0, -s * e.conjugate(), -s * e.conjugate(), 0.0],
        [-s * e, half, half, 0.0],
        [-s * e, half, half, 0.0],
        [0.0, 0.0, 0.0, p],
    ], dtype=complex)


def rho_single_z4(p: float, phi: float) -> np.ndarray:
    """Single-qubit marginal of the GHZ4/W4 superposition, by hand."""
    s = np.sqrt(p * (1.0 - p) / 2.0)
    e = np.exp(1j * phi)
    return np.array([
        [(3.0 - p) / 4.0, -0.5 * s * e.conjugate()],
        [-0.5 * s * e, (1.0 + p) / 4.0],
    ], dtype=complex)


def wootters_oracle(rho: np.ndarray) -> float:
    """Independent spin-flip concurrence: explicit operator product."""
    sy2 = np.zeros((4, 4), dtype=complex)
    sy2[0, 3] = sy2[3, 0] = -1.0
    sy2[1, 2] = sy2[2, 1] = 1.0
    product = rho @ sy2 @ rho.conj() @ sy2
    lam = np.sort(np.sqrt(np.clip(np.linalg.eigvals(product).real, 0.0, None)))
    return max(lam[3] - lam[2] - lam[1] - lam[0], 0.0)


def negativity_oracle(rho: np.ndarray, n: int, qubits) -> float:
    """Independent negativity: reshape-based partial transpose + trace norm."""
    t = rho.reshape((2,) * (2 * n))
    for q in qubits:
        t = np.swapaxes(t, q, n + q)
    pt = t.reshape(2 ** n, 2 ** n)
    return max(np.abs(np.linalg.eigvalsh(pt)).sum() - 1.0, 0.0)
