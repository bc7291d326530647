"""Multipartite entanglement: three-tangle, special rank-2 families, and the
four-qubit filter invariants with their linearized monotones."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InvalidStateError, SingularFamilyError, DegenerateFamilyError, UNSUPPORTED
from .states import PureState

__all__ = [
    "ThreeTangleCoefficients",
    "PauliContext",
    "three_tangle_pure",
    "residual_ghzw_mixture",
    "residual_g1g2_mixture",
    "f_invariants",
    "g_monotones",
    "F_HOMOGENEITY_DEGREES",
    "residual_reduced_pure",
    "reduced_family_params",
    "reduced_family_member",
]

_SINGULAR_P = 1e-6


@dataclass(frozen=True)
class ThreeTangleCoefficients:
    """Degree-4 polynomial pieces whose combination 4|d1 - 2 d2 + 4 d3| is the
    residual three-party entanglement."""

    d1: complex
    d2: complex
    d3: complex

    @property
    def tau(self) -> float:
        return 4.0 * abs(self.d1 - 2.0 * self.d2 + 4.0 * self.d3)


def _default_sigma() -> np.ndarray:
    return np.stack([
        np.eye(2, dtype=np.complex128),
        np.array([[0, 1], [1, 0]], dtype=np.complex128),
        np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
        np.array([[1, 0], [0, -1]], dtype=np.complex128),
    ])


@dataclass(frozen=True)
class PauliContext:
    """The four single-qubit operators and the degenerate contraction metric
    used by the filter invariants."""

    sigma: np.ndarray = field(default_factory=_default_sigma)
    metric: np.ndarray = field(default_factory=lambda: np.array([-1.0, 1.0, 0.0, 1.0]))


_PAULI = PauliContext()

# homogeneity degrees of the three filter invariants (number of bilinear
# factors times two); validated by scaling tests
F_HOMOGENEITY_DEGREES = (6, 8, 12)


def three_tangle_pure(psi: PureState) -> tuple[float, ThreeTangleCoefficients]:
    """Residual three-party entanglement of a 3-qubit pure state."""
    if psi.n_qubits != 3:
        raise InvalidStateError(f"expected a 3-qubit state, got {psi.n_qubits} qubits")
    d1, d2, d3 = kernels.tangle_d_coeffs(psi.amplitudes)
    coeffs = ThreeTangleCoefficients(complex(d1), complex(d2), complex(d3))
    return coeffs.tau, coeffs


def residual_ghzw_mixture(a: float, b: float, c: float, d: float, f: float, p: float):
    """Residual entanglement of p|gGHZ><gGHZ| + (1-p)|gW><gW| in its known
    zero region; returns UNSUPPORTED above the zero threshold.

    Here |gGHZ> = a|000> + b|111> and |gW> = c|001> + d|010> + f|100| with
    real nonnegative amplitudes and unit norms.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if abs(a * a + b * b - 1.0) > 1e-10 or abs(c * c + d * d + f * f - 1.0) > 1e-10:
        raise InvalidStateError("family amplitudes are not normalized")
    if abs(a * b) < 1e-12:
        raise DegenerateFamilyError("a*b vanishes; the GHZ-type member is degenerate")
    s = 4.0 * c * d * f / (a * a * b)
    threshold = s ** (2.0 / 3.0) / (1.0 + s ** (2.0 / 3.0))
    if p <= threshold + 1e-15:
        return 0.0
    return UNSUPPORTED


def residual_g1g2_mixture(p: float) -> float:
    """Residual entanglement of the equal-magnitude two-branch family
    p|g1><g1| + (1-p)|g2><g2| with g1 on {000,111} and g2 on {001,110}."""
    return (2.0 * p - 1.0) ** 2


def _bilinear_table(amps: np.ndarray, positions: tuple[int, int]) -> np.ndarray:
    """16 bilinears <psi*| O |psi> with running operator indices at
    ``positions`` and the antisymmetric operator elsewhere."""
    sigma, y = _PAULI.sigma, _PAULI.sigma[2]
    reshaped = amps.reshape(2, 2, 2, 2)
    ins, outs = "abcd", "efgh"
    terms, operands = [], []
    for q in range(4):
        if q == positions[0]:
            terms.append("m" + ins[q] + outs[q])
            operands.append(sigma)
        elif q == positions[1]:
            terms.append("n" + ins[q] + outs[q])
            operands.append(sigma)
        else:
            terms.append(ins[q] + outs[q])
            operands.append(y)
    spec = ins + "," + ",".join(terms) + "," + outs + "->mn"
    return np.einsum(spec, reshaped, *operands, reshaped)


def _f_invariants_raw(amps: np.ndarray) -> tuple[float, float, float]:
    g = _PAULI.metric
    t01 = _bilinear_table(amps, (0, 1))
    t02 = _bilinear_table(amps, (0, 2))
    t03 = _bilinear_table(amps, (0, 3))
    t12 = _bilinear_table(amps, (1, 2))
    t13 = _bilinear_table(amps, (1, 3))
    t23 = _bilinear_table(amps, (2, 3))
    f1 = abs(np.einsum("m,n,l,mn,ml,nl->", g, g, g, t01, t02, t12))
    f2 = abs(np.einsum("m,n,l,t,mn,ml,nt,lt->", g, g, g, g, t01, t02, t13, t23))
    quads = [np.einsum("m,n,mn,mn->", g, g, t, t) for t in (t01, t02, t03)]
    f3 = 0.5 * abs(quads[0] * quads[1] * quads[2])
    return float(f1), float(f2), float(f3)


def f_invariants(psi: PureState) -> tuple[float, float, float]:
    """The three four-way filter invariants of a 4-qubit pure state."""
    if psi.n_qubits != 4:
        raise InvalidStateError(f"expected a 4-qubit state, got {psi.n_qubits} qubits")
    return _f_invariants_raw(psi.amplitudes)


def g_monotones(psi: PureState) -> tuple[float, float, float]:
    """Degree-2 homogeneous versions of the filter invariants."""
    values = f_invariants(psi)
    return tuple(v ** (2.0 / d) for v, d in zip(values, F_HOMOGENEITY_DEGREES))


# ---------------------------------------------------------------------------
# spectral two-branch family of the three-qubit states reduced from Z4(p, phi)
# ---------------------------------------------------------------------------

def reduced_family_params(p: float):
    """Spectral weight and branch parameters (N, mu, nu) of the reduced
    tripartite family at mixing parameter ``p``.

    Returns (lam, (N+, mu+, nu+), (N-, mu-, nu-)).
    """
    if p < _SINGULAR_P:
        raise SingularFamilyError(f"family parametrization diverges below p={_SINGULAR_P}")
    if p > 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    root = math.sqrt(max(1.0 - p * p, 0.0))
    lam = (2.0 + root) / 4.0
    if 1.0 - p < 1e-12:
        # limit point: both branches collapse onto GHZ-type members
        return lam, (math.sqrt(2.0), 1.0, 0.0), (math.sqrt(2.0), -1.0, 0.0)
    denom = math.sqrt(2.0 * p * (1.0 - p))
    n_plus = math.sqrt(((1.0 + p) * (3.0 - p) + (3.0 + p) * root) / (2.0 * p * p))
    n_minus = math.sqrt(((1.0 + p) * (3.0 - p) - (3.0 + p) * root) / (2.0 * p * p))
    mu_plus = (2.0 * (1.0 - p) + root) / denom
    mu_minus = (2.0 * (1.0 - p) - root) / denom
    nu_plus = ((3.0 + p) * (1.0 - p) + (3.0 - p) * root) / (2.0 * p * (2.0 + root))
    nu_minus = ((3.0 + p) * (1.0 - p) - (3.0 - p) * root) / (2.0 * p * (2.0 - root))
    return lam, (n_plus, mu_plus, nu_plus), (n_minus, mu_minus, nu_minus)


def reduced_family_member(p: float, phi: float, branch: int) -> PureState:
    """Pure 3-qubit member of the reduced family, branch = +1 or -1."""
    _, plus, minus = reduced_family_params(p)
    _, mu, nu = plus if branch > 0 else minus
    vec = np.zeros(8, dtype=np.complex128)
    vec[0b000] = mu
    vec[0b111] = -np.exp(-1j * phi)
    vec[0b001] = vec[0b010] = vec[0b100] = -nu * np.exp(1j * phi)
    return PureState(3, vec / np.linalg.norm(vec))


def residual_reduced_pure(p: float, phi: float, branch: int) -> float:
    """Closed-form residual entanglement of a reduced-family member."""
    _, plus, minus = reduced_family_params(p)
    n, mu, nu = plus if branch > 0 else minus
    inner = mu ** 4 + 16.0 * nu ** 6 + 8.0 * mu ** 2 * nu ** 3 * math.cos(4.0 * phi)
    return 4.0 / n ** 4 * math.sqrt(max(inner, 0.0))
