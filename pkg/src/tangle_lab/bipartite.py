"""Bipartite entanglement measures.

Concurrence (pure and mixed), entanglement of formation, negativity, and the
analytic pair-marginal evaluations for the GHZ4/W4 superposition family
``Z4(p, phi)``.  The analytic forms express the relevant quartic spectra
through a trigonometric cubic solution; the two-argument arctangent keeps the
branch continuous where the even polynomial part changes sign.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import kernels
from .errors import InvalidStateError, InvalidSubsetError
from .states import DensityMatrix, PureState, QubitSubset, SubsetLike, partial_trace

__all__ = [
    "ConcurrenceClosedForm",
    "NegativityClosedForm",
    "concurrence_pure",
    "concurrence_mixed",
    "eof_from_concurrence",
    "negativity",
    "concurrence_one_vs_rest",
    "closed_form_concurrence_Z4",
    "closed_form_negativity_Z4",
]


@dataclass(frozen=True)
class ConcurrenceClosedForm:
    """Trigonometric-cubic components of the pair-marginal spin-flip spectrum."""

    lam: float
    lam_plus: float
    lam_minus: float
    alpha: float
    beta: float
    theta: float
    raw: float  # sqrt(lam) - sqrt(lam_plus) - sqrt(lam_minus) before clamping


@dataclass(frozen=True)
class NegativityClosedForm:
    """Trigonometric-cubic components of the pair-marginal transpose spectrum."""

    lam: float
    lam_plus: float
    lam_minus: float
    r0: float
    theta0: float
    alpha0: float
    beta0: float
    raw: float


def _as_two_qubit_density(state: Union[DensityMatrix, PureState]) -> DensityMatrix:
    if isinstance(state, PureState):
        state = state.projector()
    if state.n_qubits != 2:
        raise InvalidStateError(f"expected a 2-qubit state, got {state.n_qubits} qubits")
    return state


def concurrence_pure(psi: PureState) -> float:
    """Concurrence of a 2-qubit pure state, 2|a00*a11 - a01*a10|."""
    if psi.n_qubits != 2:
        raise InvalidStateError(f"expected a 2-qubit state, got {psi.n_qubits} qubits")
    a = psi.amplitudes
    return 2.0 * abs(a[0] * a[3] - a[1] * a[2])


def concurrence_mixed(rho: Union[DensityMatrix, PureState]) -> float:
    """Spin-flip concurrence of a 2-qubit mixed state.

    Non-PSD inputs beyond tolerance are rejected by the DensityMatrix
    invariants; eigenvalue dips within tolerance are clamped to zero before
    the square roots are taken.
    """
    rho = _as_two_qubit_density(rho)
    lam = kernels.wootters_lambdas(rho.matrix)
    return max(lam[0] - lam[1] - lam[2] - lam[3], 0.0)


def eof_from_concurrence(c: float, base: float | None = None) -> float:
    """Entanglement of formation as the binary entropy of the concurrence.

    Natural logarithm by default; pass ``base=2`` for bits.
    """
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"concurrence must lie in [0, 1], got {c}")
    x = (1.0 + math.sqrt(1.0 - c * c)) / 2.0
    if x in (0.0, 1.0):
        value = 0.0
    else:
        value = -x * math.log(x) - (1.0 - x) * math.log(1.0 - x)
    if base is not None:
        value /= math.log(base)
    return value


def negativity(rho: Union[DensityMatrix, PureState], part_a: SubsetLike) -> float:
    """Trace norm of the partial transpose minus one, clamped at zero."""
    if isinstance(rho, PureState):
        rho = rho.projector()
    sub = QubitSubset.of(part_a)
    sub.check_within(rho.n_qubits)
    if len(sub) >= rho.n_qubits:
        raise InvalidSubsetError("part_a must be a proper subset of the qubits")
    mask = sub.mask(rho.n_qubits)
    return float(kernels.negativity_masked(rho.matrix, rho.n_qubits, mask))


def concurrence_one_vs_rest(psi: PureState, focus: int) -> float:
    """One-vs-rest concurrence of a pure state, 2*sqrt(det of the marginal)."""
    if psi.n_qubits < 2:
        raise InvalidStateError("need at least two qubits for a one-vs-rest cut")
    if not 0 <= focus < psi.n_qubits:
        raise InvalidSubsetError(f"focus {focus} out of range")
    rho = partial_trace(psi, (focus,)).matrix
    det = max((rho[0, 0] * rho[1, 1] - rho[0, 1] * rho[1, 0]).real, 0.0)
    return 2.0 * math.sqrt(det)


def _check_unit_interval(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return p


def closed_form_concurrence_Z4(p: float) -> tuple[float, ConcurrenceClosedForm]:
    """Pair concurrence of the Z4(p, phi) family (phase independent)."""
    p = _check_unit_interval(p)
    alpha = (1.0 - 9.0 * p + 39.0 * p ** 2 - 90.0 * p ** 3
             + 115.5 * p ** 4 - 81.0 * p ** 5 + 23.5 * p ** 6)
    inner = 3.0 * p * (4.0 - 28.0 * p + 96.0 * p ** 2 - 147.0 * p ** 3
                       + 110.0 * p ** 4 - 31.0 * p ** 5)
    beta = 1.5 * p ** 2 * (1.0 - p) * math.sqrt(max(inner, 0.0))
    radius = (alpha * alpha + beta * beta) ** (1.0 / 6.0)
    theta = math.atan2(beta, alpha) / 3.0
    quad = 1.0 + p * p
    lam = (quad + 2.0 * radius * math.cos(theta)) / 12.0
    lam_plus = (quad - 2.0 * radius * math.cos(math.pi / 3.0 + theta)) / 12.0
    lam_minus = (quad - 2.0 * radius * math.cos(math.pi / 3.0 - theta)) / 12.0
    raw = (math.sqrt(max(lam, 0.0)) - math.sqrt(max(lam_plus, 0.0))
           - math.sqrt(max(lam_minus, 0.0)))
    detail = ConcurrenceClosedForm(lam, lam_plus, lam_minus, alpha, beta, theta, raw)
    return max(raw, 0.0), detail


def closed_form_negativity_Z4(p: float) -> tuple[float, NegativityClosedForm]:
    """Pair negativity of the Z4(p, phi) family (phase independent)."""
    p = _check_unit_interval(p)
    alpha0 = (17.0 + 147.0 * p - 153.0 * p ** 2 - 428.0 * p ** 3
              + 729.0 * p ** 4 - 447.0 * p ** 5 + 127.0 * p ** 6)
    inner = 2.0 + 4.0 * p - 71.0 * p ** 2 + 214.0 * p ** 3 - 129.0 * p ** 4
    beta0 = (3.0 * math.sqrt(3.0)
             * (1.0 - p + 5.0 * p ** 2 - 7.0 * p ** 3 + 2.0 * p ** 4)
             * math.sqrt(max(inner, 0.0)))
    r0 = (alpha0 * alpha0 + beta0 * beta0) ** (1.0 / 6.0)
    theta0 = math.atan2(beta0, alpha0) / 3.0
    quad = 7.0 + 2.0 * p - p * p
    lam = (quad + 4.0 * r0 * math.cos(theta0)) / 48.0
    lam_plus = (quad - 4.0 * r0 * math.cos(math.pi / 3.0 + theta0)) / 48.0
    lam_minus = (quad - 4.0 * r0 * math.cos(math.pi / 3.0 - theta0)) / 48.0
    raw = (math.sqrt(max(lam, 0.0)) + math.sqrt(max(lam_plus, 0.0))
           + math.sqrt(max(lam_minus, 0.0)) - (3.0 + p) / 4.0)
    detail = NegativityClosedForm(lam, lam_plus, lam_minus, r0, theta0, alpha0, beta0, raw)
    return max(raw, 0.0), detail
