"""Monogamy-derived four-party measures.

The four measures average a per-qubit leftover: the one-vs-rest entanglement
minus pairwise terms (t1), additionally minus powered three-party terms (t2
with exponent mu3, n1/n2 with exponents nu1/nu2 acting on negativity
leftovers).  ``nu_star`` returns the threshold exponents that make the
four-qubit W state vanish.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Union

import numpy as np

from . import kernels
from .errors import InvalidStateError, MonogamyViolationError, UNSUPPORTED
from .multipartite import three_tangle_pure
from .states import DensityMatrix, Ensemble, PureState, partial_trace

__all__ = [
    "PowerFactors",
    "MonogamyReport",
    "regulated_power",
    "nu_star",
    "t1",
    "t1_reports",
    "t2",
    "t2_reports",
    "n1",
    "n1_reports",
    "n2",
    "n2_reports",
    "check_monogamy_tofv",
]

_SNAP_ONE = 1e-9
_BLOCK_EDGE = 1e-10
_RANK_CUT = 1e-10


@dataclass(frozen=True)
class PowerFactors:
    """Exponents weighting the three-party terms; ``math.inf`` is allowed and
    means the limiting rule implemented by :func:`regulated_power`."""

    mu3: float = 1.5
    nu1: float = math.inf
    nu2: float = math.inf

    def __post_init__(self):
        for name in ("mu3", "nu1", "nu2"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class MonogamyReport:
    """Per-focus breakdown of one monogamy leftover.

    ``leftover = one_vs_rest - sum(pairwise) - sum(triple_terms)`` holds by
    construction; ``raw_triples`` keeps the three-party bases before clamping
    and exponentiation so violations stay visible.
    """

    focus: int
    one_vs_rest: float
    pairwise: dict[tuple[int, int], float]
    triple_terms: dict[tuple[int, int, int], float]
    raw_triples: dict[tuple[int, int, int], float]
    leftover: float


def regulated_power(base: float, exponent: float) -> float:
    """``[x]**e`` with the base clamped to [0, 1]; an infinite exponent maps
    bases below one to zero and bases at one (within snap tolerance) to one."""
    x = min(max(base, 0.0), 1.0)
    if math.isinf(exponent):
        return 1.0 if x >= 1.0 - _SNAP_ONE else 0.0
    return x ** exponent


def nu_star() -> tuple[float, float]:
    """Threshold exponents at which both W4 negativity measures vanish."""
    nu1 = math.log((3.0 - 3.0 * math.sqrt(2.0) + math.sqrt(3.0)) / 6.0) \
        / math.log(1.5 - math.sqrt(2.0))
    nu2 = math.log((math.sqrt(2.0) - 1.0) / 2.0) \
        / math.log(math.sqrt(2.0) - 1.25)
    return nu1, nu2


def _require_four_qubits(psi: PureState) -> None:
    if psi.n_qubits != 4:
        raise InvalidStateError(f"expected a 4-qubit state, got {psi.n_qubits} qubits")


def _pair_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def _squared_pair_concurrences(psi: PureState) -> dict[tuple[int, int], float]:
    amps = psi.amplitudes
    keep = np.empty(2, np.int64)
    out = {}
    for a, b in combinations(range(4), 2):
        keep[0], keep[1] = a, b
        c = kernels.concurrence_mixed_fast(kernels.pure_marginal(amps, 4, keep))
        out[(a, b)] = c * c
    return out


def _one_vs_rest_c2(psi: PureState, focus: int) -> float:
    rho = partial_trace(psi, (focus,)).matrix
    det = max((rho[0, 0] * rho[1, 1] - rho[0, 1] * rho[1, 0]).real, 0.0)
    return 4.0 * det


def t1_reports(psi: PureState) -> list[MonogamyReport]:
    _require_four_qubits(psi)
    pair_c2 = _squared_pair_concurrences(psi)
    reports = []
    for focus in range(4):
        pairwise = {
            _pair_key(focus, other): pair_c2[_pair_key(focus, other)]
            for other in range(4) if other != focus
        }
        one_rest = _one_vs_rest_c2(psi, focus)
        leftover = one_rest - sum(pairwise.values())
        reports.append(MonogamyReport(focus, one_rest, pairwise, {}, {}, leftover))
    return reports


def t1(psi: PureState) -> float:
    """Tangle-based measure: averaged squared-concurrence leftover."""
    _require_four_qubits(psi)
    return float(kernels.t1_pure4(psi.amplitudes))


# ---------------------------------------------------------------------------
# rank-2 reduced-state residual entanglement for t2
# ---------------------------------------------------------------------------

def _support_blocks(mat: np.ndarray) -> list[list[int]]:
    dim = mat.shape[0]
    strong = np.abs(mat) > _BLOCK_EDGE
    seen = [False] * dim
    blocks = []
    for start in range(dim):
        if seen[start] or not strong[start, start]:
            continue
        stack, block = [start], []
        seen[start] = True
        while stack:
            i = stack.pop()
            block.append(i)
            for j in range(dim):
                if not seen[j] and (strong[i, j] or strong[j, i]):
                    seen[j] = True
                    stack.append(j)
        blocks.append(sorted(block))
    return blocks


def _rank_one_member(mat: np.ndarray, block: list[int]):
    """Weight and unit vector if the block is (numerically) rank one."""
    sub = mat[np.ix_(block, block)]
    values, vectors = np.linalg.eigh(sub)
    weight = values[-1]
    if weight <= _RANK_CUT or np.abs(values[:-1]).max(initial=0.0) > _RANK_CUT:
        return None
    vec = np.zeros(mat.shape[0], dtype=np.complex128)
    vec[block] = vectors[:, -1]
    return float(weight), vec


def _phase_normalized(vec: np.ndarray) -> np.ndarray:
    lead = vec[np.argmax(np.abs(vec))]
    return vec * np.conj(lead) / abs(lead)


def _match_ghzw_family(members) -> float | None | object:
    """Zero-region rule for a GHZ-type/W-type two-block mixture; returns the
    residual entanglement, UNSUPPORTED, or None when the pattern mismatches."""
    ghz = w = None
    for weight, vec in members:
        support = set(np.flatnonzero(np.abs(vec) > 1e-9).tolist())
        if support <= {0b000, 0b111}:
            ghz = (weight, vec)
        elif support <= {0b001, 0b010, 0b100}:
            w = (weight, vec)
    if ghz is None or w is None:
        return None
    gv = _phase_normalized(ghz[1])
    wv = _phase_normalized(w[1])
    parts = [gv[0b000], gv[0b111], wv[0b001], wv[0b010], wv[0b100]]
    if any(abs(x.imag) > 1e-9 or x.real < -1e-12 for x in parts):
        return None
    a, b, c, d, f = (max(x.real, 0.0) for x in parts)
    if a * b < 1e-12:
        return None
    from .multipartite import residual_ghzw_mixture

    return residual_ghzw_mixture(a, b, c, d, f, ghz[0])


def _match_two_branch_family(members) -> float | None:
    """Mixture of equal-magnitude branches on {000,111} and {001,110}."""
    first = second = None
    for weight, vec in members:
        support = set(np.flatnonzero(np.abs(vec) > 1e-9).tolist())
        if support == {0b000, 0b111}:
            first = (weight, vec)
        elif support == {0b001, 0b110}:
            second = (weight, vec)
    if first is None or second is None:
        return None
    for _, vec in (first, second):
        mags = np.abs(vec[np.abs(vec) > 1e-9])
        if abs(mags[0] - mags[1]) > 1e-9:
            return None
    from .multipartite import residual_g1g2_mixture

    return residual_g1g2_mixture(first[0])


def _reduced_three_tangle(rho: DensityMatrix):
    """Residual entanglement of a rank<=2 three-qubit state when it falls in
    a class with a known answer; UNSUPPORTED otherwise."""
    values, vectors = np.linalg.eigh(rho.matrix)
    if values[-2] < _RANK_CUT:
        vec = vectors[:, -1]
        tau, _ = three_tangle_pure(PureState(3, vec / np.linalg.norm(vec)))
        return tau
    blocks = _support_blocks(rho.matrix)
    if len(blocks) < 2:
        return UNSUPPORTED
    members = []
    for block in blocks:
        member = _rank_one_member(rho.matrix, block)
        if member is None:
            return UNSUPPORTED
        members.append(member)
    member_taus = [kernels.three_tangle_value(vec) for _, vec in members]
    if max(member_taus) < 1e-10:
        return 0.0
    ghzw = _match_ghzw_family(members)
    if ghzw is not None:
        return ghzw
    two_branch = _match_two_branch_family(members)
    if two_branch is not None:
        return two_branch
    return UNSUPPORTED


def _marginal_tangles(psi: PureState):
    out = {}
    for triple in combinations(range(4), 3):
        out[triple] = _reduced_three_tangle(partial_trace(psi, triple))
    return out


def t2_reports(psi: PureState, factors: PowerFactors = PowerFactors()):
    """Reports for the three-party-regulated tangle measure, or UNSUPPORTED
    when a reduced state falls outside the computable classes."""
    _require_four_qubits(psi)
    tangles = _marginal_tangles(psi)
    if any(v is UNSUPPORTED for v in tangles.values()):
        return UNSUPPORTED
    pair_c2 = _squared_pair_concurrences(psi)
    reports = []
    for focus in range(4):
        others = [q for q in range(4) if q != focus]
        pairwise = {_pair_key(focus, o): pair_c2[_pair_key(focus, o)] for o in others}
        raw = {}
        powered = {}
        for j, k in combinations(others, 2):
            triple = tuple(sorted((focus, j, k)))
            raw[triple] = tangles[triple]
            powered[triple] = regulated_power(tangles[triple], factors.mu3)
        one_rest = _one_vs_rest_c2(psi, focus)
        leftover = one_rest - sum(pairwise.values()) - sum(powered.values())
        reports.append(MonogamyReport(focus, one_rest, pairwise, powered, raw, leftover))
    return reports


def t2(psi: PureState, factors: PowerFactors = PowerFactors()):
    reports = t2_reports(psi, factors)
    if reports is UNSUPPORTED:
        return UNSUPPORTED
    return sum(r.leftover for r in reports) / 4.0


# ---------------------------------------------------------------------------
# negativity-based measures
# ---------------------------------------------------------------------------

def _negativity_reports(psi: PureState, nu: float, squared: bool) -> list[MonogamyReport]:
    _require_four_qubits(psi)
    one_rest, pair, one_two = kernels.negativity_parts4(psi.amplitudes)
    reports = []
    for focus in range(4):
        others = [q for q in range(4) if q != focus]
        if squared:
            ovr = float(one_rest[focus]) ** 2
            pairwise = {_pair_key(focus, o): float(pair[focus, o]) ** 2 for o in others}
        else:
            ovr = float(one_rest[focus])
            pairwise = {_pair_key(focus, o): float(pair[focus, o]) for o in others}
        raw = {}
        powered = {}
        for j, k in combinations(others, 2):
            triple = tuple(sorted((focus, j, k)))
            if squared:
                base = float(one_two[focus, j, k]) ** 2 \
                    - float(pair[focus, j]) ** 2 - float(pair[focus, k]) ** 2
            else:
                base = float(one_two[focus, j, k]) \
                    - float(pair[focus, j]) - float(pair[focus, k])
            raw[triple] = base
            powered[triple] = regulated_power(base, nu)
        leftover = ovr - sum(pairwise.values()) - sum(powered.values())
        reports.append(MonogamyReport(focus, ovr, pairwise, powered, raw, leftover))
    return reports


StateOrEnsemble = Union[PureState, Ensemble]


def _measure_or_average(state: StateOrEnsemble, fn) -> float:
    if isinstance(state, Ensemble):
        return sum(w * fn(member) for w, member in state.members)
    return fn(state)


def n1_reports(psi: PureState, nu1: float) -> list[MonogamyReport]:
    return _negativity_reports(psi, nu1, squared=False)


def n1(state: StateOrEnsemble, nu1: float) -> float:
    """Negativity-based measure; an Ensemble input averages over members."""
    return _measure_or_average(
        state, lambda s: sum(r.leftover for r in n1_reports(s, nu1)) / 4.0
    )


def n2_reports(psi: PureState, nu2: float) -> list[MonogamyReport]:
    return _negativity_reports(psi, nu2, squared=True)


def n2(state: StateOrEnsemble, nu2: float) -> float:
    """Squared-negativity measure; an Ensemble input averages over members."""
    return _measure_or_average(
        state, lambda s: sum(r.leftover for r in n2_reports(s, nu2)) / 4.0
    )


def check_monogamy_tofv(psi: PureState, focus: int) -> float:
    """Signed slack of the squared-concurrence monogamy inequality for one
    focus qubit against all others; raises if it comes out negative."""
    n = psi.n_qubits
    if not 2 <= n <= 6:
        raise InvalidStateError(f"supported for 2..6 qubits, got {n}")
    if not 0 <= focus < n:
        raise InvalidStateError(f"focus {focus} out of range")
    rho = partial_trace(psi, (focus,)).matrix
    det = max((rho[0, 0] * rho[1, 1] - rho[0, 1] * rho[1, 0]).real, 0.0)
    slack = 4.0 * det
    amps = psi.amplitudes
    keep = np.empty(2, np.int64)
    for other in range(n):
        if other == focus:
            continue
        keep[0], keep[1] = min(focus, other), max(focus, other)
        c = kernels.concurrence_mixed_fast(kernels.pure_marginal(amps, n, keep))
        slack -= c * c
    if slack < -1e-10:
        raise MonogamyViolationError(f"negative monogamy slack {slack}")
    return slack
