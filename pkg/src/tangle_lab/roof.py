"""Convex-roof machinery for rank-2 mixtures of the GHZ4/W4 family and the
three-qubit appendix family.

The engine evaluates measures along superposition families ("characteristic
curves"), takes lower convex envelopes, locates breakpoints by bisection and
mixing anchors by golden-section search, and emits explicit optimal
decompositions together with a verification of each decomposition against
the target mixture.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .bipartite import closed_form_concurrence_Z4, closed_form_negativity_Z4
from .config import TOL
from .errors import (
    BracketError,
    MeasureEvaluationError,
    TangleLabError,
    UnsupportedExponentError,
)
from .monogamy import nu_star, regulated_power
from .multipartite import (
    reduced_family_member,
    reduced_family_params,
    residual_reduced_pure,
)
from .states import (
    DensityMatrix,
    Ensemble,
    PureState,
    ensemble_to_density,
    named_state,
)

__all__ = [
    "golden_minimize",
    "bisect_root",
    "Rank2Family",
    "ghzw4_family",
    "ghz3w3_family",
    "appendix_family",
    "CharacteristicCurveSet",
    "characteristic_curves",
    "lower_convex_envelope",
    "stationary_mix_point",
    "t1_curve_ghzw4",
    "n1_curve_ghzw4",
    "n2_curve_ghzw4",
    "n1_star_breakpoint",
    "n2_star_breakpoint",
    "n1_inf_anchor",
    "n2_inf_anchors",
    "RoofPoint",
    "ConvexRoofResult",
    "t1_roof_ghzw4",
    "n1_roof_ghzw4",
    "n2_roof_ghzw4",
    "solve_roof_ghzw4",
    "rho4_ghzw4",
    "ReducedTripartite",
    "reduced_tripartite_spectral",
    "tau_reduced_upper_bound",
    "AppendixTau3Params",
    "appendix_tau3",
    "appendix_phi0",
    "appendix_zeros",
    "appendix_target",
    "appendix_envelope",
    "verify_decomposition",
    "DEFAULT_P_POINTS",
    "DEFAULT_PHI_POINTS",
]

# grid defaults sized for the 1e-3-scale features near the roof breakpoints
DEFAULT_P_POINTS = 2001
DEFAULT_PHI_POINTS = 721

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def golden_minimize(fn: Callable[[float], float], lo: float, hi: float,
                    xtol: float = 1e-8) -> float:
    """Golden-section minimum of a unimodal scalar function on [lo, hi]."""
    a, b = float(lo), float(hi)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def bisect_root(fn: Callable[[float], float], lo: float, hi: float,
                xtol: float = 1e-7) -> float:
    """Bisection root of a scalar function with a sign change on [lo, hi]."""
    flo, fhi = fn(lo), fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo < 0.0) == (fhi < 0.0):
        raise BracketError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# superposition families and characteristic curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rank2Family:
    """Two orthonormal pure states and their phase-twisted superpositions
    sqrt(p)|psi1> - e^{i phi} sqrt(1-p)|psi2>."""

    psi1: PureState
    psi2: PureState
    label: str = ""

    def __post_init__(self):
        if self.psi1.n_qubits != self.psi2.n_qubits:
            raise TangleLabError("family members mix qubit counts")
        overlap = abs(np.vdot(self.psi1.amplitudes, self.psi2.amplitudes))
        if overlap > TOL.equality:
            raise TangleLabError(f"family members are not orthogonal ({overlap})")

    def generate(self, p: float, phi: float) -> PureState:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {p}")
        amps = math.sqrt(p) * self.psi1.amplitudes \
            - np.exp(1j * phi) * math.sqrt(1.0 - p) * self.psi2.amplitudes
        return PureState(self.psi1.n_qubits, amps)

    def mixture(self, p: float) -> DensityMatrix:
        """The phase-free rank-2 mixture p|psi1><psi1| + (1-p)|psi2><psi2|."""
        a1, a2 = self.psi1.amplitudes, self.psi2.amplitudes
        mat = p * np.outer(a1, a1.conj()) + (1.0 - p) * np.outer(a2, a2.conj())
        return DensityMatrix(self.psi1.n_qubits, mat)


@lru_cache(maxsize=None)
def ghzw4_family() -> Rank2Family:
    return Rank2Family(named_state("ghz4"), named_state("w4"), "Z4")


@lru_cache(maxsize=None)
def ghz3w3_family() -> Rank2Family:
    return Rank2Family(named_state("ghz3"), named_state("w3"), "Z3")


@lru_cache(maxsize=None)
def appendix_family() -> Rank2Family:
    return Rank2Family(named_state("psi1_app"), named_state("psi2_app"), "Zapp")


@dataclass(frozen=True)
class CharacteristicCurveSet:
    """Measure values over a (p, phi) grid plus the per-p minimum."""

    p_grid: np.ndarray
    phi_grid: np.ndarray
    values: np.ndarray
    min_curve: np.ndarray


def _checked_grid(grid: Sequence[float], name: str) -> np.ndarray:
    arr = np.asarray(grid, dtype=float)
    if arr.size == 0:
        raise ValueError(f"{name} grid is empty")
    if np.any(np.diff(arr) <= 0):
        raise ValueError(f"{name} grid must be strictly increasing")
    return arr


def characteristic_curves(family: Rank2Family, measure: Callable[[PureState], float],
                          p_grid: Sequence[float], phi_grid: Sequence[float]) -> CharacteristicCurveSet:
    """Evaluate ``measure`` on every generated family state of the grid."""
    ps = _checked_grid(p_grid, "p")
    phis = _checked_grid(phi_grid, "phi")
    values = np.empty((ps.size, phis.size))
    for i, p in enumerate(ps):
        for j, phi in enumerate(phis):
            try:
                values[i, j] = measure(family.generate(p, phi))
            except Exception as exc:  # noqa: BLE001 - context then re-raise
                raise MeasureEvaluationError(
                    f"measure failed at p={p}, phi={phi}: {exc}"
                ) from exc
    return CharacteristicCurveSet(ps, phis, values, values.min(axis=1))


def lower_convex_envelope(p_grid: Sequence[float], curve: Sequence[float]):
    """Greatest convex minorant of grid samples on [0, 1].

    Returns the envelope sampled on the grid and the hull vertices as
    (p, value) pairs; the envelope is exact at the vertices.
    """
    xs = _checked_grid(p_grid, "p")
    ys = np.asarray(curve, dtype=float)
    if xs.shape != ys.shape:
        raise ValueError("grid and curve lengths differ")
    if not np.all(np.isfinite(ys)):
        raise ValueError("curve has non-finite values")
    if abs(xs[0]) > 1e-12 or abs(xs[-1] - 1.0) > 1e-12:
        raise ValueError("grid must span [0, 1]")
    hull: list[int] = []
    for i in range(xs.size):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a])
            if cross <= 0.0:
                hull.pop()
            else:
                break
        hull.append(i)
    vertices = [(float(xs[i]), float(ys[i])) for i in hull]
    envelope = np.interp(xs, [v[0] for v in vertices], [v[1] for v in vertices])
    return envelope, vertices


def stationary_mix_point(objective: Callable[[float, float], float],
                         bracket: tuple[float, float],
                         probe_p: float = 0.5,
                         xtol: float = 1e-6) -> float:
    """Anchor in ``bracket`` minimizing the mixed-line objective.

    For the objectives used here the minimizer is independent of the first
    argument, so a fixed probe value is enough.
    """
    lo, hi = bracket
    anchor = golden_minimize(lambda a: objective(probe_p, a), lo, hi, xtol)
    if anchor - lo < 5 * xtol or hi - anchor < 5 * xtol:
        raise BracketError(f"no interior stationary point in [{lo}, {hi}]")
    return anchor


# ---------------------------------------------------------------------------
# characteristic values of the GHZ4/W4 family (all phase independent)
# ---------------------------------------------------------------------------

_KEEP_FIRST_THREE = np.array([0, 1, 2], dtype=np.int64)


def t1_curve_ghzw4(p: float) -> float:
    value, _ = closed_form_concurrence_Z4(p)
    return (3.0 + p * p) / 4.0 - 3.0 * value * value


@lru_cache(maxsize=8192)
def _z4_triple_negativity(p: float) -> float:
    """Focus-vs-pair negativity of the three-qubit marginal, via the numeric
    spectrum of the partial transpose."""
    psi = named_state("z4", p, 0.0)
    rho3 = kernels.pure_marginal(psi.amplitudes, 4, _KEEP_FIRST_THREE)
    return float(kernels.negativity_masked(rho3, 3, 4))


def n1_curve_ghzw4(p: float, nu1: float) -> float:
    pair, _ = closed_form_negativity_Z4(p)
    one_rest = 0.5 * math.sqrt(3.0 + p * p)
    base = _z4_triple_negativity(p) - 2.0 * pair
    return one_rest - 3.0 * pair - 3.0 * regulated_power(base, nu1)


def n2_curve_ghzw4(p: float, nu2: float) -> float:
    pair, _ = closed_form_negativity_Z4(p)
    base = _z4_triple_negativity(p) ** 2 - 2.0 * pair * pair
    return (3.0 + p * p) / 4.0 - 3.0 * pair * pair - 3.0 * regulated_power(base, nu2)


def _resolve_nu(nu: float, which: int) -> str:
    star = nu_star()[which - 1]
    if math.isinf(nu):
        return "inf"
    if abs(nu - star) < 1e-9:
        return "star"
    raise UnsupportedExponentError(
        f"nu{which}={nu} unsupported; roofs exist at nu{which}* ({star:.6f}) and infinity"
    )


@lru_cache(maxsize=None)
def n1_star_breakpoint() -> float:
    """Sign change of the family curve at the threshold exponent."""
    star = nu_star()[0]
    return bisect_root(lambda p: n1_curve_ghzw4(p, star), 0.2, 0.99, xtol=1e-10)


@lru_cache(maxsize=None)
def n2_star_breakpoint() -> float:
    star = nu_star()[1]
    return bisect_root(lambda p: n2_curve_ghzw4(p, star), 0.2, 0.99, xtol=1e-10)


@lru_cache(maxsize=None)
def n1_inf_anchor() -> float:
    """Mixing anchor convexifying the small-p region at infinite exponent."""
    w4_value = n1_curve_ghzw4(0.0, math.inf)
    objective = lambda p, a: w4_value * (a - p) / a + (p / a) * n1_curve_ghzw4(a, math.inf)
    return stationary_mix_point(objective, (0.4, 0.999))


@lru_cache(maxsize=None)
def n2_inf_anchors() -> tuple[float, float]:
    """Lower and upper mixing anchors at infinite exponent."""
    w4_value = n2_curve_ghzw4(0.0, math.inf)
    lower_obj = lambda p, a: w4_value * (a - p) / a + (p / a) * n2_curve_ghzw4(a, math.inf)
    upper_obj = lambda p, a: (p - a) / (1.0 - a) \
        + (1.0 - p) / (1.0 - a) * n2_curve_ghzw4(a, math.inf)
    lower = stationary_mix_point(lower_obj, (0.3, 0.999))
    upper = stationary_mix_point(upper_obj, (0.75, 0.9995))
    return lower, upper


# ---------------------------------------------------------------------------
# roof points and explicit optimal decompositions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RoofPoint:
    """Roof value at one mixing parameter plus its optimal decomposition."""

    p: float
    value: float
    ensemble: Ensemble
    segment: str


def rho4_ghzw4(p: float) -> DensityMatrix:
    """Target rank-2 mixture p GHZ4 + (1-p) W4."""
    return ghzw4_family().mixture(p)


def _members(pairs) -> Ensemble:
    return Ensemble.of((w, s) for w, s in pairs if w > 1e-15)


def _phase_pair_ensemble(p: float) -> Ensemble:
    fam = ghzw4_family()
    return _members([(0.5, fam.generate(p, 0.0)), (0.5, fam.generate(p, math.pi))])


def _w4_mix_ensemble(p: float, anchor: float) -> Ensemble:
    fam = ghzw4_family()
    share = p / (2.0 * anchor)
    return _members([
        (share, fam.generate(anchor, 0.0)),
        (share, fam.generate(anchor, math.pi)),
        (1.0 - p / anchor, named_state("w4")),
    ])


def _ghz4_mix_ensemble(p: float, anchor: float) -> Ensemble:
    fam = ghzw4_family()
    share = (1.0 - p) / (2.0 * (1.0 - anchor))
    return _members([
        ((p - anchor) / (1.0 - anchor), named_state("ghz4")),
        (share, fam.generate(anchor, 0.0)),
        (share, fam.generate(anchor, math.pi)),
    ])


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return p


def t1_roof_ghzw4(p: float) -> RoofPoint:
    """Roof of the tangle-based measure: the spectral decomposition itself."""
    p = _check_p(p)
    ensemble = _members([(p, named_state("ghz4")), (1.0 - p, named_state("w4"))])
    return RoofPoint(p, p, ensemble, "spectral")


def n1_roof_ghzw4(p: float, nu1: float) -> RoofPoint:
    p = _check_p(p)
    branch = _resolve_nu(nu1, 1)
    if branch == "star":
        p0 = n1_star_breakpoint()
        if p <= p0:
            return RoofPoint(p, 0.0, _w4_mix_ensemble(p, p0), "w4-mix")
        return RoofPoint(p, n1_curve_ghzw4(p, nu1), _phase_pair_ensemble(p), "curve")
    p1 = n1_inf_anchor()
    if p <= p1:
        w4_value = n1_curve_ghzw4(0.0, math.inf)
        value = w4_value * (p1 - p) / p1 + (p / p1) * n1_curve_ghzw4(p1, math.inf)
        return RoofPoint(p, value, _w4_mix_ensemble(p, p1), "w4-mix")
    return RoofPoint(p, n1_curve_ghzw4(p, math.inf), _phase_pair_ensemble(p), "curve")


def n2_roof_ghzw4(p: float, nu2: float) -> RoofPoint:
    p = _check_p(p)
    branch = _resolve_nu(nu2, 2)
    if branch == "star":
        p0 = n2_star_breakpoint()
        if p <= p0:
            return RoofPoint(p, 0.0, _w4_mix_ensemble(p, p0), "w4-mix")
        return RoofPoint(p, n2_curve_ghzw4(p, nu2), _phase_pair_ensemble(p), "curve")
    p1, p2 = n2_inf_anchors()
    if p <= p1:
        w4_value = n2_curve_ghzw4(0.0, math.inf)
        value = w4_value * (p1 - p) / p1 + (p / p1) * n2_curve_ghzw4(p1, math.inf)
        return RoofPoint(p, value, _w4_mix_ensemble(p, p1), "w4-mix")
    if p <= p2:
        return RoofPoint(p, n2_curve_ghzw4(p, math.inf), _phase_pair_ensemble(p), "curve")
    value = (p - p2) / (1.0 - p2) + (1.0 - p) / (1.0 - p2) * n2_curve_ghzw4(p2, math.inf)
    return RoofPoint(p, value, _ghz4_mix_ensemble(p, p2), "ghz4-mix")


@dataclass(frozen=True)
class ConvexRoofResult:
    """Roof of a measure over the rank-2 mixture family on a p grid.

    ``certificate`` is the per-p gap between the characteristic minimum and
    its convex envelope; ``max_decomposition_deviation`` is the worst
    elementwise mismatch of the sampled decompositions against the target
    mixtures.  ``conjectured`` marks envelope-only results with no verified
    decompositions.
    """

    scenario: str
    nu_label: str | None
    nu_value: float | None
    breakpoints: tuple[float, ...]
    segments: tuple[tuple[str, float, float], ...]
    p_grid: np.ndarray
    values: np.ndarray
    min_curve: np.ndarray
    envelope: np.ndarray
    certificate: np.ndarray
    max_decomposition_deviation: float
    conjectured: bool
    point_fn: Callable[[float], RoofPoint] | None

    def point(self, p: float) -> RoofPoint:
        if self.point_fn is None:
            raise TangleLabError(f"scenario {self.scenario!r} has no decompositions")
        return self.point_fn(p)


def _convexity_violation(xs: np.ndarray, ys: np.ndarray) -> float:
    """Largest amount by which a grid value pokes above its neighbor chord."""
    left = ys[:-2]
    right = ys[2:]
    x0, x1, x2 = xs[:-2], xs[1:-1], xs[2:]
    chord = left + (right - left) * (x1 - x0) / (x2 - x0)
    return float((ys[1:-1] - chord).max(initial=0.0))


def solve_roof_ghzw4(scenario: str, nu: float | None = None,
                     p_grid: Sequence[float] | None = None,
                     verify_samples: int = 21,
                     verify_tol: float = 1e-9) -> ConvexRoofResult:
    """Solve one roof scenario over the rank-2 GHZ4/W4 mixtures."""
    ps = np.linspace(0.0, 1.0, DEFAULT_P_POINTS) if p_grid is None \
        else _checked_grid(p_grid, "p")
    if scenario == "t1":
        point_fn = t1_roof_ghzw4
        curve_fn = t1_curve_ghzw4
        breakpoints = (0.0, 1.0)
        segments = (("spectral", 0.0, 1.0),)
        nu_label = nu_value = None
    elif scenario in ("n1", "n2"):
        if nu is None:
            raise UnsupportedExponentError(f"scenario {scenario!r} needs a nu value")
        which = 1 if scenario == "n1" else 2
        label = _resolve_nu(nu, which)
        nu_value = nu_star()[which - 1] if label == "star" else math.inf
        nu_label = label
        if scenario == "n1":
            point_fn = lambda p: n1_roof_ghzw4(p, nu_value)
            curve_fn = lambda p: n1_curve_ghzw4(p, nu_value)
            inner = (n1_star_breakpoint(),) if label == "star" else (n1_inf_anchor(),)
        else:
            point_fn = lambda p: n2_roof_ghzw4(p, nu_value)
            curve_fn = lambda p: n2_curve_ghzw4(p, nu_value)
            inner = (n2_star_breakpoint(),) if label == "star" else n2_inf_anchors()
        breakpoints = (0.0, *inner, 1.0)
        labels = {"n1": ("w4-mix", "curve"), "n2": ("w4-mix", "curve", "ghz4-mix")}
        names = labels[scenario][: len(inner) + 1]
        segments = tuple(
            (name, breakpoints[i], breakpoints[i + 1]) for i, name in enumerate(names)
        )
    else:
        raise TangleLabError(f"unknown roof scenario {scenario!r}")

    # fold the exact breakpoints into the grid so the hull touches them
    ps = np.union1d(ps, breakpoints)
    points = [point_fn(p) for p in ps]
    values = np.array([pt.value for pt in points])
    min_curve = np.array([curve_fn(p) for p in ps])
    envelope, _ = lower_convex_envelope(ps, min_curve)
    # sandwich check where the decompositions touch the characteristic curve
    for bp in breakpoints:
        value = point_fn(bp).value
        env_at = float(np.interp(bp, ps, envelope))
        if env_at > value + 1e-9 or value > curve_fn(bp) + 1e-9:
            raise TangleLabError(
                f"roof of {scenario!r} breaks the envelope sandwich at p={bp}"
            )
    bulge = _convexity_violation(ps, values)
    if bulge > 1e-8:
        raise TangleLabError(f"roof of {scenario!r} is not convex (violation {bulge})")

    worst = 0.0
    for p in np.linspace(0.0, 1.0, verify_samples):
        point = point_fn(p)
        ok, deviation = verify_decomposition(point.ensemble, rho4_ghzw4(p), verify_tol)
        worst = max(worst, deviation)
        if not ok:
            raise TangleLabError(
                f"decomposition of {scenario!r} fails at p={p} (deviation {deviation})"
            )
    return ConvexRoofResult(
        scenario=scenario,
        nu_label=nu_label,
        nu_value=nu_value,
        breakpoints=breakpoints,
        segments=segments,
        p_grid=ps,
        values=values,
        min_curve=min_curve,
        envelope=envelope,
        certificate=min_curve - envelope,
        max_decomposition_deviation=worst,
        conjectured=False,
        point_fn=point_fn,
    )


# ---------------------------------------------------------------------------
# reduced tripartite states of the GHZ4/W4 family
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReducedTripartite:
    """Spectral form of the three-qubit marginal of a Z4(p, phi) state."""

    lam: float
    n_plus: float
    n_minus: float
    mu_plus: float
    mu_minus: float
    nu_plus: float
    nu_minus: float
    psi_plus: PureState
    psi_minus: PureState

    def reconstruction(self) -> DensityMatrix:
        a_plus = self.psi_plus.amplitudes
        a_minus = self.psi_minus.amplitudes
        mat = self.lam * np.outer(a_plus, a_plus.conj()) \
            + (1.0 - self.lam) * np.outer(a_minus, a_minus.conj())
        return DensityMatrix(3, mat)


def reduced_tripartite_spectral(p: float, phi: float) -> ReducedTripartite:
    lam, (n_p, mu_p, nu_p), (n_m, mu_m, nu_m) = reduced_family_params(p)
    return ReducedTripartite(
        lam=lam,
        n_plus=n_p, n_minus=n_m,
        mu_plus=mu_p, mu_minus=mu_m,
        nu_plus=nu_p, nu_minus=nu_m,
        psi_plus=reduced_family_member(p, phi, +1),
        psi_minus=reduced_family_member(p, phi, -1),
    )


def tau_reduced_upper_bound(p: float, phi: float) -> float:
    """Spectral-ensemble upper bound on the residual entanglement of the
    reduced tripartite state (the roof itself stays uncomputed)."""
    lam, _, _ = reduced_family_params(p)
    return lam * residual_reduced_pure(p, phi, +1) \
        + (1.0 - lam) * residual_reduced_pure(p, phi, -1)


# ---------------------------------------------------------------------------
# appendix family: closed-form residual entanglement and its zeros
# ---------------------------------------------------------------------------

_CUBIC_SHIFT = 2.0 / (3.0 * math.sqrt(6.0))


@dataclass(frozen=True)
class AppendixTau3Params:
    """Ingredients of the two closed forms at one (p, phi) point."""

    z: complex | None
    f0: float
    f1: float
    f2: float
    f3: float
    phi0: float


def _tau3_fourier_coeffs(p: float) -> tuple[float, float, float, float]:
    root6 = math.sqrt(6.0)
    f0 = 155.0 / 1728.0 * (1.0 + 6.0 * p - 6.0 * p * p) \
        + (2.0 * p - 1.0) / (6.0 * root6) * (1.0 - 10.0 * p + 10.0 * p * p)
    f1 = 101.0 / 288.0 * math.sqrt(p * (1.0 - p)) * (1.0 + p - p * p)
    f2 = 6.0 * p * (1.0 - p) * (155.0 / 1728.0 + (2.0 * p - 1.0) / (6.0 * root6))
    f3 = 101.0 / 864.0 * math.sqrt((p * (1.0 - p)) ** 3)
    return f0, f1, f2, f3


def _tau3_fourier_value(p: float, phi: float) -> float:
    f0, f1, f2, f3 = _tau3_fourier_coeffs(p)
    prefactor = 1.0 - 2.0 * math.sqrt(p * (1.0 - p)) * math.cos(phi)
    inner = f0 + f1 * math.cos(phi) + f2 * math.cos(2.0 * phi) + f3 * math.cos(3.0 * phi)
    return 2.0 * math.sqrt(max(prefactor * inner, 0.0))


def _tau3_product_value(p: float, phi: float) -> float:
    z = np.exp(1j * phi) * math.sqrt((1.0 - p) / p)
    return 4.0 * p * p * abs((1.0 - z) / 2.0) \
        * abs((1.0 - z) ** 3 / 8.0 + _CUBIC_SHIFT * (1.0 + z) ** 3)


def appendix_tau3(p: float, phi: float) -> tuple[float, AppendixTau3Params]:
    """Residual entanglement of the appendix superposition family.

    Both printed forms are evaluated and must agree; the product form is the
    returned value for p > 0 (the Fourier form's square root limits its
    absolute precision near the zeros, so agreement falls back to the squared
    values there), and the Fourier form covers p = 0 where it stays finite.
    """
    p = _check_p(p)
    fourier = _tau3_fourier_value(p, phi)
    if p > 1e-12:
        value = _tau3_product_value(p, phi)
        if abs(value - fourier) > 1e-9 and abs(value ** 2 - fourier ** 2) > 1e-12:
            raise TangleLabError(
                f"closed forms disagree at p={p}, phi={phi}: {value} vs {fourier}"
            )
        z = complex(np.exp(1j * phi) * math.sqrt((1.0 - p) / p))
    else:
        value = fourier
        z = None
    f0, f1, f2, f3 = _tau3_fourier_coeffs(p)
    return value, AppendixTau3Params(z, f0, f1, f2, f3, appendix_phi0())


def _tau3_grid(ps: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """Product-form values over a (p, phi) grid; exact limit column at p = 0."""
    values = np.empty((ps.size, phis.size))
    positive = ps > 1e-12
    p = ps[positive][:, None]
    z = np.exp(1j * phis)[None, :] * np.sqrt((1.0 - p) / p)
    values[positive] = 4.0 * p * p * np.abs((1.0 - z) / 2.0) \
        * np.abs((1.0 - z) ** 3 / 8.0 + _CUBIC_SHIFT * (1.0 + z) ** 3)
    if not positive.all():
        values[~positive] = 2.0 * math.sqrt(_tau3_fourier_coeffs(0.0)[0])
    return values


def _cubic_factor_roots() -> np.ndarray:
    k = _CUBIC_SHIFT
    coeffs = [k - 0.125, 3.0 * (k + 0.125), 3.0 * (k - 0.125), k + 0.125]
    return np.roots(coeffs)


@lru_cache(maxsize=None)
def appendix_phi0() -> float:
    """Phase offset of the complex-conjugate zero pair."""
    for z in _cubic_factor_roots():
        if z.imag > 1e-9:
            return float(math.pi - (np.angle(z) % (2.0 * math.pi)))
    raise TangleLabError("cubic factor lost its complex root pair")


@lru_cache(maxsize=None)
def appendix_zeros() -> tuple[tuple[float, float], ...]:
    """All interior zeros of the appendix residual entanglement as (p, phi)."""
    zeros = [(0.5, 0.0)]
    for z in _cubic_factor_roots():
        p = 1.0 / (1.0 + abs(z) ** 2)
        phi = float(np.angle(z) % (2.0 * math.pi))
        zeros.append((float(p), phi))
    return tuple(sorted(zeros))


def appendix_target(p: float) -> DensityMatrix:
    """The rank-2 mixture of the two appendix members."""
    return appendix_family().mixture(p)


def appendix_envelope(p_grid: Sequence[float] | None = None,
                      phi_grid: Sequence[float] | None = None) -> ConvexRoofResult:
    """Convex envelope of the appendix characteristic minimum.

    This is only a conjectured roof: the candidate decompositions at the
    touching points do not reproduce the mixture, so no ensembles are
    attached.
    """
    ps = np.linspace(0.0, 1.0, DEFAULT_P_POINTS) if p_grid is None \
        else _checked_grid(p_grid, "p")
    phis = np.linspace(0.0, 2.0 * math.pi, DEFAULT_PHI_POINTS) if phi_grid is None \
        else _checked_grid(phi_grid, "phi")
    # fold the exact zeros into the grid so the hull touches them
    zero_ps = [z[0] for z in appendix_zeros()]
    zero_phis = [z[1] for z in appendix_zeros()]
    ps = np.union1d(ps, zero_ps)
    phis = np.union1d(phis, zero_phis)
    values = _tau3_grid(ps, phis)
    min_curve = values.min(axis=1)
    envelope, vertices = lower_convex_envelope(ps, min_curve)
    breakpoints = tuple(v[0] for v in vertices)
    return ConvexRoofResult(
        scenario="appendix-tau3",
        nu_label=None,
        nu_value=None,
        breakpoints=breakpoints,
        segments=(("envelope", 0.0, 1.0),),
        p_grid=ps,
        values=envelope,
        min_curve=min_curve,
        envelope=envelope,
        certificate=min_curve - envelope,
        max_decomposition_deviation=math.nan,
        conjectured=True,
        point_fn=None,
    )


def verify_decomposition(ensemble: Ensemble, target: DensityMatrix,
                         tol: float = 1e-9) -> tuple[bool, float]:
    """Elementwise check that the ensemble reproduces the target state."""
    if ensemble.n_qubits != target.n_qubits:
        raise TangleLabError("ensemble and target have different qubit counts")
    deviation = float(np.abs(ensemble_to_density(ensemble).matrix - target.matrix).max())
    return deviation < tol, deviation
