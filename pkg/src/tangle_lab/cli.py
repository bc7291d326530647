"""Command-line surface: named-state inspection, measure evaluation, golden
tables, family scans, roof solving, and decomposition verification.

Numbers are printed with 12 significant digits in lowercase scientific
notation; identical invocations produce byte-identical output.  Exit codes:
0 success, 1 tolerance failure in ``table``/``verify``, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Callable

import numpy as np

from .bipartite import (
    concurrence_mixed,
    concurrence_one_vs_rest,
    eof_from_concurrence,
    negativity,
)
from .config import TOL
from .errors import TangleLabError, UNSUPPORTED
from .monogamy import PowerFactors, n1, n2, nu_star, t1, t2
from .multipartite import f_invariants, g_monotones, three_tangle_pure
from .roof import (
    appendix_family,
    appendix_phi0,
    appendix_zeros,
    ghz3w3_family,
    ghzw4_family,
    rho4_ghzw4,
    solve_roof_ghzw4,
)
from .states import Ensemble, PureState, named_state, partial_trace
from .roof import verify_decomposition

FAMILIES = {
    "z4": ghzw4_family,
    "z3": ghz3w3_family,
    "zapp": appendix_family,
    "z_app": appendix_family,
}


def fmt(x: float) -> str:
    return f"{x:.11e}"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)


def _parse_nu(raw: str, which: int) -> float:
    text = raw.strip().lower()
    if text in ("star", "*"):
        return nu_star()[which - 1]
    if text in ("inf", "infinity"):
        return math.inf
    return float(text)


def _factors(args) -> PowerFactors:
    return PowerFactors(
        mu3=args.mu3,
        nu1=_parse_nu(args.nu1, 1),
        nu2=_parse_nu(args.nu2, 2),
    )


def _pair_marginal(state: PureState):
    return partial_trace(state, (0, 1))


def _one_vs_two(state: PureState) -> float:
    if state.n_qubits == 3:
        return negativity(state, (0,))
    return negativity(partial_trace(state, (0, 1, 2)), (0,))


def _triple_leftover(state: PureState) -> float:
    n_ijk = _one_vs_two(state)
    n_ij = negativity(_pair_marginal(state), (0,))
    if state.n_qubits == 3:
        n_ik = negativity(partial_trace(state, (0, 2)), (0,))
    else:
        n_ik = negativity(partial_trace(state, (0, 2)), (0,))
    return n_ijk - n_ij - n_ik


def measure_registry(factors: PowerFactors) -> dict[str, Callable[[PureState], float]]:
    def tau3(state: PureState) -> float:
        value, _ = three_tangle_pure(state)
        return value

    def t2_value(state: PureState) -> float:
        value = t2(state, factors)
        if value is UNSUPPORTED:
            raise TangleLabError("t2 is unsupported for this state's reductions")
        return value

    registry: dict[str, Callable[[PureState], float]] = {
        "concurrence_IJ": lambda s: concurrence_mixed(_pair_marginal(s)),
        "concurrence_one_vs_rest": lambda s: concurrence_one_vs_rest(s, 0),
        "eof_IJ": lambda s: eof_from_concurrence(concurrence_mixed(_pair_marginal(s))),
        "negativity_one_vs_rest": lambda s: negativity(s, (0,)),
        "negativity_IJ": lambda s: negativity(_pair_marginal(s), (0,)),
        "negativity_I_JK": _one_vs_two,
        "negativity_triple_leftover": _triple_leftover,
        "tau3": tau3,
        "t1": t1,
        "t2": t2_value,
        "n1": lambda s: n1(s, factors.nu1),
        "n2": lambda s: n2(s, factors.nu2),
    }
    for index, name in enumerate(("F1", "F2", "F3")):
        registry[name] = lambda s, i=index: f_invariants(s)[i]
    for index, name in enumerate(("G1", "G2", "G3")):
        registry[name] = lambda s, i=index: g_monotones(s)[i]
    return registry


def _resolve_state(args) -> PureState:
    name = args.state
    if name.strip().lower() in ("z3", "z4", "zapp", "z_app"):
        return named_state(name, args.p, args.phi)
    return named_state(name)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_state(args) -> int:
    state = _resolve_state(args)
    rows = [
        (i, format(i, f"0{state.n_qubits}b"), amp.real, amp.imag)
        for i, amp in enumerate(state.amplitudes)
    ]
    if args.format == "json":
        payload = {
            "state": args.state,
            "n_qubits": state.n_qubits,
            "p": args.p,
            "phi": args.phi,
            "amplitudes": [
                {"index": i, "bitstring": bits, "re": re, "im": im}
                for i, bits, re, im in rows
            ],
        }
        _emit(json.dumps(payload, indent=2), args.out)
    else:
        lines = [f"# state: {args.state}"]
        if args.p is not None:
            lines.append(f"# p: {fmt(args.p)}")
            lines.append(f"# phi: {fmt(args.phi if args.phi is not None else 0.0)}")
        lines.append("index,bitstring,re,im")
        lines += [f"{i},{bits},{fmt(re)},{fmt(im)}" for i, bits, re, im in rows]
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_measure(args) -> int:
    factors = _factors(args)
    registry = measure_registry(factors)
    if args.measure not in registry:
        raise TangleLabError(f"unknown measure {args.measure!r}; "
                             f"known: {', '.join(sorted(registry))}")
    state = _resolve_state(args)
    value = registry[args.measure](state)
    if args.format == "json":
        payload = {
            "state": args.state,
            "p": args.p,
            "phi": args.phi,
            "measure": args.measure,
            "value": value,
        }
        _emit(json.dumps(payload, indent=2), args.out)
    else:
        _emit(fmt(value), args.out)
    return 0


def _table_one_rows():
    expected = {
        "GHZ4": (1.0, 1.0, 0.5),
        "Phi2": (8.0 / 9.0, 0.0, 0.0),
        "Phi3": (0.0, 0.0, 1.0),
        "Wtilde4": (0.0, 0.0, 0.0),
    }
    rows = []
    for name, exp in expected.items():
        got = f_invariants(named_state(name))
        for label, g, e in zip(("F1", "F2", "F3"), got, exp):
            rows.append((name, label, "", g, e))
    return rows


def _table_two_rows():
    star1, star2 = nu_star()
    nu_values = (("star", star1, star2), ("2", 2.0, 2.0), ("inf", math.inf, math.inf))
    sqrt2, sqrt3 = math.sqrt(2.0), math.sqrt(3.0)

    def w4_n1(nu):
        base = (3.0 - 2.0 * sqrt2) / 2.0
        tail = 0.0 if math.isinf(nu) else base ** nu
        return (3.0 + sqrt3 - 3.0 * sqrt2) / 2.0 - 3.0 * tail

    def w4_n2(nu):
        base = (4.0 * sqrt2 - 5.0) / 4.0
        tail = 0.0 if math.isinf(nu) else base ** nu
        return 1.5 * (sqrt2 - 1.0) - 3.0 * tail

    def phi2_n1(nu):
        return 1.0 - 3.0 * (0.0 if math.isinf(nu) else (2.0 / 3.0) ** nu)

    def phi2_n2(nu):
        return 1.0 - 3.0 * (0.0 if math.isinf(nu) else (4.0 / 9.0) ** nu)

    expected_t = {"GHZ4": (1.0, 1.0), "Phi2": (1.0, 1.0), "Phi3": (1.0, 1.0), "W4": (0.0, 0.0)}
    expected_n = {
        "GHZ4": (lambda nu: 1.0, lambda nu: 1.0),
        "Phi2": (phi2_n1, phi2_n2),
        "Phi3": (lambda nu: -1.0, lambda nu: -1.0),
        "W4": (w4_n1, w4_n2),
    }
    rows = []
    for name in ("GHZ4", "Phi2", "Phi3", "W4"):
        state = named_state(name)
        rows.append((name, "t1", "", t1(state), expected_t[name][0]))
        rows.append((name, "t2", "", t2(state), expected_t[name][1]))
        for label, v1, v2 in nu_values:
            rows.append((name, "n1", label, n1(state, v1), expected_n[name][0](v1)))
            rows.append((name, "n2", label, n2(state, v2), expected_n[name][1](v2)))
    return rows


def _table_three_rows():
    phi0 = 1.27672
    expected = [
        (0.0163588, math.pi),
        (0.5, 0.0),
        (0.74182, math.pi - phi0),
        (0.74182, math.pi + phi0),
    ]
    computed = appendix_zeros()
    rows = []
    for (p_exp, phi_exp), (p_got, phi_got) in zip(sorted(expected), computed):
        rows.append(("zero", "p", "", p_got, p_exp))
        rows.append(("zero", "phi", "", phi_got, phi_exp))
    return rows


def cmd_table(args) -> int:
    which = args.which.upper()
    if which == "I":
        rows, default_tol = _table_one_rows(), 1e-9
    elif which == "II":
        rows, default_tol = _table_two_rows(), 1e-9
    elif which == "III":
        rows, default_tol = _table_three_rows(), 1e-4
    else:
        raise TangleLabError(f"unknown table {args.which!r}; pick I, II, or III")
    tol = TOL.equality if os.environ.get("TANGLE_LAB_TOL") else default_tol

    out_rows = []
    worst = 0.0
    for name, quantity, nu_label, got, exp in rows:
        deviation = abs(got - exp)
        worst = max(worst, deviation)
        out_rows.append((name, quantity, nu_label, got, exp, deviation))
    ok = worst <= tol

    if args.format == "json":
        payload = {
            "table": which,
            "tolerance": tol,
            "max_deviation": worst,
            "ok": ok,
            "rows": [
                {"row": r, "quantity": q, "nu": nu or None,
                 "computed": got, "expected": exp, "deviation": dev}
                for r, q, nu, got, exp, dev in out_rows
            ],
        }
        _emit(json.dumps(payload, indent=2), args.out)
    else:
        lines = [f"# table: {which}", f"# tolerance: {fmt(tol)}",
                 "row,quantity,nu,computed,expected,deviation"]
        lines += [
            f"{r},{q},{nu},{fmt(got)},{fmt(exp)},{fmt(dev)}"
            for r, q, nu, got, exp, dev in out_rows
        ]
        lines.append(f"# max_deviation: {fmt(worst)}")
        lines.append(f"# ok: {str(ok).lower()}")
        _emit("\n".join(lines) + "\n", args.out)
    return 0 if ok else 1


def cmd_scan(args) -> int:
    key = args.family.strip().lower()
    if key not in FAMILIES:
        raise TangleLabError(f"unknown family {args.family!r}; known: Z3, Z4, Zapp")
    family = FAMILIES[key]()
    factors = _factors(args)
    registry = measure_registry(factors)
    if args.measure not in registry:
        raise TangleLabError(f"unknown measure {args.measure!r}; "
                             f"known: {', '.join(sorted(registry))}")
    measure = registry[args.measure]
    if args.grid_p < 2 or args.grid_phi < 1:
        raise TangleLabError("grids need at least 2 p points and 1 phi point")
    ps = np.linspace(0.0, 1.0, args.grid_p)
    phis = np.linspace(0.0, 2.0 * math.pi, args.grid_phi, endpoint=False)

    rows = []
    for p in ps:
        for phi in phis:
            rows.append((p, phi, measure(family.generate(p, phi))))

    if args.format == "json":
        payload = {
            "family": args.family,
            "measure": args.measure,
            "grid_p": args.grid_p,
            "grid_phi": args.grid_phi,
            "rows": [{"p": p, "phi": phi, "value": v} for p, phi, v in rows],
        }
        _emit(json.dumps(payload, indent=2), args.out)
    else:
        lines = [
            f"# family: {args.family}",
            f"# measure: {args.measure}",
            f"# grid_p: {args.grid_p}",
            f"# grid_phi: {args.grid_phi}",
            "p,phi,value",
        ]
        lines += [f"{fmt(p)},{fmt(phi)},{fmt(v)}" for p, phi, v in rows]
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def ensemble_to_payload(ensemble: Ensemble) -> dict:
    return {
        "n_qubits": ensemble.n_qubits,
        "members": [
            {
                "weight": w,
                "amplitudes": [[amp.real, amp.imag] for amp in state.amplitudes],
            }
            for w, state in ensemble.members
        ],
    }


def ensemble_from_payload(payload: dict) -> Ensemble:
    n = int(payload["n_qubits"])
    members = []
    for member in payload["members"]:
        amps = np.array([complex(re, im) for re, im in member["amplitudes"]])
        members.append((float(member["weight"]), PureState(n, amps)))
    return Ensemble.of(members)


def _roof_result(args):
    nu = None
    if args.scenario in ("n1", "n2"):
        if args.nu is None:
            raise TangleLabError(f"scenario {args.scenario!r} needs --nu star|inf")
        nu = _parse_nu(args.nu, 1 if args.scenario == "n1" else 2)
    grid = np.linspace(0.0, 1.0, args.grid_p)
    return solve_roof_ghzw4(args.scenario, nu, grid)


def cmd_roof(args) -> int:
    result = _roof_result(args)
    point = result.point(args.p)
    ok, deviation = verify_decomposition(point.ensemble, rho4_ghzw4(args.p))
    stride = max(1, (result.p_grid.size - 1) // 100)
    samples = [
        {"p": float(p), "value": float(v)}
        for p, v in zip(result.p_grid[::stride], result.values[::stride])
    ]
    payload = {
        "scenario": result.scenario,
        "nu": result.nu_label,
        "nu_value": None if result.nu_value is None else result.nu_value,
        "breakpoints": list(result.breakpoints),
        "segments": [
            {"label": label, "p_lo": lo, "p_hi": hi}
            for label, lo, hi in result.segments
        ],
        "max_decomposition_deviation": result.max_decomposition_deviation,
        "samples": samples,
        "decomposition_at": {
            "p": args.p,
            "segment": point.segment,
            "value": point.value,
            "ensemble": ensemble_to_payload(point.ensemble),
            "verify": {"ok": ok, "max_deviation": deviation},
        },
    }
    _emit(json.dumps(payload, indent=2), args.out)
    return 0


def cmd_verify(args) -> int:
    if args.infile is not None:
        with open(args.infile, "r", encoding="utf-8") as handle:
            ensemble = ensemble_from_payload(json.load(handle))
    else:
        nu = None if args.nu is None else _parse_nu(args.nu, 1 if args.scenario == "n1" else 2)
        if args.scenario == "t1":
            from .roof import t1_roof_ghzw4
            ensemble = t1_roof_ghzw4(args.p).ensemble
        elif args.scenario == "n1":
            from .roof import n1_roof_ghzw4
            ensemble = n1_roof_ghzw4(args.p, nu).ensemble
        else:
            from .roof import n2_roof_ghzw4
            ensemble = n2_roof_ghzw4(args.p, nu).ensemble
    ok, deviation = verify_decomposition(ensemble, rho4_ghzw4(args.p))
    if args.format == "json":
        _emit(json.dumps({"p": args.p, "ok": ok, "max_deviation": deviation}, indent=2),
              args.out)
    else:
        _emit(f"p,ok,max_deviation\n{fmt(args.p)},{str(ok).lower()},{fmt(deviation)}\n",
              args.out)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common(parser, with_state=False, with_factors=False):
    if with_state:
        parser.add_argument("--state", required=True, help="named state")
        parser.add_argument("--p", type=float, default=None)
        parser.add_argument("--phi", type=float, default=None)
    if with_factors:
        parser.add_argument("--nu1", default="star")
        parser.add_argument("--nu2", default="star")
        parser.add_argument("--mu3", type=float, default=1.5)
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tangle-lab",
        description="Entanglement measures and rank-2 convex roofs for small qubit systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_state = sub.add_parser("state", help="print a named state's amplitudes")
    p_state.add_argument("state", help="state name, e.g. GHZ4 or Z4")
    p_state.add_argument("--p", type=float, default=None)
    p_state.add_argument("--phi", type=float, default=None)
    p_state.add_argument("--format", choices=("csv", "json"), default="csv")
    p_state.add_argument("--out", default=None)
    p_state.set_defaults(func=cmd_state)

    p_measure = sub.add_parser("measure", help="evaluate one measure on a named state")
    _add_common(p_measure, with_state=True, with_factors=True)
    p_measure.add_argument("--measure", required=True)
    p_measure.set_defaults(func=cmd_measure)

    p_table = sub.add_parser("table", help="reproduce a golden table")
    p_table.add_argument("which", choices=("I", "II", "III", "i", "ii", "iii"))
    p_table.add_argument("--format", choices=("csv", "json"), default="csv")
    p_table.add_argument("--out", default=None)
    p_table.set_defaults(func=cmd_table)

    p_scan = sub.add_parser("scan", help="sweep a measure over a superposition family")
    p_scan.add_argument("family", help="Z3, Z4, or Zapp")
    p_scan.add_argument("measure")
    p_scan.add_argument("--grid-p", type=int, default=201, dest="grid_p")
    p_scan.add_argument("--grid-phi", type=int, default=25, dest="grid_phi")
    p_scan.add_argument("--nu1", default="star")
    p_scan.add_argument("--nu2", default="star")
    p_scan.add_argument("--mu3", type=float, default=1.5)
    p_scan.add_argument("--format", choices=("csv", "json"), default="csv")
    p_scan.add_argument("--out", default=None)
    p_scan.set_defaults(func=cmd_scan)

    p_roof = sub.add_parser("roof", help="solve a convex-roof scenario")
    p_roof.add_argument("scenario", choices=("t1", "n1", "n2"))
    p_roof.add_argument("--nu", default=None, help="star or inf")
    p_roof.add_argument("--p", type=float, default=0.5)
    p_roof.add_argument("--grid-p", type=int, default=2001, dest="grid_p")
    p_roof.add_argument("--out", default=None)
    p_roof.set_defaults(func=cmd_roof)

    p_verify = sub.add_parser("verify", help="verify a decomposition against the mixture")
    p_verify.add_argument("--scenario", choices=("t1", "n1", "n2"), default="t1")
    p_verify.add_argument("--nu", default=None)
    p_verify.add_argument("--p", type=float, required=True)
    p_verify.add_argument("--in", dest="infile", default=None,
                          help="ensemble JSON emitted by the roof command")
    p_verify.add_argument("--format", choices=("csv", "json"), default="csv")
    p_verify.add_argument("--out", default=None)
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (TangleLabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
