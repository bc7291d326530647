"""Central numeric tolerance record.

All equality/PSD/norm thresholds used across the library live here so the
looser slack needed by the spectrum-based code paths stays in one place.
The ``TANGLE_LAB_TOL`` environment variable overrides the default equality
tolerance for a whole process (handy for CLI golden-table checks).
"""
from __future__ import annotations

import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    equality: float = 1e-10   # generic value comparisons
    norm: float = 1e-12       # state norm / trace / hermiticity checks
    psd: float = 1e-10        # eigenvalues may dip to -psd before we complain
    spectrum: float = 1e-9    # slack for eigensolver-backed closed-form checks


def load_tolerances() -> Tolerances:
    raw = os.environ.get("TANGLE_LAB_TOL")
    if not raw:
        return Tolerances()
    value = float(raw)
    if value <= 0:
        raise ValueError(f"TANGLE_LAB_TOL must be positive, got {raw!r}")
    return Tolerances(equality=value)


TOL = load_tolerances()
