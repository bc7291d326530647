"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

The backend is picked once at import time from ``TANGLE_LAB_BACKEND``
(``"numba"``, the default, or ``"numpy"``).  Loop-style primitives are
compiled with ``@njit`` under numba; under the numpy backend they are
replaced by vectorized twins with identical signatures.  Composite kernels
(full-state measures used inside grid sweeps) are written once and either
compiled or run as plain Python on top of whichever primitives are active.

Conventions: an ``n``-qubit pure state is a complex128 vector of length
``2**n`` with qubit 0 the most significant basis-index bit; qubit subsets
are passed as sorted int64 arrays, partial transposition as a basis-index
bitmask.

``benchmarks/bench_backends.py`` times the two paths against each other.
"""
from __future__ import annotations

import os

import numpy as np

_requested = os.environ.get("TANGLE_LAB_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(
        f"TANGLE_LAB_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numba":
    try:
        from numba import njit as _njit
        _ACTIVE = "numba"
    except ImportError:
        _ACTIVE = "numpy"
else:
    _ACTIVE = "numpy"


def backend() -> str:
    """Name of the active kernel backend ('numba' or 'numpy')."""
    return _ACTIVE


if _ACTIVE == "numba":
    def _compile(fn):
        return _njit(cache=True)(fn)
else:
    def _compile(fn):
        return fn


# ---------------------------------------------------------------------------
# primitives, loop style (numba source)
# ---------------------------------------------------------------------------

def _pure_marginal_loops(psi, n, keep):
    k = keep.shape[0]
    dk = 1 << k
    dm = 1 << (n - k)
    kidx = np.zeros(dk, np.int64)
    for a in range(dk):
        v = 0
        for j in range(k):
            if (a >> (k - 1 - j)) & 1:
                v |= 1 << (n - 1 - keep[j])
        kidx[a] = v
    shifts = np.empty(n - k, np.int64)
    c = 0
    for q in range(n):
        kept = False
        for j in range(k):
            if keep[j] == q:
                kept = True
        if not kept:
            shifts[c] = n - 1 - q
            c += 1
    ridx = np.zeros(dm, np.int64)
    for r in range(dm):
        v = 0
        for j in range(n - k):
            if (r >> (n - k - 1 - j)) & 1:
                v |= 1 << shifts[j]
        ridx[r] = v
    rho = np.zeros((dk, dk), np.complex128)
    for a in range(dk):
        for b in range(a, dk):
            s = 0.0 + 0.0j
            for r in range(dm):
                s += psi[kidx[a] | ridx[r]] * np.conj(psi[kidx[b] | ridx[r]])
            rho[a, b] = s
            if b != a:
                rho[b, a] = np.conj(s)
    return rho


def _partial_transpose_loops(rho, n, mask):
    dim = rho.shape[0]
    inv = (dim - 1) ^ mask
    out = np.empty_like(rho)
    for i in range(dim):
        for j in range(dim):
            out[i, j] = rho[(i & inv) | (j & mask), (j & inv) | (i & mask)]
    return out


# ---------------------------------------------------------------------------
# primitives, vectorized numpy twins
# ---------------------------------------------------------------------------

def _subset_index_maps(n, keep):
    k = len(keep)
    a = np.arange(1 << k, dtype=np.int64)
    kidx = np.zeros(1 << k, dtype=np.int64)
    for j in range(k):
        kidx |= ((a >> (k - 1 - j)) & 1) << (n - 1 - int(keep[j]))
    rest = [q for q in range(n) if q not in set(int(x) for x in keep)]
    r = np.arange(1 << len(rest), dtype=np.int64)
    ridx = np.zeros(1 << len(rest), dtype=np.int64)
    for j, q in enumerate(rest):
        ridx |= ((r >> (len(rest) - 1 - j)) & 1) << (n - 1 - q)
    return kidx, ridx


def _pure_marginal_np(psi, n, keep):
    kidx, ridx = _subset_index_maps(n, keep)
    m = psi[kidx[:, None] | ridx[None, :]]
    return m @ m.conj().T


def _partial_transpose_np(rho, n, mask):
    dim = rho.shape[0]
    inv = (dim - 1) ^ mask
    idx = np.arange(dim)
    rows = (idx[:, None] & inv) | (idx[None, :] & mask)
    cols = (idx[None, :] & inv) | (idx[:, None] & mask)
    return rho[rows, cols]


NUMPY_TWINS = {
    "pure_marginal": _pure_marginal_np,
    "partial_transpose_masked": _partial_transpose_np,
}

if _ACTIVE == "numba":
    pure_marginal = _compile(_pure_marginal_loops)
    partial_transpose_masked = _compile(_partial_transpose_loops)
else:
    pure_marginal = _pure_marginal_np
    partial_transpose_masked = _partial_transpose_np


# ---------------------------------------------------------------------------
# composite kernels, single source for both backends
# ---------------------------------------------------------------------------

def _wootters_lambdas_impl(rho):
    """Spin-flip spectrum square roots, descending.

    Computed as the singular values of F^T Y F with rho = F F^dagger, which
    is backward stable even on (near) rank-one inputs, unlike eigenvalues of
    the non-normal operator product.
    """
    vals, vecs = np.linalg.eigh(rho)
    factor = vecs * np.sqrt(np.maximum(vals, 0.0))
    flipped = np.empty((4, 4), np.complex128)
    for i in range(4):
        sign = -1.0 if (i == 0 or i == 3) else 1.0
        for j in range(4):
            flipped[i, j] = sign * factor[3 - i, j]
    _, lam, _ = np.linalg.svd(np.dot(factor.T, flipped))
    return lam


def _concurrence_mixed_fast_impl(rho):
    lam = wootters_lambdas(rho)
    c = lam[0] - lam[1] - lam[2] - lam[3]
    return c if c > 0.0 else 0.0


def _hermitian_trace_norm_impl(h):
    return np.abs(np.linalg.eigvalsh(h)).sum()


def _negativity_masked_impl(rho, n, mask):
    pt = partial_transpose_masked(rho, n, mask)
    value = np.abs(np.linalg.eigvalsh(pt)).sum() - 1.0
    return value if value > 0.0 else 0.0


def _tangle_d_coeffs_impl(a):
    d1 = a[0] ** 2 * a[7] ** 2 + a[1] ** 2 * a[6] ** 2 \
        + a[2] ** 2 * a[5] ** 2 + a[4] ** 2 * a[3] ** 2
    d2 = a[0] * a[7] * a[3] * a[4] + a[0] * a[7] * a[5] * a[2] \
        + a[0] * a[7] * a[6] * a[1] + a[3] * a[4] * a[5] * a[2] \
        + a[3] * a[4] * a[6] * a[1] + a[5] * a[2] * a[6] * a[1]
    d3 = a[0] * a[6] * a[5] * a[3] + a[7] * a[1] * a[2] * a[4]
    return d1, d2, d3


def _three_tangle_value_impl(a):
    d1, d2, d3 = tangle_d_coeffs(a)
    return 4.0 * abs(d1 - 2.0 * d2 + 4.0 * d3)


def _marginal_det_impl(rho):
    det = (rho[0, 0] * rho[1, 1] - rho[0, 1] * rho[1, 0]).real
    return det if det > 0.0 else 0.0


def _t1_pure4_impl(psi):
    """Average squared-concurrence leftover of a 4-qubit pure state."""
    keep1 = np.empty(1, np.int64)
    keep2 = np.empty(2, np.int64)
    total = 0.0
    for a in range(4):
        keep1[0] = a
        left = 4.0 * _marginal_det(pure_marginal(psi, 4, keep1))
        for b in range(4):
            if b == a:
                continue
            if a < b:
                keep2[0] = a
                keep2[1] = b
            else:
                keep2[0] = b
                keep2[1] = a
            c = concurrence_mixed_fast(pure_marginal(psi, 4, keep2))
            left -= c * c
        total += left
    return 0.25 * total


def _negativity_parts4_impl(psi):
    """All marginal negativities of a 4-qubit pure state.

    Returns (one_vs_rest[f], pair[i, j], one_vs_two[f, j, k]) where the last
    holds the focus-vs-pair negativity of the marginal on qubits {f, j, k}
    for j < k, both distinct from f.
    """
    one_rest = np.zeros(4)
    pair = np.zeros((4, 4))
    one_two = np.zeros((4, 4, 4))
    keep1 = np.empty(1, np.int64)
    keep2 = np.empty(2, np.int64)
    keep3 = np.empty(3, np.int64)
    for a in range(4):
        keep1[0] = a
        one_rest[a] = 2.0 * np.sqrt(_marginal_det(pure_marginal(psi, 4, keep1)))
    for a in range(4):
        for b in range(a + 1, 4):
            keep2[0] = a
            keep2[1] = b
            value = negativity_masked(pure_marginal(psi, 4, keep2), 2, 2)
            pair[a, b] = value
            pair[b, a] = value
    for f in range(4):
        for j in range(4):
            if j == f:
                continue
            for k in range(j + 1, 4):
                if k == f:
                    continue
                if f < j:
                    keep3[0] = f
                    keep3[1] = j
                    keep3[2] = k
                    pos = 0
                elif f < k:
                    keep3[0] = j
                    keep3[1] = f
                    keep3[2] = k
                    pos = 1
                else:
                    keep3[0] = j
                    keep3[1] = k
                    keep3[2] = f
                    pos = 2
                rho3 = pure_marginal(psi, 4, keep3)
                one_two[f, j, k] = negativity_masked(rho3, 3, 1 << (2 - pos))
    return one_rest, pair, one_two


wootters_lambdas = _compile(_wootters_lambdas_impl)
concurrence_mixed_fast = _compile(_concurrence_mixed_fast_impl)
hermitian_trace_norm = _compile(_hermitian_trace_norm_impl)
negativity_masked = _compile(_negativity_masked_impl)
tangle_d_coeffs = _compile(_tangle_d_coeffs_impl)
three_tangle_value = _compile(_three_tangle_value_impl)
_marginal_det = _compile(_marginal_det_impl)
t1_pure4 = _compile(_t1_pure4_impl)
negativity_parts4 = _compile(_negativity_parts4_impl)


def warmup() -> None:
    """Trigger JIT compilation of every kernel on tiny inputs."""
    psi4 = np.zeros(16, np.complex128)
    psi4[0] = np.sqrt(0.5)
    psi4[15] = np.sqrt(0.5)
    psi3 = np.zeros(8, np.complex128)
    psi3[0] = 1.0
    keep = np.array([0, 1], np.int64)
    rho = pure_marginal(psi4, 4, keep)
    partial_transpose_masked(rho, 2, 2)
    wootters_lambdas(rho)
    concurrence_mixed_fast(rho)
    hermitian_trace_norm(rho)
    negativity_masked(rho, 2, 2)
    tangle_d_coeffs(psi3)
    three_tangle_value(psi3)
    t1_pure4(psi4)
    negativity_parts4(psi4)
