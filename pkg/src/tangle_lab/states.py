"""Qubit state containers, tensor algebra, and the named-state registry.

Basis convention: qubit 0 is the leftmost ket label and the most significant
bit of the basis index, so ``|01>`` on two qubits is index 1.  All containers
are immutable after construction and safe to share across threads.
"""
from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from . import kernels
from .config import TOL
from .errors import InvalidStateError, InvalidSubsetError, UnknownStateError

__all__ = [
    "PureState",
    "DensityMatrix",
    "QubitSubset",
    "Ensemble",
    "tensor_product",
    "partial_trace",
    "partial_transpose",
    "ensemble_to_density",
    "spectral_ensemble",
    "named_state",
    "NAMED_STATES",
    "PARAMETRIC_STATES",
    "states_equal_up_to_phase",
    "amplitudes_equal",
    "random_pure_state",
    "random_density_matrix",
]


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PureState:
    """Normalized complex amplitude vector over ``n_qubits`` qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1:
            raise InvalidStateError(f"need at least one qubit, got {self.n_qubits}")
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (2 ** self.n_qubits,):
            raise InvalidStateError(
                f"amplitude vector of length {amps.shape} does not match "
                f"{self.n_qubits} qubits"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > TOL.norm:
            raise InvalidStateError(f"state norm {norm} deviates from 1")
        object.__setattr__(self, "amplitudes", _freeze(amps))

    @classmethod
    def of(cls, amplitudes) -> "PureState":
        amps = np.asarray(amplitudes, dtype=np.complex128)
        n = int(amps.size).bit_length() - 1
        if 2 ** n != amps.size:
            raise InvalidStateError(f"length {amps.size} is not a power of two")
        return cls(n, amps)

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(self.n_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))

    def permuted(self, order: Iterable[int]) -> "PureState":
        """Relabel qubits: qubit ``j`` of the result is qubit ``order[j]``."""
        order = tuple(order)
        if sorted(order) != list(range(self.n_qubits)):
            raise InvalidSubsetError(f"{order} is not a permutation of qubits")
        amps = self.amplitudes.reshape((2,) * self.n_qubits).transpose(order).reshape(-1)
        return PureState(self.n_qubits, amps)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, PSD, trace-one operator on ``2**n_qubits`` dimensions."""

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1:
            raise InvalidStateError(f"need at least one qubit, got {self.n_qubits}")
        mat = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        dim = 2 ** self.n_qubits
        if mat.shape != (dim, dim):
            raise InvalidStateError(f"matrix shape {mat.shape} does not match {self.n_qubits} qubits")
        if np.abs(mat - mat.conj().T).max() > TOL.norm:
            raise InvalidStateError("matrix is not Hermitian within tolerance")
        trace = mat.trace()
        if abs(trace - 1.0) > TOL.norm:
            raise InvalidStateError(f"trace {trace} deviates from 1")
        smallest = np.linalg.eigvalsh(mat)[0]
        if smallest < -TOL.psd:
            raise InvalidStateError(f"matrix has negative eigenvalue {smallest}")
        object.__setattr__(self, "matrix", _freeze(mat))

    @classmethod
    def of(cls, matrix) -> "DensityMatrix":
        mat = np.asarray(matrix, dtype=np.complex128)
        n = int(mat.shape[0]).bit_length() - 1
        if mat.ndim != 2 or 2 ** n != mat.shape[0]:
            raise InvalidStateError(f"shape {mat.shape} is not a square qubit operator")
        return cls(n, mat)

    def purity(self) -> float:
        return float(np.vdot(self.matrix, self.matrix).real)


@dataclass(frozen=True)
class QubitSubset:
    """Strictly increasing tuple of qubit labels."""

    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(q) for q in self.indices)
        if not idx:
            raise InvalidSubsetError("qubit subset is empty")
        if any(q < 0 for q in idx):
            raise InvalidSubsetError(f"negative qubit label in {idx}")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise InvalidSubsetError(f"labels {idx} are not strictly increasing")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, spec: "SubsetLike") -> "QubitSubset":
        if isinstance(spec, QubitSubset):
            return spec
        if isinstance(spec, (int, np.integer)):
            return cls((int(spec),))
        items = sorted(int(q) for q in spec)
        if len(set(items)) != len(items):
            raise InvalidSubsetError(f"duplicate qubit labels in {spec!r}")
        return cls(tuple(items))

    def __len__(self) -> int:
        return len(self.indices)

    def check_within(self, n_qubits: int) -> None:
        if self.indices[-1] >= n_qubits:
            raise InvalidSubsetError(
                f"subset {self.indices} out of range for {n_qubits} qubits"
            )

    def mask(self, n_qubits: int) -> int:
        self.check_within(n_qubits)
        m = 0
        for q in self.indices:
            m |= 1 << (n_qubits - 1 - q)
        return m

    def complement(self, n_qubits: int) -> "QubitSubset":
        self.check_within(n_qubits)
        rest = tuple(q for q in range(n_qubits) if q not in self.indices)
        if not rest:
            raise InvalidSubsetError("complement of the full qubit set is empty")
        return QubitSubset(rest)


SubsetLike = Union[QubitSubset, int, Iterable[int]]


@dataclass(frozen=True)
class Ensemble:
    """Weighted list of pure states realizing a mixed state."""

    members: tuple[tuple[float, PureState], ...]

    def __post_init__(self):
        members = tuple((float(w), s) for w, s in self.members)
        if not members:
            raise InvalidStateError("ensemble has no members")
        n = members[0][1].n_qubits
        for w, s in members:
            if w < 0:
                raise InvalidStateError(f"negative ensemble weight {w}")
            if s.n_qubits != n:
                raise InvalidStateError("ensemble members mix qubit counts")
        total = sum(w for w, _ in members)
        if abs(total - 1.0) > TOL.norm:
            raise InvalidStateError(f"ensemble weights sum to {total}")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, pairs) -> "Ensemble":
        return cls(tuple(pairs))

    @property
    def n_qubits(self) -> int:
        return self.members[0][1].n_qubits


def tensor_product(a: PureState, b: PureState) -> PureState:
    """Kronecker product with ``a``'s qubits first (most significant)."""
    return PureState(a.n_qubits + b.n_qubits, np.kron(a.amplitudes, b.amplitudes))


def _traced_matrix(mat: np.ndarray, n: int, keep: tuple[int, ...]) -> np.ndarray:
    letters = string.ascii_letters
    keep_set = set(keep)
    row = [letters[q] for q in range(n)]
    col = [row[q] if q not in keep_set else letters[n + q] for q in range(n)]
    out = "".join(row[q] for q in keep) + "".join(col[q] for q in keep)
    reshaped = mat.reshape((2,) * (2 * n))
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, reshaped)
    dim = 2 ** len(keep)
    return reduced.reshape(dim, dim)


def partial_trace(state: Union[DensityMatrix, PureState], keep: SubsetLike) -> DensityMatrix:
    """Reduced density matrix on the ``keep`` qubits."""
    sub = QubitSubset.of(keep)
    sub.check_within(state.n_qubits)
    if isinstance(state, PureState):
        idx = np.array(sub.indices, dtype=np.int64)
        mat = kernels.pure_marginal(state.amplitudes, state.n_qubits, idx)
    else:
        mat = _traced_matrix(state.matrix, state.n_qubits, sub.indices)
    return DensityMatrix(len(sub), mat)


def partial_transpose(rho: Union[DensityMatrix, PureState, np.ndarray],
                      subset: SubsetLike) -> np.ndarray:
    """Partial transposition over ``subset``; Hermitian but possibly non-PSD.

    Accepts a raw Hermitian matrix as well, so the transposition can be
    applied to its own (indefinite) output.
    """
    if isinstance(rho, PureState):
        rho = rho.projector()
    if isinstance(rho, DensityMatrix):
        n, mat = rho.n_qubits, rho.matrix
    else:
        mat = np.ascontiguousarray(rho, dtype=np.complex128)
        n = int(mat.shape[0]).bit_length() - 1
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or 2 ** n != mat.shape[0]:
            raise InvalidStateError(f"shape {mat.shape} is not a square qubit operator")
    sub = QubitSubset.of(subset)
    mask = sub.mask(n)
    return kernels.partial_transpose_masked(mat, n, mask)


def ensemble_to_density(ensemble: Ensemble) -> DensityMatrix:
    """Mix the ensemble members into their density matrix."""
    dim = 2 ** ensemble.n_qubits
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for weight, state in ensemble.members:
        mat += weight * np.outer(state.amplitudes, state.amplitudes.conj())
    return DensityMatrix(ensemble.n_qubits, mat)


def spectral_ensemble(rho: DensityMatrix, cutoff: float = 1e-12) -> Ensemble:
    """Eigendecomposition of ``rho`` as an ensemble of its eigenvectors."""
    values, vectors = np.linalg.eigh(rho.matrix)
    pairs = []
    for w, vec in zip(values[::-1], vectors.T[::-1]):
        if w > cutoff:
            pairs.append((float(w), PureState(rho.n_qubits, vec / np.linalg.norm(vec))))
    total = sum(w for w, _ in pairs)
    return Ensemble.of((w / total, s) for w, s in pairs)


def states_equal_up_to_phase(a: PureState, b: PureState, tol: float | None = None) -> bool:
    """Fidelity-based comparison ignoring a global phase."""
    if a.n_qubits != b.n_qubits:
        return False
    tol = TOL.equality if tol is None else tol
    return abs(np.vdot(a.amplitudes, b.amplitudes)) > 1.0 - tol


def amplitudes_equal(a: PureState, b: PureState, tol: float | None = None) -> bool:
    """Strict elementwise amplitude comparison."""
    if a.n_qubits != b.n_qubits:
        return False
    tol = TOL.equality if tol is None else tol
    return bool(np.abs(a.amplitudes - b.amplitudes).max() <= tol)


def random_pure_state(n_qubits: int, rng: np.random.Generator) -> PureState:
    amps = rng.normal(size=2 ** n_qubits) + 1j * rng.normal(size=2 ** n_qubits)
    return PureState(n_qubits, amps / np.linalg.norm(amps))


def random_density_matrix(n_qubits: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    rank = 2 ** n_qubits if rank is None else rank
    weights = rng.random(rank)
    weights /= weights.sum()
    dim = 2 ** n_qubits
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for w in weights:
        psi = random_pure_state(n_qubits, rng)
        mat += w * np.outer(psi.amplitudes, psi.amplitudes.conj())
    return DensityMatrix(n_qubits, mat)


# ---------------------------------------------------------------------------
# named states
# ---------------------------------------------------------------------------

def _ket(n: int, index: int) -> np.ndarray:
    vec = np.zeros(2 ** n, dtype=np.complex128)
    vec[index] = 1.0
    return vec


def _ghz(n: int) -> np.ndarray:
    return (_ket(n, 0) + _ket(n, 2 ** n - 1)) / np.sqrt(2)


def _w(n: int) -> np.ndarray:
    vec = np.zeros(2 ** n, dtype=np.complex128)
    for q in range(n):
        vec[1 << q] = 1.0
    return vec / np.sqrt(n)


def _fixed_states() -> dict[str, np.ndarray]:
    ghz3, w3 = _ghz(3), _w(3)
    wtilde4 = (_ket(4, 0b0111) + _ket(4, 0b1011) + _ket(4, 0b1101) + _ket(4, 0b1110)) / 2
    phi2 = (np.sqrt(2) * _ket(4, 0b1111) + _ket(4, 0b1000) + _ket(4, 0b0100)
            + _ket(4, 0b0010) + _ket(4, 0b0001)) / np.sqrt(6)
    phi3 = (_ket(4, 0b1111) + _ket(4, 0b1100) + _ket(4, 0b0010) + _ket(4, 0b0001)) / 2
    return {
        "ghz3": ghz3,
        "w3": w3,
        "ghz4": _ghz(4),
        "w4": _w(4),
        "wtilde4": wtilde4,
        "phi1": _ghz(4),
        "phi2": phi2,
        "phi3": phi3,
        "g3": (_ket(4, 0b0000) + _ket(4, 0b1110)) / np.sqrt(2),
        "psi1_app": (ghz3 + w3) / np.sqrt(2),
        "psi2_app": (ghz3 - w3) / np.sqrt(2),
    }


_FIXED = _fixed_states()

_SUPERPOSITIONS = {
    "z3": ("ghz3", "w3"),
    "z4": ("ghz4", "w4"),
    "z_app": ("psi1_app", "psi2_app"),
}

NAMED_STATES = tuple(sorted(_FIXED))
PARAMETRIC_STATES = ("z3", "z4", "z_app")


def _canonical_name(name: str) -> str:
    key = name.strip().lower()
    return {"zapp": "z_app", "wt4": "wtilde4"}.get(key, key)


def named_state(name: str, p: float | None = None, phi: float | None = None) -> PureState:
    """Look up a named state; superposition families need ``p`` (and ``phi``)."""
    key = _canonical_name(name)
    if key in _SUPERPOSITIONS:
        if p is None:
            raise ValueError(f"state {name!r} requires the mixing parameter p")
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {p}")
        phi = 0.0 if phi is None else float(phi)
        first, second = (named_state(s) for s in _SUPERPOSITIONS[key])
        amps = np.sqrt(p) * first.amplitudes \
            - np.exp(1j * phi) * np.sqrt(1.0 - p) * second.amplitudes
        return PureState(first.n_qubits, amps)
    if key in _FIXED:
        if p is not None or phi is not None:
            raise ValueError(f"state {name!r} takes no parameters")
        amps = _FIXED[key]
        n = int(amps.size).bit_length() - 1
        return PureState(n, amps.copy())
    raise UnknownStateError(f"unknown state name {name!r}")
