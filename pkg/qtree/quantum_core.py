"""Exact two- and four-qubit density-matrix algebra.

This module checks the p-product rule that the rest of the package builds
on. It swaps Werner links by explicit Bell measurement and reads fidelity
off the Pauli correlation matrix.

Swap corrections are fixed for the singlet convention. A Bell outcome
``beta_k`` on the middle pair leaves A and C in that same Bell state, and
the Pauli on C below rotates it back to ``|Psi->``:

    =========  ==========
    outcome    correction
    =========  ==========
    Phi+       X_C Z_C
    Phi-       X_C
    Psi+       Z_C
    Psi-       identity
    =========  ==========

With these corrections, every outcome branch of a Werner x Werner swap
yields the same corrected state.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from . import _constants as C
from ._solve import bisect_increasing
from .errors import InvalidParameterError, StateValidationError

logger = logging.getLogger(__name__)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (X, Y, Z)

BELL_LABELS = ("Phi+", "Phi-", "Psi+", "Psi-")

_BELL_KETS = (
    np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2),
    np.array([1, 0, 0, -1], dtype=complex) / math.sqrt(2),
    np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2),
    np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2),
)

SWAP_CORRECTIONS = (X @ Z, X, Z, I2)


def werner_param(p: float) -> float:
    """Validate a Werner mixing parameter and return it as a float."""
    try:
        value = float(p)
    except (TypeError, ValueError):
        raise InvalidParameterError(f"Werner parameter must be a number, got {p!r}") from None
    if not 0.0 <= value <= 1.0 or math.isnan(value):
        raise InvalidParameterError(f"Werner parameter p must lie in [0, 1], got {p!r}")
    return value


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated 2- or 4-qubit density matrix (dimension 4 or 16)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=complex, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] not in (4, 16):
            raise StateValidationError(f"density matrix must be 4x4 or 16x16, got shape {arr.shape}")
        if not np.allclose(arr, arr.conj().T, atol=C.HERMITIAN_TOL, rtol=0.0):
            raise StateValidationError("density matrix is not Hermitian")
        trace = np.trace(arr).real
        if abs(trace - 1.0) > C.TRACE_TOL:
            raise StateValidationError(f"density matrix trace is {trace!r}, expected 1")
        smallest = np.linalg.eigvalsh(arr).min()
        if smallest < -C.POSITIVITY_TOL:
            raise StateValidationError(f"density matrix has eigenvalue {smallest:.3e} < 0")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def dimension(self) -> int:
        return self.data.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def purity(self) -> float:
        return float(np.trace(self.data @ self.data).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.data)

    def overlap(self, other: "DensityMatrix") -> float:
        """Hilbert-Schmidt inner product Tr(rho sigma)."""
        return float(np.trace(self.data @ other.data).real)

    def allclose(self, other: "DensityMatrix", atol: float = 1e-10) -> bool:
        return bool(np.allclose(self.data, other.data, atol=atol, rtol=0.0))

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """The 3x3 real matrix t_mn = Tr(rho sigma_m x sigma_n)."""

    values: np.ndarray

    def singular_values(self) -> np.ndarray:
        gram = self.values.T @ self.values
        eig = np.linalg.eigvalsh(gram)
        eig = np.where(np.abs(eig) < C.EIGEN_CLAMP, 0.0, eig)
        if eig.min() < 0:
            raise StateValidationError(f"T^T T has negative eigenvalue {eig.min():.3e}")
        return np.sqrt(eig)[::-1]


def kron(*mats: np.ndarray) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def partial_trace(rho: np.ndarray, keep: Sequence[int], n_qubits: int) -> np.ndarray:
    """Trace out every qubit not listed in ``keep`` (qubit 0 is the most significant)."""
    keep = sorted(keep)
    tensor = np.asarray(rho).reshape((2,) * (2 * n_qubits))
    traced = [q for q in range(n_qubits) if q not in keep]
    # trace from the highest index down so remaining axes keep their positions
    for q in reversed(traced):
        remaining = tensor.ndim // 2
        tensor = np.trace(tensor, axis1=q, axis2=q + remaining)
    dim = 2 ** len(keep)
    return tensor.reshape(dim, dim)


def bell_state(index: int) -> DensityMatrix:
    """Projector onto Phi+, Phi-, Psi+ or Psi- for index 0, 1, 2 or 3."""
    if isinstance(index, bool) or not isinstance(index, (int, np.integer)) or not 0 <= index <= 3:
        raise InvalidParameterError(f"Bell index must be 0..3, got {index!r}")
    ket = _BELL_KETS[index]
    return DensityMatrix(np.outer(ket, ket.conj()))


def werner_state(p: float) -> DensityMatrix:
    """(1-p)/4 I + p |Psi-><Psi-|."""
    p = werner_param(p)
    singlet = np.outer(_BELL_KETS[3], _BELL_KETS[3].conj())
    return DensityMatrix((1.0 - p) / 4.0 * np.eye(4) + p * singlet)


def _as_two_qubit(rho) -> np.ndarray:
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(rho)
    if rho.dimension != 4:
        raise StateValidationError(f"expected a 2-qubit state, got dimension {rho.dimension}")
    return rho.data


def correlation_matrix(rho: DensityMatrix) -> CorrelationMatrix:
    data = _as_two_qubit(rho)
    t = np.empty((3, 3))
    for m, sm in enumerate(PAULIS):
        for n, sn in enumerate(PAULIS):
            t[m, n] = np.trace(data @ np.kron(sm, sn)).real
    return CorrelationMatrix(t)


def teleportation_fidelity(rho: DensityMatrix) -> float:
    """Optimal teleportation fidelity (1 + N(rho)/3) / 2 with N the trace norm of T."""
    sv = correlation_matrix(rho).singular_values()
    if sv.max() > 1.0 + C.SINGULAR_VALUE_SLACK:
        raise StateValidationError(f"correlation singular value {sv.max():.12f} exceeds 1")
    return float((1.0 + sv.sum() / 3.0) / 2.0)


def _werner_parameter_of(data: np.ndarray) -> float:
    """Return p when ``data`` is a Werner state, else NaN."""
    singlet = np.outer(_BELL_KETS[3], _BELL_KETS[3].conj())
    p = (4.0 * np.trace(data @ singlet).real - 1.0) / 3.0
    if 0.0 <= p <= 1.0 and np.allclose(data, (1 - p) / 4 * np.eye(4) + p * singlet, atol=1e-12):
        return float(p)
    return float("nan")


def swap_outcomes(rho_ab: DensityMatrix, rho_bc: DensityMatrix) -> List[Tuple[str, float, np.ndarray]]:
    """Per-outcome (label, probability, corrected normalised A-C state) of a middle Bell measurement.

    Qubit order on the joint state is A, B1, B2, C.
    """
    joint = np.kron(_as_two_qubit(rho_ab), _as_two_qubit(rho_bc))
    outcomes = []
    for label, ket, fix in zip(BELL_LABELS, _BELL_KETS, SWAP_CORRECTIONS):
        proj = kron(I2, np.outer(ket, ket.conj()), I2)
        post = partial_trace(proj @ joint @ proj, keep=(0, 3), n_qubits=4)
        prob = float(np.trace(post).real)
        fix_c = np.kron(I2, fix)
        corrected = fix_c @ post @ fix_c.conj().T
        outcomes.append((label, prob, corrected / prob if prob > 0 else corrected))
    total = sum(prob for _, prob, _ in outcomes)
    if abs(total - 1.0) > C.PROBABILITY_SUM_TOL:
        raise StateValidationError(f"Bell outcome probabilities sum to {total!r}")
    return outcomes


def entanglement_swap(rho_ab: DensityMatrix, rho_bc: DensityMatrix) -> DensityMatrix:
    """Swap links A-B1 and B2-C into one A-C link, averaging the corrected outcomes."""
    outcomes = swap_outcomes(rho_ab, rho_bc)
    if not (math.isnan(_werner_parameter_of(_as_two_qubit(rho_ab)))
            or math.isnan(_werner_parameter_of(_as_two_qubit(rho_bc)))):
        for label, prob, _ in outcomes:
            if abs(prob - 0.25) > C.PROBABILITY_SUM_TOL:
                raise StateValidationError(
                    f"Werner swap outcome {label} has probability {prob!r}, expected 1/4"
                )
    result = sum(prob * state for _, prob, state in outcomes)
    return DensityMatrix(result)


def iterated_swap(ps: Sequence[float]) -> DensityMatrix:
    """Swap a chain of Werner links left to right into one end-to-end state."""
    if len(ps) == 0:
        raise InvalidParameterError("chain must contain at least one link")
    state = werner_state(ps[0])
    for p in ps[1:]:
        state = entanglement_swap(state, werner_state(p))
    return state


def chain_fidelity(ps: Sequence[float]) -> float:
    """(1 + prod p_i) / 2 for a repeater chain of Werner links."""
    if len(ps) == 0:
        raise InvalidParameterError("chain must contain at least one link")
    return (1.0 + math.prod(werner_param(p) for p in ps)) / 2.0


def link_threshold(target: float = C.CLASSICAL_LIMIT) -> float:
    """Werner parameter at which a single link's teleportation fidelity reaches ``target``."""
    if not 0.5 < target < 1.0:
        raise InvalidParameterError(f"target must lie in (1/2, 1), got {target!r}")
    p, iterations = bisect_increasing(lambda p: teleportation_fidelity(werner_state(p)), target)
    logger.debug("single-link threshold %.12f after %d halvings", p, iterations)
    return p
