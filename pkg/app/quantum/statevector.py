"""
State Vector Simulator
Dense complex amplitudes over k qubits with in-place gate kernels, marginal
measurement and shot sampling.

Qubit q is bit q of the basis index (qubit 0 is the least significant bit).
Internally the amplitude vector is viewed as a k-dimensional [2]*k tensor in C
order, so qubit q lives on axis k - 1 - q.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Tuple, Union

import numpy as np

from app.config import settings
from app.errors import QubitLimitError
from app.quantum.histogram import Histogram
from app.rng import shot_uniforms

logger = logging.getLogger(__name__)

Predicate = Union[np.ndarray, Callable[[int], bool]]

_UNITARY_TOL = 1e-10


# =============================================================================
# Types
# =============================================================================

@dataclass(eq=False)
class StateVector:
    """A unit vector in C^(2^k); mutated in place by the gate kernels"""

    num_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        self.amps = np.ascontiguousarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (1 << self.num_qubits,):
            raise ValueError(
                f"Expected {1 << self.num_qubits} amplitudes for {self.num_qubits} qubits, got {self.amps.shape}"
            )

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amps.copy())

    def probabilities(self) -> np.ndarray:
        return self.amps.real ** 2 + self.amps.imag ** 2

    def norm(self) -> float:
        return float(math.sqrt(self.probabilities().sum()))

    def is_normalized(self, tol: float = 1e-9) -> bool:
        return abs(self.norm() - 1.0) < tol

    def tensor(self) -> np.ndarray:
        """Writable [2]*k view of the amplitudes."""
        return self.amps.reshape((2,) * self.num_qubits)


@dataclass(frozen=True, eq=False)
class Gate1Q:
    """Single-qubit unitary; name and params identify it in circuit dumps"""

    name: str
    matrix: np.ndarray
    params: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.complex128)
        if matrix.shape != (2, 2):
            raise ValueError(f"Gate {self.name} must be 2x2, got {matrix.shape}")
        if not np.allclose(matrix.conj().T @ matrix, np.eye(2), atol=_UNITARY_TOL):
            raise ValueError(f"Gate {self.name} is not unitary")
        object.__setattr__(self, "matrix", matrix)

    def adjoint(self) -> "Gate1Q":
        if self.name in ("H", "X", "Z"):
            return self
        if self.name == "RY":
            return ry(-self.params[0])
        if self.name == "P":
            return phase(-self.params[0])
        return Gate1Q(f"{self.name}_dg", self.matrix.conj().T, self.params)

    def __repr__(self) -> str:
        args = ", ".join(f"{p:.6g}" for p in self.params)
        return f"{self.name}({args})" if args else self.name


def hadamard() -> Gate1Q:
    s = 1.0 / math.sqrt(2.0)
    return Gate1Q("H", np.array([[s, s], [s, -s]]))


def pauli_x() -> Gate1Q:
    return Gate1Q("X", np.array([[0, 1], [1, 0]]))


def pauli_z() -> Gate1Q:
    return Gate1Q("Z", np.array([[1, 0], [0, -1]]))


def ry(theta: float) -> Gate1Q:
    """Rotation about Y: |0> -> cos(theta/2)|0> + sin(theta/2)|1>."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return Gate1Q("RY", np.array([[c, -s], [s, c]]), (float(theta),))


def phase(lam: float) -> Gate1Q:
    """diag(1, e^{i lam})."""
    return Gate1Q("P", np.array([[1, 0], [0, cmath.exp(1j * lam)]]), (float(lam),))


@dataclass(frozen=True, eq=False)
class MarginalDistribution:
    """
    Outcome probabilities over a list of query qubits.

    Bit i of an outcome integer is the value of qubit query[i].
    """

    query: Tuple[int, ...]
    probabilities: np.ndarray

    def probability(self, outcome: int) -> float:
        return float(self.probabilities[outcome])

    def as_dict(self, tol: float = 0.0) -> dict:
        return {i: float(p) for i, p in enumerate(self.probabilities) if p > tol}

    def is_normalized(self, tol: float = 1e-9) -> bool:
        return bool(np.all(self.probabilities >= 0)) and abs(float(self.probabilities.sum()) - 1.0) < tol


# =============================================================================
# Construction
# =============================================================================

def _check_size(k: int) -> None:
    if k < 1:
        raise ValueError(f"Qubit count must be at least 1, got {k}")
    if k > settings.MAX_QUBITS:
        raise QubitLimitError(f"{k} qubits exceed the cap of {settings.MAX_QUBITS}")


def zero_state(k: int) -> StateVector:
    """|0...0> over k qubits."""
    _check_size(k)
    amps = np.zeros(1 << k, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(k, amps)


def basis_state(k: int, index: int) -> StateVector:
    _check_size(k)
    if not 0 <= index < (1 << k):
        raise ValueError(f"Basis index {index} out of range for {k} qubits")
    amps = np.zeros(1 << k, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(k, amps)


def from_amplitudes(amps: Sequence[complex], normalize: bool = False) -> StateVector:
    amps = np.asarray(amps, dtype=np.complex128)
    k = int(amps.size).bit_length() - 1
    if amps.ndim != 1 or (1 << k) != amps.size:
        raise ValueError(f"Amplitude count {amps.size} is not a power of two")
    _check_size(k)
    if normalize:
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("Cannot normalize the zero vector")
        amps = amps / norm
    return StateVector(k, amps.copy())


# =============================================================================
# Gate kernels
# =============================================================================

def _check_qubits(s: StateVector, qubits: Iterable[int]) -> Tuple[int, ...]:
    qubits = tuple(int(q) for q in qubits)
    for q in qubits:
        if not 0 <= q < s.num_qubits:
            raise ValueError(f"Qubit {q} out of range for a {s.num_qubits}-qubit state")
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"Qubits overlap: {qubits}")
    return qubits


def _control_index(k: int, controls: Sequence[int]) -> list:
    index = [slice(None)] * k
    for c in controls:
        index[k - 1 - c] = 1
    return index


def apply_controlled_1q(s: StateVector, g: Gate1Q, controls: Sequence[int], target: int) -> StateVector:
    """
    Apply g to `target` on the amplitudes whose control bits are all 1.

    Args:
        s: State, updated in place
        g: Single-qubit gate
        controls: Control qubits (may be empty)
        target: Target qubit

    Returns:
        The same state object
    """
    qubits = _check_qubits(s, tuple(controls) + (target,))
    k = s.num_qubits
    tensor = s.tensor()
    index0 = _control_index(k, qubits[:-1])
    index1 = list(index0)
    index0[k - 1 - target] = 0
    index1[k - 1 - target] = 1
    a0 = tensor[tuple(index0)]
    a1 = tensor[tuple(index1)]
    m = g.matrix
    new0 = m[0, 0] * a0 + m[0, 1] * a1
    new1 = m[1, 0] * a0 + m[1, 1] * a1
    tensor[tuple(index0)] = new0
    tensor[tuple(index1)] = new1
    return s


def apply_1q(s: StateVector, g: Gate1Q, target: int) -> StateVector:
    """Apply g to one qubit (in place)."""
    return apply_controlled_1q(s, g, (), target)


def apply_controlled_unitary(
    s: StateVector, matrix: np.ndarray, controls: Sequence[int], targets: Sequence[int]
) -> StateVector:
    """
    Apply a dense 2^m x 2^m unitary to `targets` under `controls`.

    Bit j of the block's row/column index is qubit targets[j].
    """
    qubits = _check_qubits(s, tuple(controls) + tuple(targets))
    controls = qubits[: len(controls)]
    m = len(targets)
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.shape != (1 << m, 1 << m):
        raise ValueError(f"Unitary of shape {matrix.shape} does not act on {m} qubits")

    k = s.num_qubits
    sub = s.tensor()[tuple(_control_index(k, controls))]
    control_axes = {k - 1 - c for c in controls}
    rest_axes = [a for a in range(k) if a not in control_axes]
    # C order: the last axis of the block is the least significant bit, i.e. targets[0]
    target_pos = [rest_axes.index(k - 1 - t) for t in reversed(targets)]
    other_pos = [i for i in range(len(rest_axes)) if i not in target_pos]
    perm = other_pos + target_pos
    block = sub.transpose(perm).reshape(-1, 1 << m)
    updated = (block @ matrix.T).reshape([2] * len(rest_axes))
    sub[...] = updated.transpose(np.argsort(perm))
    return s


def apply_phase_flip_where(s: StateVector, predicate: Predicate) -> StateVector:
    """
    Negate amps[j] exactly where predicate(j) holds.

    Args:
        s: State, updated in place
        predicate: Boolean mask over basis indices, or a callable index -> bool
    """
    if callable(predicate):
        mask = np.fromiter((bool(predicate(j)) for j in range(s.dim)), dtype=bool, count=s.dim)
    else:
        mask = np.asarray(predicate, dtype=bool)
        if mask.shape != (s.dim,):
            raise ValueError(f"Phase mask must have {s.dim} entries, got {mask.shape}")
    np.negative(s.amps, out=s.amps, where=mask)
    return s


# =============================================================================
# Measurement
# =============================================================================

def marginal_probabilities(s: StateVector, query: Sequence[int]) -> MarginalDistribution:
    """
    Partial-trace marginal over the query qubits.

    P(q) sums |amps[j]|^2 over every index j whose query bits equal q; bit i of
    q is qubit query[i].
    """
    query = _check_qubits(s, query)
    k = s.num_qubits
    probs = s.probabilities().reshape((2,) * k)
    query_axes = {k - 1 - q for q in query}
    traced = tuple(a for a in range(k) if a not in query_axes)
    reduced = probs.sum(axis=traced) if traced else probs
    if not query:
        return MarginalDistribution((), np.atleast_1d(np.asarray(reduced, dtype=np.float64)))

    # remaining axes are in ascending axis order, i.e. descending qubit order
    remaining = [q for q in reversed(range(k)) if q in set(query)]
    perm = [remaining.index(q) for q in reversed(query)]
    return MarginalDistribution(query, np.ascontiguousarray(reduced.transpose(perm)).reshape(-1))


def probability_where(s: StateVector, mask: np.ndarray) -> float:
    """Total probability of the basis states selected by a Boolean mask."""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (s.dim,):
        raise ValueError(f"Mask must have {s.dim} entries, got {mask.shape}")
    return float(s.probabilities()[mask].sum())


def sample(s: StateVector, query: Sequence[int], rng: np.random.Generator, shots: int) -> Histogram:
    """
    Draw `shots` independent outcomes from the query marginal.

    The state is left untouched, so it can be sampled again.
    """
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    marginal = marginal_probabilities(s, query)
    p = marginal.probabilities
    draws = sample_indices(p, rng, shots)
    logger.debug(f"Sampled {shots} shots over qubits {list(query)}")
    return Histogram.from_counts(np.bincount(draws, minlength=p.size), len(query))


def sample_indices(probabilities: np.ndarray, rng: np.random.Generator, shots: int) -> np.ndarray:
    """
    Draw outcome indices from a probability vector (renormalized first).

    Shot i inverts the cumulative distribution at its own per-shot uniform.
    """
    p = np.asarray(probabilities, dtype=np.float64)
    cdf = np.cumsum(p)
    cdf /= cdf[-1]
    return np.searchsorted(cdf, shot_uniforms(rng, shots), side="right")
