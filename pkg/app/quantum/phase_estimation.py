"""
Phase Estimation
Counting register in uniform superposition, controlled U^(2^j) ladder, inverse
QFT, then repeated sampling of the counting register.

Layout: the unitary's register occupies qubits 0..k-1, counting qubit j is
qubit k + j and holds bit j of the measured integer y (phase = y / 2^t).
"""

import logging
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from app.config import settings
from app.errors import QubitLimitError
from app.quantum.backend_base import PowerBackend
from app.quantum.backend_factory import get_power_backend
from app.quantum.circuits import CircuitGadget, build_inverse_qft
from app.quantum.histogram import Histogram
from app.quantum.statevector import apply_1q, hadamard, marginal_probabilities, sample, zero_state

logger = logging.getLogger(__name__)

Unitary = Union[np.ndarray, CircuitGadget, PowerBackend]


@lru_cache(maxsize=32)
def _inverse_qft_at(t: int, offset: int) -> CircuitGadget:
    return build_inverse_qft(t).shifted(offset, offset + t)


def _resolve_backend(unitary: Unitary, backend: Optional[str]) -> PowerBackend:
    if isinstance(unitary, PowerBackend):
        return unitary
    return get_power_backend(unitary, backend)


def _run_circuit(unitary: Unitary, prepare: Optional[CircuitGadget], t: int, backend: Optional[str]):
    if not 1 <= t <= settings.MAX_QFT_BITS:
        raise ValueError(f"Counting bits must be between 1 and {settings.MAX_QFT_BITS}, got {t}")
    power = _resolve_backend(unitary, backend)
    k = power.register_qubits
    if prepare is not None and prepare.total_qubits != k:
        raise ValueError(
            f"Register size mismatch: unitary acts on {k} qubits, preparation on {prepare.total_qubits}"
        )
    if k + t > settings.MAX_QUBITS:
        raise QubitLimitError(f"Phase estimation needs {k} + {t} qubits, cap is {settings.MAX_QUBITS}")

    state = zero_state(k + t)
    if prepare is not None:
        prepare.apply(state)
    h = hadamard()
    for j in range(t):
        apply_1q(state, h, k + j)
    for j in range(t):
        power.apply_controlled_power(state, k + j, j)
    _inverse_qft_at(t, k).apply(state)
    logger.debug(f"Phase estimation: {k} register qubits, {t} counting bits, backend {power.get_backend_name()}")
    return state, list(range(k, k + t))


def phase_estimation_distribution(
    unitary: Unitary,
    prepare: Optional[CircuitGadget],
    t: int,
    backend: Optional[str] = None,
) -> np.ndarray:
    """
    Exact outcome distribution of the counting register.

    Args:
        unitary: Dense matrix, gadget, or a ready PowerBackend
        prepare: State preparation on the register (None leaves |0...0>)
        t: Counting bits
        backend: "matrix" or "gates" (default from settings)

    Returns:
        Probability of each y in 0..2^t-1
    """
    state, counting = _run_circuit(unitary, prepare, t, backend)
    return marginal_probabilities(state, counting).probabilities


def phase_estimation(
    unitary: Unitary,
    prepare: Optional[CircuitGadget],
    t: int,
    shots: int,
    rng: np.random.Generator,
    backend: Optional[str] = None,
) -> Histogram:
    """
    Sample the counting register `shots` times.

    The circuit is simulated once; shots are independent draws from its
    final state.

    Returns:
        Histogram over t-bit integers y
    """
    state, counting = _run_circuit(unitary, prepare, t, backend)
    return sample(state, counting, rng, shots)


def phase_of(y: int, t: int) -> float:
    """Measured integer y as a fraction of a full turn."""
    return y / float(1 << t)
