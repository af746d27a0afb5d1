"""
Matrix Power Backend
Controlled powers from the unitary's dense matrix by repeated squaring.
"""

import logging
from typing import List

import numpy as np

from app.quantum.backend_base import PowerBackend
from app.quantum.circuits import check_dense_qubits
from app.quantum.statevector import StateVector, apply_controlled_unitary

logger = logging.getLogger(__name__)


class MatrixPowerBackend(PowerBackend):
    """Squares the dense 2^k x 2^k matrix once per counting bit"""

    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=np.complex128)
        dim = matrix.shape[0]
        k = dim.bit_length() - 1
        if matrix.shape != (dim, dim) or (1 << k) != dim:
            raise ValueError(f"Unitary must be square with a power-of-two size, got {matrix.shape}")
        check_dense_qubits(k, "Matrix power backend")
        self._k = k
        self._powers: List[np.ndarray] = [matrix]

    @property
    def register_qubits(self) -> int:
        return self._k

    def power(self, j: int) -> np.ndarray:
        """U^(2^j), cached."""
        while len(self._powers) <= j:
            last = self._powers[-1]
            self._powers.append(last @ last)
        return self._powers[j]

    def apply_controlled_power(self, state: StateVector, control: int, j: int) -> StateVector:
        return apply_controlled_unitary(state, self.power(j), [control], list(range(self._k)))

    def get_backend_name(self) -> str:
        return "matrix"
