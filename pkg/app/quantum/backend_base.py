"""
Controlled-Power Backend Interface
Abstract base class for the ways phase estimation applies controlled U^(2^j).
"""

from abc import ABC, abstractmethod

from app.quantum.statevector import StateVector


class PowerBackend(ABC):
    """Abstract base class for controlled-power strategies"""

    @property
    @abstractmethod
    def register_qubits(self) -> int:
        """Number of qubits the unitary acts on (qubits 0..k-1 of the state)"""
        pass

    @abstractmethod
    def apply_controlled_power(self, state: StateVector, control: int, j: int) -> StateVector:
        """
        Apply U^(2^j) to the register, controlled by one counting qubit.

        Args:
            state: Full state (register low, counting qubits above), updated in place
            control: Counting qubit index
            j: Power exponent; the unitary is applied 2^j times

        Returns:
            The same state object
        """
        pass

    @abstractmethod
    def get_backend_name(self) -> str:
        """Return the name of the backend"""
        pass
