"""
Gate Power Backend
Controlled powers by applying the controlled gate-level gadget 2^j times.
"""

import logging
from typing import Dict, Tuple

from app.config import settings
from app.quantum.backend_base import PowerBackend
from app.quantum.circuits import CircuitGadget
from app.quantum.statevector import StateVector

logger = logging.getLogger(__name__)


class GatePowerBackend(PowerBackend):
    """Cross-check path: exact, but the cost doubles with every counting bit"""

    def __init__(self, gadget: CircuitGadget):
        self.gadget = gadget
        self._controlled: Dict[Tuple[int, int], CircuitGadget] = {}
        self._warned = False

    @property
    def register_qubits(self) -> int:
        return self.gadget.total_qubits

    def controlled_gadget(self, control: int, total_qubits: int) -> CircuitGadget:
        key = (control, total_qubits)
        if key not in self._controlled:
            self._controlled[key] = self.gadget.controlled([control], total_qubits)
        return self._controlled[key]

    def apply_controlled_power(self, state: StateVector, control: int, j: int) -> StateVector:
        if j >= settings.GATE_BACKEND_MAX_BITS and not self._warned:
            logger.warning(
                f"Gate backend beyond {settings.GATE_BACKEND_MAX_BITS} counting bits; "
                f"applying {self.gadget.name} {1 << j} times"
            )
            self._warned = True
        controlled = self.controlled_gadget(control, state.num_qubits)
        for _ in range(1 << j):
            controlled.apply(state)
        return state

    def get_backend_name(self) -> str:
        return "gates"
