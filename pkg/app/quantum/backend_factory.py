"""
Power Backend Factory
Creates the controlled-power backend for phase estimation based on configuration.
"""

import logging
from typing import Optional, Union

import numpy as np

from app.config import settings
from app.quantum.backend_base import PowerBackend
from app.quantum.circuits import CircuitGadget

logger = logging.getLogger(__name__)

BACKENDS = ("matrix", "gates")


def get_power_backend(unitary: Union[np.ndarray, CircuitGadget], name: Optional[str] = None) -> PowerBackend:
    """
    Factory function to get the controlled-power backend for a unitary.

    Selects the backend from `name` or the QWMC_POWER_BACKEND setting:
    - "matrix" → repeated squaring of the dense matrix (default)
    - "gates" → repeated application of the controlled gadget

    Args:
        unitary: Dense matrix or gate-level gadget
        name: Backend override

    Returns:
        PowerBackend instance
    """
    name = (name or settings.POWER_BACKEND).lower()

    if name == "gates":
        if isinstance(unitary, CircuitGadget):
            from app.quantum.gate_backend import GatePowerBackend
            logger.info(f"Using gate backend for {unitary.name}")
            return GatePowerBackend(unitary)
        logger.warning("Gate backend needs a gadget; falling back to the matrix backend")
        name = "matrix"

    if name != "matrix":
        logger.warning(f"Unknown power backend '{name}', defaulting to matrix")

    from app.quantum.matrix_backend import MatrixPowerBackend
    matrix = unitary.to_matrix() if isinstance(unitary, CircuitGadget) else unitary
    logger.info(f"Using matrix backend ({np.asarray(matrix).shape[0]}-dimensional unitary)")
    return MatrixPowerBackend(matrix)
