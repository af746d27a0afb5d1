"""
Configuration Management
Loads environment variables and manages simulator defaults.
"""

import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


class Settings:
    """Simulator settings loaded from environment variables"""

    # Reproducibility
    SEED: int = int(os.getenv("QWMC_SEED", "12345"))

    # Shots
    SHOTS: int = int(os.getenv("QWMC_SHOTS", "1000"))
    QWMC_SHOTS: int = int(os.getenv("QWMC_QWMC_SHOTS", "1"))  # QWMC shots feeding QWCS

    # Desk-scale limits
    ENUMERATION_LIMIT: int = int(os.getenv("QWMC_ENUMERATION_LIMIT", "24"))
    MAX_QUBITS: int = int(os.getenv("QWMC_MAX_QUBITS", "26"))
    MAX_QFT_BITS: int = int(os.getenv("QWMC_MAX_QFT_BITS", "20"))
    MAX_ANCILLAS: int = int(os.getenv("QWMC_MAX_ANCILLAS", "16"))
    # Dense 2^k x 2^k operators (WG matrix, matrix backend, to_matrix)
    MAX_DENSE_QUBITS: int = int(os.getenv("QWMC_MAX_DENSE_QUBITS", "12"))

    # Controlled-power backend for phase estimation ("matrix" or "gates")
    POWER_BACKEND: str = os.getenv("QWMC_POWER_BACKEND", "matrix").strip().lower()
    GATE_BACKEND_MAX_BITS: int = int(os.getenv("QWMC_GATE_BACKEND_MAX_BITS", "4"))

    # Output
    OUTPUT_FORMAT: str = os.getenv("QWMC_OUTPUT_FORMAT", "json").strip().lower()
    OUT_DIR: str = os.getenv("QWMC_OUT_DIR", "results")

    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO").upper()


# Create settings instance
settings = Settings()
