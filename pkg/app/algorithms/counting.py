"""
Weighted Model Counting
QWMC runs phase estimation of the weighted Grover operator WG prepared by
Rot; the eigenphase pi*y/2^t gives WMC = 2 sin^2(pi y / 2^t). Quantum counting
is the same circuit with every weight at 1/2.
"""

import logging
import math
from typing import Optional

import numpy as np

from app.algorithms.results import CountEstimate, WmcEstimate
from app.baselines.ledger import QueryLedger
from app.config import settings
from app.errors import QubitLimitError
from app.logic.formula import CnfFormula, WeightedFormula
from app.quantum.circuits import OracleSpec, build_rot, build_weighted_grover, weighted_grover_matrix
from app.quantum.phase_estimation import phase_estimation, phase_of
from app.rng import SeedLike, make_rng

logger = logging.getLogger(__name__)

# ceil(log2(2 + 1/(2 eps))) for eps = 1/12
_CONFIDENCE_BITS = 3


def default_t_bits(num_vars: int) -> int:
    """Counting bits ceil(n/2) + 5."""
    return (num_vars + 1) // 2 + 5


def accuracy_bits(t: int) -> int:
    return t - _CONFIDENCE_BITS


def error_bound(num_vars: int) -> float:
    """2^(-n/2 - 1/2), reached with probability 11/12 at the default t."""
    return 2.0 ** (-num_vars / 2.0 - 0.5)


def wmc_from_phase(y: int, t: int) -> float:
    """2 sin^2(pi y / 2^t); y and 2^t - y give the same value."""
    return 2.0 * math.sin(math.pi * phase_of(y, t)) ** 2


def qwmc(
    wf: WeightedFormula,
    t: Optional[int] = None,
    shots: Optional[int] = None,
    rng: SeedLike = None,
    backend: Optional[str] = None,
    ledger: Optional[QueryLedger] = None,
) -> WmcEstimate:
    """
    Quantum weighted model counting.

    Args:
        wf: Weighted formula
        t: Counting bits (default ceil(n/2) + 5)
        shots: Measurements of the counting register (default from settings)
        rng: Generator or seed
        backend: "matrix" or "gates" (default from settings)
        ledger: Optional query counter, charged 2^t - 1

    Returns:
        WmcEstimate built from the histogram mode
    """
    n = wf.num_vars
    t = default_t_bits(n) if t is None else t
    if t < 1:
        raise ValueError(f"t must be at least 1, got {t}")
    shots = settings.SHOTS if shots is None else shots
    backend = (backend or settings.POWER_BACKEND).lower()
    rng = make_rng(rng)
    if n + 1 + t > settings.MAX_QUBITS:
        raise QubitLimitError(f"QWMC needs {n + 1} search and {t} counting qubits, cap is {settings.MAX_QUBITS}")

    nw = wf.normalized()
    spec = OracleSpec(formula=wf.formula, extra_qubit=True)
    rot = build_rot(nw, with_extra=True)
    if backend == "gates":
        unitary = build_weighted_grover(nw, spec)
        prepare = rot.widened(unitary.total_qubits)
    else:
        unitary = weighted_grover_matrix(nw, spec)
        prepare = rot

    logger.info(f"QWMC: n={n}, t={t}, shots={shots}, backend={backend}")
    histogram = phase_estimation(unitary, prepare, t, shots, rng, backend)
    y = histogram.mode()
    normalized = wmc_from_phase(y, t)
    queries = (1 << t) - 1
    if ledger is not None:
        ledger.charge(queries)

    logger.info(f"QWMC mode y={y}/{1 << t}, normalized estimate {normalized:.6f}")
    return WmcEstimate(
        normalized_estimate=normalized,
        raw_estimate=normalized * nw.v_product,
        v_product=nw.v_product,
        t=t,
        m=accuracy_bits(t),
        error_bound=error_bound(n),
        measured_phase_integer=y,
        shots=shots,
        oracle_queries=queries,
        backend=backend,
        histogram=histogram,
    )


def quantum_count(
    formula: CnfFormula,
    t: Optional[int] = None,
    shots: Optional[int] = None,
    rng: SeedLike = None,
    backend: Optional[str] = None,
    ledger: Optional[QueryLedger] = None,
) -> CountEstimate:
    """
    Quantum counting: uniform-weight QWMC, M = round(2^n * estimate).

    Returns:
        CountEstimate with the integer model count and the underlying estimate
    """
    estimate = qwmc(WeightedFormula.unweighted(formula), t, shots, rng, backend, ledger)
    count = int(np.rint((1 << formula.num_vars) * estimate.normalized_estimate))
    logger.info(f"Quantum count: M = {count}")
    return CountEstimate(model_count=count, wmc=estimate)


def count_error_bound(num_models: int) -> float:
    """sqrt(M/2) + 1/8."""
    return math.sqrt(num_models / 2.0) + 0.125
