"""
Quantum Search
Grover search for a model of a CNF formula: with a known number of models,
with an unknown number (classical first guess, random iteration count), and
the variant over phi' = phi AND X_{n+1}.
"""

import logging
import math
from typing import Optional

import numpy as np

from app.algorithms.results import SearchResult
from app.baselines.ledger import QueryLedger
from app.logic.assignment import Assignment
from app.logic.formula import CnfFormula, evaluate
from app.quantum.circuits import OracleSpec, apply_weighted_grover, prepare_rot_state
from app.quantum.statevector import sample_indices

logger = logging.getLogger(__name__)


def grover_iterations(num_models: int, num_worlds: int) -> int:
    """R = floor(pi/4 * sqrt(N/M))."""
    return int(math.floor(math.pi / 4.0 * math.sqrt(num_worlds / num_models)))


def success_probability(num_models: int, num_worlds: int, iterations: int) -> float:
    """sin^2((2R+1) theta) with sin^2 theta = M/N."""
    theta = math.asin(math.sqrt(num_models / num_worlds))
    return math.sin((2 * iterations + 1) * theta) ** 2


def success_probability_unknown_m(num_models: int, num_worlds: int, m: int) -> float:
    """
    Probability of a solution when R is uniform in [0, m-1].

    P_m = 1/2 - sin(4 m theta) / (4 m sin(2 theta)), sin^2 theta = M/N.
    """
    if m < 1:
        raise ValueError("m must be positive")
    theta = math.asin(math.sqrt(num_models / num_worlds))
    denominator = 4 * m * math.sin(2 * theta)
    if abs(denominator) < 1e-12:
        # theta is 0 or pi/2: every iteration count gives sin^2 theta
        return math.sin(theta) ** 2
    return 0.5 - math.sin(4 * m * theta) / denominator


def _uniform_world(num_bits: int, rng: np.random.Generator) -> Assignment:
    return Assignment.from_index(int(rng.integers(1 << num_bits)), num_bits)


def _search(spec: OracleSpec, iterations: int, rng: np.random.Generator, ledger: QueryLedger) -> Assignment:
    state = prepare_rot_state(None, spec)
    apply_weighted_grover(state, None, spec, iterations=iterations)
    ledger.charge(iterations)
    index = int(sample_indices(state.probabilities(), rng, 1)[0])
    return Assignment.from_index(index, spec.num_search_qubits)


def _result(
    x: Assignment, satisfied: bool, iterations: int, run: QueryLedger, ledger: Optional[QueryLedger]
) -> SearchResult:
    if ledger is not None:
        ledger.merge(run)
    return SearchResult(assignment=x, satisfied=satisfied, iterations=iterations, oracle_queries=run.oracle_queries)


def grover_search_known_m(
    formula: CnfFormula,
    num_models: int,
    rng: np.random.Generator,
    ledger: Optional[QueryLedger] = None,
) -> SearchResult:
    """
    Grover search when the number of models M is known.

    Args:
        formula: CNF formula
        num_models: M, between 0 and 2^n
        rng: Random generator
        ledger: Optional query counter

    Returns:
        SearchResult; the world is a model with probability at least 1/4.
        With M = 0 it is a uniform world flagged unsatisfied.
    """
    run = QueryLedger()
    n = formula.num_vars
    total = 1 << n
    if not 0 <= num_models <= total:
        raise ValueError(f"Model count {num_models} outside [0, {total}]")
    if num_models == 0:
        logger.info("M = 0: Grover iterations leave the superposition unchanged; returning a uniform world")
        return _result(_uniform_world(n, rng), False, 0, run, ledger)
    if 4 * num_models > 3 * total:
        x = _uniform_world(n, rng)
        return _result(x, evaluate(formula, x), 0, run, ledger)

    iterations = grover_iterations(num_models, total)
    logger.debug(f"Grover search: N={total}, M={num_models}, R={iterations}")
    x = _search(OracleSpec(formula=formula, extra_qubit=False), iterations, rng, run)
    return _result(x, evaluate(formula, x), iterations, run, ledger)


def grover_search_unknown_m(
    formula: CnfFormula,
    rng: np.random.Generator,
    ledger: Optional[QueryLedger] = None,
) -> SearchResult:
    """
    Quantum search with unknown M: try one classical guess, then run G a
    uniform number of times in [0, m-1] with m = floor(sqrt(N)) + 1.
    """
    run = QueryLedger()
    n = formula.num_vars
    guess = _uniform_world(n, rng)
    run.charge()
    if evaluate(formula, guess):
        return _result(guess, True, 0, run, ledger)

    m = math.isqrt(1 << n) + 1
    iterations = int(rng.integers(m))
    logger.debug(f"Unknown-M search: m={m}, R={iterations}")
    x = _search(OracleSpec(formula=formula, extra_qubit=False), iterations, rng, run)
    return _result(x, evaluate(formula, x), iterations, run, ledger)


def grover_search_extra_qubit(
    formula: CnfFormula,
    rng: np.random.Generator,
    ledger: Optional[QueryLedger] = None,
) -> SearchResult:
    """
    Quantum search over phi' with m = floor(sqrt(N/2)) + 1.

    Returns:
        SearchResult over n+1 bits; satisfied when the formula holds on the
        first n bits and the last bit is 1
    """
    run = QueryLedger()
    n = formula.num_vars
    m = math.isqrt((1 << n) // 2) + 1
    iterations = int(rng.integers(m))
    logger.debug(f"Extra-qubit search: m={m}, R={iterations}")
    x = _search(OracleSpec(formula=formula, extra_qubit=True), iterations, rng, run)
    return _result(x, satisfies_extended(formula, x), iterations, run, ledger)


def satisfies_extended(formula: CnfFormula, x: Assignment) -> bool:
    """phi'(x) for an (n+1)-bit assignment."""
    if len(x) != formula.num_vars + 1:
        raise ValueError(f"Expected {formula.num_vars + 1} bits, got {len(x)}")
    return x.bits[-1] and evaluate(formula, Assignment(x.bits[:-1]))
