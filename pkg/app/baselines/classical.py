"""
Classical Estimators
Monte-Carlo counterparts of the quantum procedures, charged query by query,
plus the multinomial vote study behind repeat-and-vote MPE/MAP.
"""

import logging
from typing import Optional, Sequence

import numpy as np

from app.baselines.ledger import CountingOracle, QueryLedger
from app.logic.assignment import Assignment
from app.logic.formula import CnfFormula, WeightedFormula

logger = logging.getLogger(__name__)

# Worlds drawn per block so large sample counts stay within memory
_BLOCK = 1 << 16


def _check_samples(s: int) -> None:
    if s < 1:
        raise ValueError(f"Sample count must be positive, got {s}")


def _count_satisfied(oracle: CountingOracle, s: int, draw) -> int:
    satisfied = 0
    for start in range(0, s, _BLOCK):
        size = min(_BLOCK, s - start)
        satisfied += int(oracle.batch(draw(size)).sum())
    return satisfied


def classical_count_estimate(
    formula: CnfFormula,
    s: int,
    rng: np.random.Generator,
    ledger: Optional[QueryLedger] = None,
) -> float:
    """
    Unbiased model-count estimate from s uniform worlds: S = (N/s) * sum F_i.

    Args:
        formula: CNF formula
        s: Number of samples (oracle queries)
        rng: Random generator
        ledger: Optional query counter, charged s

    Returns:
        Estimate of M
    """
    _check_samples(s)
    n = formula.num_vars
    oracle = CountingOracle(formula, ledger)
    satisfied = _count_satisfied(oracle, s, lambda size: rng.integers(0, 2, size=(size, n), dtype=np.int8).astype(bool))
    return (1 << n) * satisfied / s


def classical_wmc_estimate(
    wf: WeightedFormula,
    s: int,
    rng: np.random.Generator,
    ledger: Optional[QueryLedger] = None,
) -> float:
    """
    Unbiased normalized-WMC estimate: bit i is 1 with probability p_i, the
    estimate is the fraction of sampled worlds that satisfy the formula.

    Multiply by the V product for the raw WMC.
    """
    _check_samples(s)
    p = np.asarray(wf.normalized().p, dtype=np.float64)
    oracle = CountingOracle(wf.formula, ledger)
    satisfied = _count_satisfied(oracle, s, lambda size: rng.random((size, p.size)) < p)
    return satisfied / s


def classical_search(
    formula: CnfFormula,
    budget: int,
    rng: np.random.Generator,
    ledger: Optional[QueryLedger] = None,
) -> Optional[Assignment]:
    """
    Draw up to `budget` uniform worlds and return the first model, or None.
    """
    if budget < 1:
        raise ValueError(f"Budget must be positive, got {budget}")
    oracle = CountingOracle(formula, ledger)
    n = formula.num_vars
    for _ in range(budget):
        x = Assignment.from_index(int(rng.integers(1 << n)), n)
        if oracle(x):
            return x
    return None


def vote_event_probability(k: int, o: int, A: float, trials: int, rng: np.random.Generator) -> float:
    """
    Probability that the favoured category wins a multinomial vote.

    k categories with probability p = 1/(k-1+A) each except the last, which
    has A*p; o draws per vote. Returns the fraction of `trials` votes in which
    the last category's count strictly exceeds every other.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if A < 1:
        raise ValueError("A must be at least 1")
    if o < 1 or trials < 1:
        raise ValueError("o and trials must be positive")
    p = 1.0 / (k - 1 + A)
    probs = np.full(k, p)
    probs[-1] = A * p
    probs /= probs.sum()

    wins = 0
    block = max(1, _BLOCK // k)
    for start in range(0, trials, block):
        size = min(block, trials - start)
        counts = rng.multinomial(o, probs, size=size)
        wins += int((counts[:, -1] > counts[:, :-1].max(axis=1)).sum())
    return wins / trials


def vote_event_grid_defaults() -> dict:
    """Grid of the multinomial vote study."""
    return {
        "ks": (50, 100, 150, 200),
        "os": (2500, 5000, 7500, 10000),
        "As": (1.5, 2.0, 2.5, 3.0),
    }


def mean_and_stderr(values: Sequence[float]) -> tuple:
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        return float(values.mean()), 0.0
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(values.size))
