"""
Oracle Query Accounting
A counter for formula evaluations and an oracle wrapper that charges it.
"""

import threading
from typing import Optional

import numpy as np

from app.logic.assignment import Assignment
from app.logic.formula import CnfFormula, evaluate, evaluate_batch


class QueryLedger:
    """Counts oracle queries; safe to share between threads"""

    def __init__(self) -> None:
        self._count = 0
        self._lock = threading.Lock()

    @property
    def oracle_queries(self) -> int:
        return self._count

    def charge(self, queries: int = 1) -> None:
        if queries < 0:
            raise ValueError("Query charges must be non-negative")
        with self._lock:
            self._count += queries

    def merge(self, other: "QueryLedger") -> None:
        self.charge(other.oracle_queries)

    def __repr__(self) -> str:
        return f"QueryLedger(oracle_queries={self._count})"


class CountingOracle:
    """Evaluates a formula and charges one query per world"""

    def __init__(self, formula: CnfFormula, ledger: Optional[QueryLedger] = None):
        self.formula = formula
        self.ledger = ledger or QueryLedger()

    def __call__(self, x: Assignment) -> bool:
        self.ledger.charge()
        return evaluate(self.formula, x)

    def batch(self, bits: np.ndarray) -> np.ndarray:
        """Evaluate many worlds (rows of `bits`), one query each."""
        result = evaluate_batch(self.formula, bits)
        self.ledger.charge(int(result.shape[0]))
        return result
