"""
CNF Formulas and the Exact Oracle
Representation and evaluation of propositional CNF formulas, plus brute-force
model enumeration, WMC, MPE and MAP that every quantum result is checked against.
"""

import logging
from functools import lru_cache
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.config import settings
from app.errors import EnumerationLimitError, UnsatisfiableError
from app.logic.assignment import Assignment, PartialAssignment
from app.logic.weights import WeightTable, normalize, world_weight, world_weights_array

logger = logging.getLogger(__name__)

# Worlds evaluated per vectorized block during enumeration
_ENUMERATION_BLOCK = 1 << 16


class Literal(NamedTuple):
    """Variable index (0-based) with its polarity"""
    var: int
    positive: bool

    @classmethod
    def from_dimacs(cls, value: int) -> "Literal":
        if value == 0:
            raise ValueError("0 is not a literal")
        return cls(abs(value) - 1, value > 0)

    def to_dimacs(self) -> int:
        return self.var + 1 if self.positive else -(self.var + 1)


class CnfFormula(BaseModel):
    """Conjunction of clauses over num_vars Boolean variables"""

    model_config = ConfigDict(frozen=True)

    num_vars: int = Field(..., gt=0, description="Number of variables n")
    clauses: Tuple[Tuple[Literal, ...], ...] = Field(default=(), description="Clauses in file order")

    @model_validator(mode="after")
    def _check(self) -> "CnfFormula":
        for c, clause in enumerate(self.clauses):
            if not clause:
                raise ValueError(f"Clause {c + 1} is empty")
            for lit in clause:
                if not 0 <= lit.var < self.num_vars:
                    raise ValueError(
                        f"Variable {lit.var + 1} out of range in clause {c + 1} (n={self.num_vars})"
                    )
        return self

    @classmethod
    def from_dimacs_clauses(cls, num_vars: int, clauses: Iterable[Iterable[int]]) -> "CnfFormula":
        """Build from signed 1-based DIMACS literals, e.g. [[-1, 3], [-2, 3]]."""
        return cls(
            num_vars=num_vars,
            clauses=tuple(tuple(Literal.from_dimacs(v) for v in clause) for clause in clauses),
        )

    def dimacs_clauses(self) -> List[List[int]]:
        return [[lit.to_dimacs() for lit in clause] for clause in self.clauses]

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)


class WeightedFormula(BaseModel):
    """A problem instance: CNF formula plus literal weights"""

    model_config = ConfigDict(frozen=True)

    formula: CnfFormula
    weights: WeightTable

    @model_validator(mode="after")
    def _check(self) -> "WeightedFormula":
        if self.weights.num_vars != self.formula.num_vars:
            raise ValueError(
                f"Weight table covers {self.weights.num_vars} variables, formula has {self.formula.num_vars}"
            )
        return self

    @classmethod
    def unweighted(cls, formula: CnfFormula) -> "WeightedFormula":
        return cls(formula=formula, weights=WeightTable.uniform(formula.num_vars))

    @property
    def num_vars(self) -> int:
        return self.formula.num_vars

    def normalized(self):
        return normalize(self.weights)


class ExactSolution(BaseModel):
    """Exact answers computed by full enumeration"""

    model_config = ConfigDict(frozen=True)

    wmc: float = Field(..., ge=0, description="Raw weighted model count")
    normalized_wmc: float = Field(..., ge=0, description="WMC under normalized weights")
    model_count: int = Field(..., ge=0, description="Number of models M")
    mpe_assignment: Optional[Assignment] = None
    mpe_weight: float = 0.0
    map_query: Tuple[int, ...] = ()
    map_assignment: Optional[PartialAssignment] = None
    map_weight: float = 0.0


# =============================================================================
# Evaluation
# =============================================================================

def evaluate(formula: CnfFormula, x: Assignment) -> bool:
    """True iff every clause contains a satisfied literal."""
    if len(x) != formula.num_vars:
        raise ValueError(f"Assignment has {len(x)} values, formula has {formula.num_vars} variables")
    bits = x.bits
    return all(any(bits[lit.var] == lit.positive for lit in clause) for clause in formula.clauses)


@lru_cache(maxsize=256)
def _clause_arrays(formula: CnfFormula) -> Tuple[Tuple[np.ndarray, np.ndarray], ...]:
    arrays = []
    for clause in formula.clauses:
        pos = np.array(sorted({lit.var for lit in clause if lit.positive}), dtype=np.intp)
        neg = np.array(sorted({lit.var for lit in clause if not lit.positive}), dtype=np.intp)
        arrays.append((pos, neg))
    return tuple(arrays)


def evaluate_batch(formula: CnfFormula, bits: np.ndarray) -> np.ndarray:
    """
    Evaluate the formula on many worlds at once.

    Args:
        formula: CNF formula
        bits: Boolean array of shape (s, n), one world per row

    Returns:
        Boolean array of shape (s,)
    """
    bits = np.asarray(bits, dtype=bool)
    if bits.ndim != 2 or bits.shape[1] != formula.num_vars:
        raise ValueError(f"Expected worlds of shape (s, {formula.num_vars}), got {bits.shape}")
    result = np.ones(bits.shape[0], dtype=bool)
    for pos, neg in _clause_arrays(formula):
        clause_value = np.zeros(bits.shape[0], dtype=bool)
        if pos.size:
            clause_value |= bits[:, pos].any(axis=1)
        if neg.size:
            clause_value |= (~bits[:, neg]).any(axis=1)
        result &= clause_value
    return result


def index_bits(num_bits: int, indices: np.ndarray) -> np.ndarray:
    """Boolean matrix whose row r holds the bits of indices[r] (column i = bit i)."""
    shifts = np.arange(num_bits, dtype=np.int64)
    return ((np.asarray(indices, dtype=np.int64)[:, None] >> shifts) & 1).astype(bool)


@lru_cache(maxsize=64)
def satisfied_mask(formula: CnfFormula, extra_qubit: bool = False) -> np.ndarray:
    """
    phi (or phi' = phi AND X_{n+1}) over every qubit basis index.

    Variable i is bit i of the index; with extra_qubit the extra variable is bit n.
    """
    n = formula.num_vars
    limit = settings.MAX_QUBITS
    if n + int(extra_qubit) > limit:
        raise EnumerationLimitError(f"Cannot tabulate {n} variables (qubit cap {limit})")
    mask = evaluate_batch(formula, index_bits(n, np.arange(1 << n)))
    if extra_qubit:
        mask = np.concatenate([np.zeros_like(mask), mask])
    mask.setflags(write=False)
    return mask


# =============================================================================
# Exact oracle
# =============================================================================

def _check_limit(num_vars: int, limit: Optional[int]) -> None:
    limit = settings.ENUMERATION_LIMIT if limit is None else limit
    if num_vars > limit:
        raise EnumerationLimitError(
            f"Formula has {num_vars} variables, enumeration limit is {limit}"
        )


def enumerate_models(formula: CnfFormula, limit: Optional[int] = None) -> List[Assignment]:
    """
    All models in ascending binary order (X1 most significant).

    Args:
        formula: CNF formula
        limit: Maximum number of variables (default from settings)

    Returns:
        List of satisfying assignments, length M
    """
    n = formula.num_vars
    _check_limit(n, limit)
    total = 1 << n
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    models: List[Assignment] = []
    for start in range(0, total, _ENUMERATION_BLOCK):
        ranks = np.arange(start, min(start + _ENUMERATION_BLOCK, total), dtype=np.int64)
        bits = ((ranks[:, None] >> shifts) & 1).astype(bool)
        for row in bits[evaluate_batch(formula, bits)]:
            models.append(Assignment(tuple(bool(b) for b in row)))
    return models


def exact_normalized_wmc(wf: WeightedFormula, limit: Optional[int] = None) -> float:
    """Sum of normalized world weights over the models, in enumeration order."""
    nw = wf.normalized()
    total = 0.0
    for x in enumerate_models(wf.formula, limit):
        total += world_weight(nw, x)
    return total


def exact_wmc(wf: WeightedFormula, limit: Optional[int] = None) -> float:
    """Raw WMC: normalized count times the product of V_i."""
    return exact_normalized_wmc(wf, limit) * wf.normalized().v_product


def exact_mpe(wf: WeightedFormula, limit: Optional[int] = None) -> Tuple[Assignment, float]:
    """
    Maximum-weight model and its raw weight.

    Ties go to the smallest assignment read as a binary number (X1 first).
    """
    nw = wf.normalized()
    best: Optional[Assignment] = None
    best_weight = -1.0
    # models arrive in ascending rank, so strict > keeps the smallest on ties
    for x in enumerate_models(wf.formula, limit):
        weight = world_weight(nw, x)
        if weight > best_weight:
            best, best_weight = x, weight
    if best is None:
        raise UnsatisfiableError("MPE is undefined for an unsatisfiable formula")
    return best, best_weight * nw.v_product


def _normalize_query(query: Iterable[int], num_vars: int) -> Tuple[int, ...]:
    variables = tuple(sorted(set(int(v) for v in query)))
    for v in variables:
        if not 0 <= v < num_vars:
            raise ValueError(f"Query variable {v + 1} out of range (n={num_vars})")
    return variables


def exact_map(
    wf: WeightedFormula, query: Iterable[int], limit: Optional[int] = None
) -> Tuple[PartialAssignment, float]:
    """
    Most probable configuration of the query variables, summing over extensions.

    Args:
        wf: Weighted formula
        query: 0-based query variable indices

    Returns:
        (partial assignment in ascending variable order, raw summed weight)
    """
    nw = wf.normalized()
    variables = _normalize_query(query, wf.num_vars)
    sums: Dict[Tuple[bool, ...], float] = {}
    for x in enumerate_models(wf.formula, limit):
        key = tuple(x.bits[v] for v in variables)
        sums[key] = sums.get(key, 0.0) + world_weight(nw, x)
    if not sums:
        raise UnsatisfiableError("MAP is undefined for an unsatisfiable formula")

    best_key = min(sums, key=lambda k: (-sums[k], PartialAssignment(variables, k).rank))
    return PartialAssignment(variables, best_key), sums[best_key] * nw.v_product


def exact_solve(
    wf: WeightedFormula, query: Optional[Sequence[int]] = None, limit: Optional[int] = None
) -> ExactSolution:
    """Bundle WMC, M, MPE and MAP for one instance (all zero when unsatisfiable)."""
    models = enumerate_models(wf.formula, limit)
    normalized_wmc = exact_normalized_wmc(wf, limit)
    wmc = normalized_wmc * wf.normalized().v_product
    variables = _normalize_query(query if query is not None else range(wf.num_vars), wf.num_vars)
    if not models:
        logger.info("Formula is unsatisfiable; exact solution is empty")
        return ExactSolution(wmc=0.0, normalized_wmc=0.0, model_count=0, map_query=variables)

    mpe_assignment, mpe_weight = exact_mpe(wf, limit)
    map_assignment, map_weight = exact_map(wf, variables, limit)
    return ExactSolution(
        wmc=wmc,
        normalized_wmc=normalized_wmc,
        model_count=len(models),
        mpe_assignment=mpe_assignment,
        mpe_weight=mpe_weight,
        map_query=variables,
        map_assignment=map_assignment,
        map_weight=map_weight,
    )


# =============================================================================
# Query-variable distributions
# =============================================================================

def query_outcome_index(num_bits: int, query: Sequence[int]) -> np.ndarray:
    """For every basis index, the outcome integer over `query` (bit i is query[i])."""
    indices = np.arange(1 << num_bits, dtype=np.int64)
    outcome = np.zeros_like(indices)
    for i, q in enumerate(query):
        outcome |= ((indices >> q) & 1) << i
    return outcome


def query_masses(wf: WeightedFormula, query: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Normalized weight mass per query outcome.

    Returns:
        (satisfying mass per q, total mass per q); outcome bit i is query[i]
    """
    n = wf.num_vars
    _check_limit(n, None)
    weights = world_weights_array(wf.normalized())
    mask = satisfied_mask(wf.formula)
    outcome = query_outcome_index(n, query)
    size = 1 << len(query)
    sat = np.bincount(outcome, weights=np.where(mask, weights, 0.0), minlength=size)
    total = np.bincount(outcome, weights=weights, minlength=size)
    return sat, total


def conditional_query_distribution(wf: WeightedFormula, query: Sequence[int]) -> np.ndarray:
    """P(q) proportional to the summed weight of the models extending q."""
    sat, _ = query_masses(wf, query)
    mass = sat.sum()
    if mass <= 0:
        raise UnsatisfiableError("Conditional distribution undefined for an unsatisfiable formula")
    return sat / mass
