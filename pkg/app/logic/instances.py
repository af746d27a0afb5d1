"""
Problem Instances
The sprinkler example, constant formulas and seeded random generators.
"""

from typing import Optional

import numpy as np

from app.logic.dimacs import parse_weighted_dimacs
from app.logic.formula import CnfFormula, Literal, WeightedFormula, satisfied_mask
from app.logic.weights import WeightTable

# Variables S, R, W: S -> W, R -> W, not (S and R)
SPRINKLER_DIMACS = """c sprinkler: 1 = S (sprinkler on), 2 = R (rain), 3 = W (wet grass)
p cnf 3 3
-1 3 0
-2 3 0
-1 -2 0
w 1 0.55
w 2 0.3
w 3 0.7
"""

SPRINKLER_MAP_QUERY = (0, 2)  # S and W


def sprinkler() -> WeightedFormula:
    return parse_weighted_dimacs(SPRINKLER_DIMACS)


def tautology(num_vars: int) -> CnfFormula:
    """No clauses: every world is a model."""
    return CnfFormula(num_vars=num_vars, clauses=())


def contradiction(num_vars: int = 1) -> CnfFormula:
    """X1 and not X1."""
    return CnfFormula(
        num_vars=num_vars,
        clauses=((Literal(0, True),), (Literal(0, False),)),
    )


def random_formula(
    num_vars: int,
    num_clauses: int,
    rng: np.random.Generator,
    max_width: int = 3,
) -> CnfFormula:
    """Random CNF with clause widths in [1, min(max_width, num_vars)]."""
    clauses = []
    for _ in range(num_clauses):
        width = int(rng.integers(1, min(max_width, num_vars) + 1))
        variables = rng.choice(num_vars, size=width, replace=False)
        signs = rng.integers(0, 2, size=width).astype(bool)
        clauses.append(tuple(Literal(int(v), bool(s)) for v, s in zip(variables, signs)))
    return CnfFormula(num_vars=num_vars, clauses=tuple(clauses))


def random_weight_table(
    num_vars: int, rng: np.random.Generator, normalized: bool = True
) -> WeightTable:
    """Random literal weights; probabilities kept away from 0 and 1."""
    probs = rng.uniform(0.05, 0.95, size=num_vars)
    if normalized:
        return WeightTable.from_probabilities(probs)
    scale = rng.uniform(0.5, 3.0, size=num_vars)
    return WeightTable(
        w_pos=tuple(float(v) for v in probs * scale),
        w_neg=tuple(float(v) for v in (1.0 - probs) * scale),
    )


def random_weighted_formula(
    num_vars: int,
    num_clauses: int,
    rng: np.random.Generator,
    max_width: int = 3,
    normalized: bool = True,
    satisfiable: Optional[bool] = None,
    attempts: int = 100,
) -> WeightedFormula:
    """
    Random weighted CNF.

    Args:
        satisfiable: If set, resample until the formula's satisfiability matches
    """
    for _ in range(attempts):
        formula = random_formula(num_vars, num_clauses, rng, max_width)
        if satisfiable is None or bool(satisfied_mask(formula).any()) == satisfiable:
            return WeightedFormula(formula=formula, weights=random_weight_table(num_vars, rng, normalized))
    raise RuntimeError(f"No formula with satisfiable={satisfiable} found in {attempts} attempts")
