"""
Literal Weights
Raw literal weight tables, their normalization to probabilities, world weights
and the quantities derived from them (V_i products, W_min, R_y angles).
"""

import math
from functools import reduce
from typing import Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.logic.assignment import Assignment


class WeightTable(BaseModel):
    """Raw weights w(X_i) and w(not X_i) per variable"""

    model_config = ConfigDict(frozen=True)

    w_pos: Tuple[float, ...] = Field(..., description="w(X_i) per variable")
    w_neg: Tuple[float, ...] = Field(..., description="w(not X_i) per variable")

    @model_validator(mode="after")
    def _check(self) -> "WeightTable":
        if len(self.w_pos) != len(self.w_neg):
            raise ValueError("w_pos and w_neg must have the same length")
        for i, (wp, wn) in enumerate(zip(self.w_pos, self.w_neg)):
            if wp < 0 or wn < 0 or math.isnan(wp) or math.isnan(wn):
                raise ValueError(f"Negative weight for variable {i + 1}")
            if wp + wn <= 0:
                raise ValueError(f"Weights of variable {i + 1} sum to zero")
        return self

    @classmethod
    def uniform(cls, num_vars: int) -> "WeightTable":
        return cls(w_pos=(0.5,) * num_vars, w_neg=(0.5,) * num_vars)

    @classmethod
    def from_probabilities(cls, probs: Sequence[float]) -> "WeightTable":
        probs = tuple(float(p) for p in probs)
        return cls(w_pos=probs, w_neg=tuple(1.0 - p for p in probs))

    @property
    def num_vars(self) -> int:
        return len(self.w_pos)


class NormalizedWeights(BaseModel):
    """Normalized literal probabilities with their rotation angles"""

    model_config = ConfigDict(frozen=True)

    p: Tuple[float, ...] = Field(..., description="normalized w(X_i) in [0, 1]")
    v_product: float = Field(..., gt=0, description="product of V_i = w(X_i) + w(not X_i)")
    theta: Tuple[float, ...] = Field(..., description="R_y angle 2*arcsin(sqrt(p_i)) in [0, pi]")

    @property
    def num_vars(self) -> int:
        return len(self.p)


def normalize(wt: WeightTable) -> NormalizedWeights:
    """
    Normalize raw literal weights.

    Args:
        wt: Raw weight table

    Returns:
        NormalizedWeights with p_i = w_pos/(w_pos+w_neg), the V product and angles
    """
    probs = []
    totals = []
    for wp, wn in zip(wt.w_pos, wt.w_neg):
        total = wp + wn
        if total <= 0:
            raise ValueError("Cannot normalize a variable whose weights sum to zero")
        totals.append(total)
        probs.append(wp if total == 1.0 else wp / total)

    v_product = reduce(lambda acc, v: acc * v, totals, 1.0)
    theta = tuple(2.0 * math.asin(math.sqrt(min(max(p, 0.0), 1.0))) for p in probs)
    return NormalizedWeights(p=tuple(probs), v_product=v_product, theta=theta)


def world_weight(nw: NormalizedWeights, x: Assignment) -> float:
    """
    Normalized weight of a world: product of p_i (x_i = 1) or 1 - p_i (x_i = 0).

    The raw weight is this value times nw.v_product.
    """
    if len(x) != nw.num_vars:
        raise ValueError(f"Assignment has {len(x)} values, expected {nw.num_vars}")
    weight = 1.0
    for p, bit in zip(nw.p, x.bits):
        weight *= p if bit else 1.0 - p
    return weight


def world_weights_array(nw: NormalizedWeights) -> np.ndarray:
    """World weights for every qubit basis index (variable i is bit i)."""
    weights = np.ones(1, dtype=np.float64)
    for p in nw.p:
        # new variable becomes the most significant bit so far
        weights = np.concatenate([weights * (1.0 - p), weights * p])
    return weights


def w_min(nw: NormalizedWeights) -> float:
    """
    Minimum configuration weight including the extra qubit's factor 1/2.

    Returns 0 when some p_i is 0 or 1.
    """
    value = 0.5
    for p in nw.p:
        value *= min(p, 1.0 - p)
    return value
