"""
Algorithm Results
Pydantic records returned by the counting and sampling procedures.
"""

from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from app.logic.assignment import Assignment
from app.quantum.histogram import Histogram


class WmcEstimate(BaseModel):
    """QWMC point estimate from the mode of the phase histogram"""

    model_config = ConfigDict(frozen=True)

    normalized_estimate: float = Field(..., ge=0, le=2, description="2 sin^2(pi y / 2^t)")
    raw_estimate: float = Field(..., ge=0, description="normalized_estimate times the V product")
    v_product: float = Field(..., gt=0, description="Product of w(X_i) + w(not X_i)")
    t: int = Field(..., ge=1, description="Counting bits")
    m: int = Field(..., description="Bits of accuracy t - 3 (failure probability 1/12)")
    error_bound: float = Field(..., gt=0, description="2^(-n/2 - 1/2)")
    measured_phase_integer: int = Field(..., ge=0, description="Mode y of the counting register")
    shots: int = Field(..., ge=1)
    oracle_queries: int = Field(..., ge=0, description="Controlled WG applications, 2^t - 1")
    backend: str = Field(default="matrix", description="Controlled-power backend")
    histogram: Histogram

    @property
    def phase(self) -> float:
        return self.measured_phase_integer / float(1 << self.t)


class CountEstimate(BaseModel):
    """Quantum counting result: M estimate from the uniform-weight QWMC"""

    model_config = ConfigDict(frozen=True)

    model_count: int = Field(..., ge=0, description="round(N * normalized estimate)")
    wmc: WmcEstimate


class SampleResult(BaseModel):
    """One weighted constrained sampling draw over the query variables"""

    model_config = ConfigDict(frozen=True)

    query: Tuple[int, ...] = Field(..., description="0-based query variables, measurement order")
    outcome: int = Field(..., ge=0, description="Bit i is the value of query[i]")
    bits: str = Field(..., description="Outcome label, query[0] leftmost")
    succeeded: Optional[bool] = Field(
        default=None, description="Whether the measured world satisfies phi' (None when unknown)"
    )
    iterations: int = Field(..., ge=0, description="WG applications R")
    oracle_queries: int = Field(..., ge=0, description="Oracle queries including any QWMC run")
    wmc_estimate: Optional[float] = Field(default=None, description="Normalized WMC used to pick R")


class SearchResult(BaseModel):
    """One Grover search run: the measured world and whether it is a model"""

    model_config = ConfigDict(frozen=True)

    assignment: Assignment = Field(..., description="Measured world (n bits, or n+1 with the extra qubit)")
    satisfied: bool = Field(..., description="Whether the world satisfies phi (phi' for the extra-qubit search)")
    iterations: int = Field(..., ge=0, description="Grover iterations R run before measuring")
    oracle_queries: int = Field(..., ge=0)
