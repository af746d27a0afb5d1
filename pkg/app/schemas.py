"""
Run Configuration and Reports
Pydantic models shared by the CLI and the HTTP API. The JSON schemas shipped
under schemas/ mirror model_json_schema() of the report models.
"""

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.algorithms.results import CountEstimate, WmcEstimate
from app.config import settings

Command = Literal[
    "wmc", "count", "sample", "mpe", "map", "repro-sprinkler",
    "baselines", "vote-table", "dump-circuit", "schema",
]
Method = Literal["all", "exact", "quantum", "classical"]
OutputFormat = Literal["json", "tsv"]
Gadget = Literal["oracle", "phase-oracle", "rot", "wg", "grover", "qft"]


# =============================================================================
# Configuration
# =============================================================================

class RunConfig(BaseModel):
    """One command invocation"""

    command: Command
    input_path: Optional[str] = Field(default=None, description="Weighted DIMACS file (sprinkler when omitted)")
    seed: int = Field(default_factory=lambda: settings.SEED, ge=0, lt=2**64)
    shots: int = Field(default_factory=lambda: settings.SHOTS, ge=1)
    t_bits: Optional[int] = Field(default=None, ge=1, description="Counting bits (default ceil(n/2)+5)")
    query: Optional[List[int]] = Field(default=None, description="1-based query variables")
    method: Method = "all"
    output_format: OutputFormat = Field(default_factory=lambda: settings.OUTPUT_FORMAT)
    out_dir: str = Field(default_factory=lambda: settings.OUT_DIR)
    qwmc_shots: Optional[int] = Field(default=None, ge=1, description="QWMC shots feeding the samplers")
    power_backend: Optional[Literal["matrix", "gates"]] = None
    samples: int = Field(default=100_000, ge=1, description="Classical estimator sample count s")
    trials: int = Field(default=1000, ge=1, description="Monte-Carlo trials per vote-table cell")
    gadget: Gadget = "wg"
    report: Optional[str] = Field(default=None, description="Report name for the schema command")

    @field_validator("query")
    @classmethod
    def _check_query(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is None:
            return value
        if not value:
            raise ValueError("Query variable list must not be empty")
        if any(v < 1 for v in value):
            raise ValueError("Query variables are 1-based positive integers")
        if len(set(value)) != len(value):
            raise ValueError("Query variables must be distinct")
        return value


# =============================================================================
# Reports
# =============================================================================

class ExactWmc(BaseModel):
    wmc: float = Field(..., description="Raw weighted model count")
    normalized_wmc: float
    model_count: int


class ClassicalEstimate(BaseModel):
    estimate: float = Field(..., description="Normalized WMC or model count estimate")
    raw_estimate: Optional[float] = Field(default=None, description="Raw WMC (estimate times the V product)")
    samples: int
    oracle_queries: int


class WmcReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    command: Literal["wmc"] = "wmc"
    instance: str
    num_vars: int
    num_clauses: int
    seed: int
    exact: Optional[ExactWmc] = None
    quantum: Optional[WmcEstimate] = None
    classical: Optional[ClassicalEstimate] = None
    oracle_queries: Dict[str, int] = Field(default_factory=dict, description="Per method")

    def to_tsv(self) -> str:
        rows = ["key\tvalue"]
        if self.exact is not None:
            rows += [f"exact_wmc\t{self.exact.wmc!r}", f"exact_normalized_wmc\t{self.exact.normalized_wmc!r}"]
        if self.quantum is not None:
            q = self.quantum
            rows += [
                f"qwmc_normalized\t{q.normalized_estimate!r}",
                f"qwmc_raw\t{q.raw_estimate!r}",
                f"qwmc_t\t{q.t}",
                f"qwmc_mode_y\t{q.measured_phase_integer}",
                f"qwmc_error_bound\t{q.error_bound!r}",
            ]
        if self.classical is not None:
            rows.append(f"classical_normalized\t{self.classical.estimate!r}")
        rows += [f"queries_{k}\t{v}" for k, v in self.oracle_queries.items()]
        return "\n".join(rows) + "\n"


class CountReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    command: Literal["count"] = "count"
    instance: str
    num_vars: int
    seed: int
    exact_model_count: Optional[int] = None
    quantum: Optional[CountEstimate] = None
    classical: Optional[ClassicalEstimate] = None
    oracle_queries: Dict[str, int] = Field(default_factory=dict)

    def to_tsv(self) -> str:
        rows = ["key\tvalue"]
        if self.exact_model_count is not None:
            rows.append(f"exact_model_count\t{self.exact_model_count}")
        if self.quantum is not None:
            rows.append(f"quantum_model_count\t{self.quantum.model_count}")
        if self.classical is not None:
            rows.append(f"classical_model_count\t{self.classical.estimate!r}")
        rows += [f"queries_{k}\t{v}" for k, v in self.oracle_queries.items()]
        return "\n".join(rows) + "\n"


def _histogram_tsv(counts: Dict[str, int]) -> str:
    total = sum(counts.values())
    rows = ["outcome\tcount\tfrequency"]
    rows += [f"{label}\t{count}\t{count / total:.6f}" for label, count in counts.items()]
    return "\n".join(rows) + "\n"


class SampleReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    command: Literal["sample"] = "sample"
    instance: str
    seed: int
    query: List[int] = Field(..., description="1-based query variables, leftmost bit first")
    shots: int
    successes: int
    success_rate: float
    iterations: int = Field(..., description="WG applications per shot")
    wmc_estimate: float
    histogram: Dict[str, int] = Field(..., description="All draws")
    successful_histogram: Dict[str, int] = Field(..., description="Draws that satisfied the formula")
    exact_distribution: Optional[Dict[str, float]] = None
    total_variation: Optional[float] = Field(default=None, description="Successful draws vs exact distribution")
    oracle_queries: int

    def to_tsv(self) -> str:
        return _histogram_tsv(self.histogram)


class VoteReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    command: Literal["mpe", "map"]
    instance: str
    seed: int
    query: List[int] = Field(..., description="1-based query variables, leftmost bit first")
    shots: int
    mode: str = Field(..., description="Most frequent successful outcome")
    successes: int
    iterations: int
    wmc_estimate: float
    histogram: Dict[str, int]
    exact_mode: Optional[str] = None
    exact_weight: Optional[float] = None
    oracle_queries: int

    def to_tsv(self) -> str:
        return _histogram_tsv(self.histogram)


class ReproReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    command: Literal["repro-sprinkler"] = "repro-sprinkler"
    seed: int
    shots: int
    t_bits: int
    files: List[str]
    wmc_mode_phase_integer: int
    wmc_mode_estimate: float
    exact_wmc: float
    mpe_mode: str
    map_query: List[int]
    map_mode: str
    oracle_queries: Dict[str, int]

    def to_tsv(self) -> str:
        rows = [
            "key\tvalue",
            f"wmc_mode_phase_integer\t{self.wmc_mode_phase_integer}",
            f"wmc_mode_estimate\t{self.wmc_mode_estimate!r}",
            f"exact_wmc\t{self.exact_wmc!r}",
            f"mpe_mode\t{self.mpe_mode}",
            f"map_mode\t{self.map_mode}",
        ]
        return "\n".join(rows) + "\n"


REPORT_MODELS = {
    "wmc": WmcReport,
    "count": CountReport,
    "sample": SampleReport,
    "vote": VoteReport,
    "repro-sprinkler": ReproReport,
}
