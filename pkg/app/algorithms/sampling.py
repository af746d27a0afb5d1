"""
Weighted Constrained Sampling
Sample query variables from P(q) proportional to the weight of the models
extending q: WG applied R times to Rot|0>, then a measurement.

The whole search register (x, x_{n+1}) is measured so that success is known:
a draw succeeded when phi'(x, x_{n+1}) holds. The outcome reported is the
restriction of x to the query variables, whose marginal is unaffected by
also measuring the rest.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.algorithms.counting import qwmc
from app.algorithms.results import SampleResult
from app.baselines.ledger import QueryLedger
from app.config import settings
from app.errors import UnsatisfiableError
from app.logic.assignment import Assignment, PartialAssignment
from app.logic.formula import WeightedFormula, query_masses, query_outcome_index
from app.logic.weights import w_min
from app.quantum.circuits import OracleSpec, apply_weighted_grover, prepare_rot_state, rot_state
from app.quantum.histogram import Histogram
from app.quantum.statevector import marginal_probabilities, sample_indices
from app.rng import SeedLike, make_rng

logger = logging.getLogger(__name__)


# =============================================================================
# Iteration counts
# =============================================================================

def rotation_angle(wmc_normalized: float) -> float:
    """theta = arcsin(sqrt(WMC/2)) in [0, pi/4]."""
    return math.asin(math.sqrt(wmc_normalized / 2.0))


def weighted_iterations(wmc_normalized: float) -> int:
    """R = floor(pi / (4 theta))."""
    if wmc_normalized <= 0:
        raise UnsatisfiableError("Normalized WMC is 0: the formula has no models to sample")
    return int(math.floor(math.pi / (4.0 * rotation_angle(wmc_normalized))))


def unknown_wmc_bound(wf: WeightedFormula) -> int:
    """m = floor(1/sqrt(W_min)) + 1."""
    minimum = w_min(wf.normalized())
    if minimum <= 0:
        raise ValueError("W_min is 0 (some weight is 0 or 1); the iteration bound is undefined")
    return int(math.floor(1.0 / math.sqrt(minimum))) + 1


def _check_query(query: Sequence[int], num_vars: int) -> Tuple[int, ...]:
    query = tuple(int(v) for v in query)
    if not query:
        raise ValueError("Query variable list must not be empty")
    if len(set(query)) != len(query):
        raise ValueError(f"Query variables repeat: {[v + 1 for v in query]}")
    for v in query:
        if not 0 <= v < num_vars:
            raise ValueError(f"Query variable {v + 1} out of range (n={num_vars})")
    return query


def _label(outcome: int, width: int) -> str:
    return "".join(str((outcome >> i) & 1) for i in range(width))


# =============================================================================
# Batched sampler
# =============================================================================

@dataclass(frozen=True, eq=False)
class SampleBatch:
    """Many draws at one iteration count"""

    query: Tuple[int, ...]
    outcomes: np.ndarray
    succeeded: np.ndarray
    iterations: int
    oracle_queries: int

    @property
    def shots(self) -> int:
        return int(self.outcomes.size)

    @property
    def success_rate(self) -> float:
        return float(self.succeeded.mean()) if self.shots else 0.0

    def histogram(self, successful_only: bool = False) -> Histogram:
        outcomes = self.outcomes[self.succeeded] if successful_only else self.outcomes
        counts = np.bincount(outcomes, minlength=1 << len(self.query))
        return Histogram.from_counts(counts, len(self.query))


class QwcsSampler:
    """
    Draws query outcomes after R applications of WG.

    The register distribution is computed once per R and reused for every
    shot. When the normalized WMC (exact or estimated) is given, R defaults to
    floor(pi / (4 theta)).
    """

    def __init__(
        self,
        wf: WeightedFormula,
        query: Sequence[int],
        wmc_normalized: Optional[float] = None,
    ):
        self.wf = wf
        self.query = _check_query(query, wf.num_vars)
        self.nw = wf.normalized()
        self.spec = OracleSpec(formula=wf.formula, extra_qubit=True)
        self.wmc_normalized = None if wmc_normalized is None else self._clamp(wmc_normalized)
        self._phi = rot_state(self.nw, wf.num_vars, with_extra=True)
        self._distributions: Dict[int, np.ndarray] = {}
        self._outcome = query_outcome_index(wf.num_vars + 1, self.query)
        self._success = self.spec.phase_mask()

    @staticmethod
    def _clamp(wmc_normalized: float) -> float:
        if wmc_normalized <= 0:
            raise UnsatisfiableError("Normalized WMC is 0: the formula has no models to sample")
        if wmc_normalized > 1.0:
            logger.warning(f"Normalized WMC estimate {wmc_normalized:.6f} exceeds 1; clamping to 1")
            return 1.0
        return wmc_normalized

    @property
    def iterations(self) -> int:
        if self.wmc_normalized is None:
            raise ValueError("No WMC given; pass an explicit iteration count")
        return weighted_iterations(self.wmc_normalized)

    def state_after(self, iterations: int):
        """WG^R Rot|0> over the n+1 search qubits."""
        state = prepare_rot_state(self.nw, self.spec)
        return apply_weighted_grover(state, self.nw, self.spec, phi=self._phi, iterations=iterations)

    def register_distribution(self, iterations: int) -> np.ndarray:
        if iterations not in self._distributions:
            probs = self.state_after(iterations).probabilities()
            probs.setflags(write=False)
            self._distributions[iterations] = probs
        return self._distributions[iterations]

    def success_probability(self, iterations: int) -> float:
        return float(self.register_distribution(iterations)[self._success].sum())

    def query_marginal(self, iterations: int) -> np.ndarray:
        """Q-marginal of the post-WG^R state (bit i of the outcome is query[i])."""
        return marginal_probabilities(self.state_after(iterations), self.query).probabilities

    def draw(self, rng: np.random.Generator, shots: int, iterations: Optional[int] = None) -> SampleBatch:
        """
        Draw `shots` independent outcomes, shot i from its own derived stream.

        Each shot charges R oracle queries (one per WG application).
        """
        if shots < 1:
            raise ValueError(f"shots must be positive, got {shots}")
        iterations = self.iterations if iterations is None else iterations
        probs = self.register_distribution(iterations)
        indices = sample_indices(probs, rng, shots)
        return SampleBatch(
            query=self.query,
            outcomes=self._outcome[indices],
            succeeded=self._success[indices],
            iterations=iterations,
            oracle_queries=iterations * shots,
        )

    def draw_one(
        self, rng: np.random.Generator, iterations: Optional[int] = None, extra_queries: int = 0
    ) -> SampleResult:
        batch = self.draw(rng, 1, iterations)
        outcome = int(batch.outcomes[0])
        return SampleResult(
            query=self.query,
            outcome=outcome,
            bits=_label(outcome, len(self.query)),
            succeeded=bool(batch.succeeded[0]),
            iterations=batch.iterations,
            oracle_queries=batch.oracle_queries + extra_queries,
            wmc_estimate=self.wmc_normalized,
        )


# =============================================================================
# Single-draw procedures
# =============================================================================

def qwcs_known_wmc(
    wf: WeightedFormula,
    query: Sequence[int],
    wmc_normalized: float,
    rng: SeedLike = None,
    ledger: Optional[QueryLedger] = None,
) -> SampleResult:
    """
    Weighted constrained sampling with a known normalized WMC.

    Args:
        wf: Weighted formula
        query: Query variables (0-based), outcome bit i is query[i]
        wmc_normalized: Normalized WMC in (0, 1]; larger estimates are clamped
        rng: Generator or seed
        ledger: Optional query counter

    Raises:
        UnsatisfiableError: wmc_normalized is 0
    """
    sampler = QwcsSampler(wf, query, wmc_normalized)
    result = sampler.draw_one(make_rng(rng))
    if ledger is not None:
        ledger.charge(result.oracle_queries)
    return result


def qwcs_unknown_wmc(
    wf: WeightedFormula,
    query: Sequence[int],
    rng: SeedLike = None,
    ledger: Optional[QueryLedger] = None,
) -> SampleResult:
    """
    Weighted constrained sampling without the WMC: R uniform in [0, m-1] with
    m = floor(1/sqrt(W_min)) + 1, using the weighted operators Rot and WG.
    """
    rng = make_rng(rng)
    m = unknown_wmc_bound(wf)
    iterations = int(rng.integers(m))
    logger.debug(f"Unknown-WMC sampling: m={m}, R={iterations}")
    result = QwcsSampler(wf, query).draw_one(rng, iterations)
    if ledger is not None:
        ledger.charge(result.oracle_queries)
    return result


def qwcs_full(
    wf: WeightedFormula,
    query: Sequence[int],
    rng: SeedLike = None,
    t: Optional[int] = None,
    qwmc_shots: Optional[int] = None,
    backend: Optional[str] = None,
    ledger: Optional[QueryLedger] = None,
) -> SampleResult:
    """
    QWCS: estimate the WMC with QWMC, then sample with that estimate.

    Raises:
        UnsatisfiableError: the QWMC estimate is 0
    """
    rng = make_rng(rng)
    shots = settings.QWMC_SHOTS if qwmc_shots is None else qwmc_shots
    estimate = qwmc(wf, t=t, shots=shots, rng=rng, backend=backend)
    if estimate.normalized_estimate <= 0:
        raise UnsatisfiableError("QWMC estimate is 0: the formula appears unsatisfiable")
    sampler = QwcsSampler(wf, query, estimate.normalized_estimate)
    result = sampler.draw_one(rng, extra_queries=estimate.oracle_queries)
    if ledger is not None:
        ledger.charge(result.oracle_queries)
    return result


# =============================================================================
# Repeat and vote
# =============================================================================

class VoteResult(BaseModel):
    """Modal outcome of repeated sampling, failed draws filtered out"""

    model_config = ConfigDict(frozen=True)

    query: Tuple[int, ...]
    assignment: Union[Assignment, PartialAssignment]
    bits: str = Field(..., description="Modal outcome, query[0] leftmost")
    histogram: Histogram = Field(..., description="Successful draws over the query")
    shots: int = Field(..., ge=1)
    successes: int = Field(..., ge=0)
    iterations: int = Field(..., ge=0)
    oracle_queries: int = Field(..., ge=0)
    wmc_estimate: float = Field(..., description="Normalized WMC used to pick R")
    wmc_exact_given: bool = Field(default=False, description="Whether the WMC was supplied rather than estimated")


def modal_label(histogram: Histogram) -> str:
    """Most frequent label; ties go to the smaller label read as binary."""
    if not histogram.counts:
        raise ValueError("Mode of an empty histogram")
    labels = histogram.labelled_counts()
    return min(labels, key=lambda label: (-labels[label], label))


def _vote(
    wf: WeightedFormula,
    query: Sequence[int],
    shots: int,
    rng: SeedLike,
    wmc_normalized: Optional[float],
    t: Optional[int],
    qwmc_shots: Optional[int],
    backend: Optional[str],
) -> Tuple[str, SampleBatch, float, int]:
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    rng = make_rng(rng)
    extra = 0
    if wmc_normalized is None:
        estimate = qwmc(wf, t=t, shots=qwmc_shots or shots, rng=rng, backend=backend)
        if estimate.normalized_estimate <= 0:
            raise UnsatisfiableError("QWMC estimate is 0: the formula appears unsatisfiable")
        wmc_normalized = estimate.normalized_estimate
        extra = estimate.oracle_queries

    sampler = QwcsSampler(wf, query, wmc_normalized)
    batch = sampler.draw(rng, shots)
    successful = batch.histogram(successful_only=True)
    if successful.total == 0:
        raise UnsatisfiableError(f"None of {shots} draws satisfied the formula")
    logger.info(
        f"Vote over {shots} shots: R={batch.iterations}, success rate {batch.success_rate:.3f}"
    )
    return modal_label(successful), batch, sampler.wmc_normalized, extra


def vote_mpe(
    wf: WeightedFormula,
    shots: int,
    rng: SeedLike = None,
    wmc_normalized: Optional[float] = None,
    t: Optional[int] = None,
    qwmc_shots: Optional[int] = None,
    backend: Optional[str] = None,
) -> VoteResult:
    """
    MPE by repeated sampling over every variable.

    Without `wmc_normalized` the WMC is first estimated by QWMC.
    """
    query = tuple(range(wf.num_vars))
    label, batch, wmc, extra = _vote(wf, query, shots, rng, wmc_normalized, t, qwmc_shots, backend)
    return VoteResult(
        query=query,
        assignment=Assignment.from_string(label),
        bits=label,
        histogram=batch.histogram(successful_only=True),
        shots=shots,
        successes=int(batch.succeeded.sum()),
        iterations=batch.iterations,
        oracle_queries=batch.oracle_queries + extra,
        wmc_estimate=wmc,
        wmc_exact_given=wmc_normalized is not None,
    )


def vote_map(
    wf: WeightedFormula,
    query: Sequence[int],
    shots: int,
    rng: SeedLike = None,
    wmc_normalized: Optional[float] = None,
    t: Optional[int] = None,
    qwmc_shots: Optional[int] = None,
    backend: Optional[str] = None,
) -> VoteResult:
    """MAP over the query variables by repeated sampling."""
    query = _check_query(query, wf.num_vars)
    label, batch, wmc, extra = _vote(wf, query, shots, rng, wmc_normalized, t, qwmc_shots, backend)
    return VoteResult(
        query=query,
        assignment=PartialAssignment(query, tuple(ch == "1" for ch in label)),
        bits=label,
        histogram=batch.histogram(successful_only=True),
        shots=shots,
        successes=int(batch.succeeded.sum()),
        iterations=batch.iterations,
        oracle_queries=batch.oracle_queries + extra,
        wmc_estimate=wmc,
        wmc_exact_given=wmc_normalized is not None,
    )


# =============================================================================
# Closed forms
# =============================================================================

@dataclass(frozen=True, eq=False)
class MarginalClosedForm:
    """
    Q-marginal after k WG applications split into its pieces.

    p1 comes from the solution component sin((2k+1)theta)|delta>, p4 from
    cos((2k+1)theta)|gamma>; p2 and p3 are the cross terms.
    """

    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    p4: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.p1 + self.p2 + self.p3 + self.p4


def marginal_closed_form(wf: WeightedFormula, query: Sequence[int], k: int) -> MarginalClosedForm:
    """
    Brute-force closed forms for the query marginal after k WG applications.

    p1(q) = sin^2((2k+1)theta) * sat(q) / WMC
    p4(q) = cos^2((2k+1)theta) * (total(q) + unsat(q)) / (2 - WMC)
    where sat, unsat and total sum normalized world weights extending q.
    """
    query = _check_query(query, wf.num_vars)
    sat, total = query_masses(wf, query)
    wmc = float(sat.sum())
    if wmc <= 0:
        raise UnsatisfiableError("Closed forms need a satisfiable formula")
    theta = rotation_angle(min(wmc, 1.0))
    s, c = math.sin((2 * k + 1) * theta), math.cos((2 * k + 1) * theta)
    p1 = s * s * sat / wmc
    p4 = c * c * (total + (total - sat)) / (2.0 - wmc)

    # cross terms from the explicit |delta> and |gamma> vectors
    spec = OracleSpec(formula=wf.formula, extra_qubit=True)
    phi = rot_state(wf.normalized(), wf.num_vars, with_extra=True)
    mask = spec.phase_mask()
    delta = np.where(mask, phi, 0.0)
    gamma = np.where(mask, 0.0, phi)
    delta /= np.linalg.norm(delta)
    gamma_norm = np.linalg.norm(gamma)
    if gamma_norm > 0:
        gamma /= gamma_norm
    outcome = query_outcome_index(wf.num_vars + 1, query)
    cross = np.bincount(outcome, weights=s * c * delta * gamma, minlength=1 << len(query))
    return MarginalClosedForm(p1=p1, p2=cross, p3=cross.copy(), p4=p4)
