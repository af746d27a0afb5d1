"""
Comparison Reports
Rows for the classical-vs-quantum query/error comparison and the vote study,
written as CSV `method,instance,param,estimate,queries,seed`.
"""

import csv
import io
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict, Field

from app.algorithms.counting import default_t_bits, qwmc, quantum_count
from app.baselines.classical import (
    classical_count_estimate,
    classical_wmc_estimate,
    vote_event_grid_defaults,
    vote_event_probability,
)
from app.baselines.ledger import QueryLedger
from app.logic.formula import WeightedFormula, exact_normalized_wmc, satisfied_mask
from app.rng import seed_of, spawn_rngs

logger = logging.getLogger(__name__)

CSV_FIELDS = ("method", "instance", "param", "estimate", "queries", "seed")


class BaselineRow(BaseModel):
    """One estimator run"""

    model_config = ConfigDict(frozen=True)

    method: str = Field(..., description="exact, classical_wmc, qwmc, classical_count or quantum_count")
    instance: str
    param: str = Field(..., description="s=<samples> or t=<bits>, or the vote cell")
    estimate: float
    queries: int = Field(..., ge=0)
    seed: int


def complexity_curve(
    wf: WeightedFormula,
    t_values: Optional[Sequence[int]] = None,
    s_values: Sequence[int] = (10, 100, 1000, 10000, 100000),
    seed: Optional[int] = None,
    instance: str = "instance",
    shots: int = 1,
) -> List[BaselineRow]:
    """
    Normalized-WMC estimates with their query counts.

    Classical rows use s Bernoulli-weighted samples (s queries); QWMC rows use
    t counting bits (2^t - 1 queries). The first row is the exact value.

    Args:
        wf: Weighted formula
        t_values: Counting bits (default 2..ceil(n/2)+5)
        s_values: Classical sample sizes
        seed: Run seed; every row draws from its own child stream
        shots: QWMC shots per row
    """
    seed = seed_of(seed)
    n = wf.num_vars
    t_values = tuple(t_values) if t_values else tuple(range(2, default_t_bits(n) + 1))
    rngs = spawn_rngs(seed, len(s_values) + len(t_values))

    rows = [
        BaselineRow(
            method="exact",
            instance=instance,
            param=f"n={n}",
            estimate=exact_normalized_wmc(wf),
            queries=1 << n,
            seed=seed,
        )
    ]
    for s, rng in zip(s_values, rngs):
        ledger = QueryLedger()
        estimate = classical_wmc_estimate(wf, s, rng, ledger)
        rows.append(BaselineRow(
            method="classical_wmc", instance=instance, param=f"s={s}",
            estimate=estimate, queries=ledger.oracle_queries, seed=seed,
        ))
    for t, rng in zip(t_values, rngs[len(s_values):]):
        ledger = QueryLedger()
        estimate = qwmc(wf, t=t, shots=shots, rng=rng, ledger=ledger)
        rows.append(BaselineRow(
            method="qwmc", instance=instance, param=f"t={t}",
            estimate=estimate.normalized_estimate, queries=ledger.oracle_queries, seed=seed,
        ))
    logger.info(f"Complexity curve for {instance}: {len(rows)} rows")
    return rows


def counting_curve(
    wf: WeightedFormula,
    t_values: Optional[Sequence[int]] = None,
    s_values: Sequence[int] = (10, 100, 1000, 10000),
    seed: Optional[int] = None,
    instance: str = "instance",
    shots: int = 1,
) -> List[BaselineRow]:
    """Model-count estimates (classical uniform sampling vs quantum counting)."""
    seed = seed_of(seed)
    formula = wf.formula
    n = formula.num_vars
    t_values = tuple(t_values) if t_values else tuple(range(2, default_t_bits(n) + 1))
    rngs = spawn_rngs(seed, len(s_values) + len(t_values))

    rows = [
        BaselineRow(
            method="exact_count", instance=instance, param=f"n={n}",
            estimate=float(satisfied_mask(formula).sum()), queries=1 << n, seed=seed,
        )
    ]
    for s, rng in zip(s_values, rngs):
        ledger = QueryLedger()
        estimate = classical_count_estimate(formula, s, rng, ledger)
        rows.append(BaselineRow(
            method="classical_count", instance=instance, param=f"s={s}",
            estimate=estimate, queries=ledger.oracle_queries, seed=seed,
        ))
    for t, rng in zip(t_values, rngs[len(s_values):]):
        ledger = QueryLedger()
        estimate = quantum_count(formula, t=t, shots=shots, rng=rng, ledger=ledger)
        rows.append(BaselineRow(
            method="quantum_count", instance=instance, param=f"t={t}",
            estimate=float(estimate.model_count), queries=ledger.oracle_queries, seed=seed,
        ))
    return rows


def vote_event_table(
    ks: Optional[Iterable[int]] = None,
    os: Optional[Iterable[int]] = None,
    As: Optional[Iterable[float]] = None,
    trials: int = 1000,
    seed: Optional[int] = None,
) -> List[BaselineRow]:
    """
    Monte-Carlo probability that the favoured category wins, over a grid of
    category counts k, vote sizes o and advantage factors A.

    Rows use method "vote_event", param "k=..,o=..,A=..", queries = trials * o.
    """
    grid = vote_event_grid_defaults()
    ks = tuple(ks or grid["ks"])
    os = tuple(os or grid["os"])
    As = tuple(As or grid["As"])
    seed = seed_of(seed)
    cells = [(k, o, A) for k in ks for o in os for A in As]
    rngs = spawn_rngs(seed, len(cells))

    rows = []
    for (k, o, A), rng in zip(cells, rngs):
        probability = vote_event_probability(k, o, A, trials, rng)
        logger.debug(f"Vote cell k={k} o={o} A={A}: {probability:.4f}")
        rows.append(BaselineRow(
            method="vote_event", instance=f"k{k}", param=f"k={k},o={o},A={A:g}",
            estimate=probability, queries=trials * o, seed=seed,
        ))
    return rows


def rows_to_csv(rows: Iterable[BaselineRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for row in rows:
        writer.writerow([row.method, row.instance, row.param, repr(row.estimate), row.queries, row.seed])
    return buffer.getvalue()


def write_rows_csv(rows: Iterable[BaselineRow], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(rows_to_csv(rows), encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path
