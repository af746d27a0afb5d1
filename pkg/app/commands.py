"""
Commands
One function per CLI command; each takes a RunConfig and returns a report
model. Shared by the CLI and the HTTP API.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.algorithms.counting import default_t_bits, qwmc, quantum_count, wmc_from_phase
from app.algorithms.sampling import QwcsSampler, vote_map, vote_mpe
from app.baselines.classical import classical_count_estimate, classical_wmc_estimate
from app.baselines.ledger import QueryLedger
from app.baselines.report import BaselineRow, complexity_curve, counting_curve, vote_event_table, write_rows_csv
from app.config import settings
from app.errors import EnumerationLimitError, UnsatisfiableError
from app.logic.dimacs import load_weighted_dimacs, parse_weighted_dimacs
from app.logic.formula import (
    WeightedFormula,
    conditional_query_distribution,
    exact_map,
    exact_mpe,
    exact_solve,
    satisfied_mask,
)
from app.logic.instances import SPRINKLER_MAP_QUERY, sprinkler
from app.quantum.circuits import (
    OracleSpec,
    build_grover,
    build_marking_oracle,
    build_phase_oracle,
    build_qft,
    build_rot,
    build_weighted_grover,
)
from app.quantum.histogram import Histogram
from app.rng import spawn_rngs
from app.schemas import (
    REPORT_MODELS,
    ClassicalEstimate,
    CountReport,
    ExactWmc,
    ReproReport,
    RunConfig,
    SampleReport,
    VoteReport,
    WmcReport,
)

logger = logging.getLogger(__name__)

# Sprinkler reproduction defaults
REPRO_T_BITS = 5


# =============================================================================
# Helpers
# =============================================================================

def load_instance(config: RunConfig, text: Optional[str] = None) -> Tuple[str, WeightedFormula]:
    """
    Resolve the instance for a command.

    Args:
        config: Run configuration
        text: Inline weighted-DIMACS text (takes precedence over input_path)

    Returns:
        (instance name, weighted formula)
    """
    if text is not None:
        return "inline", parse_weighted_dimacs(text)
    if config.input_path:
        path = Path(config.input_path)
        return path.stem, load_weighted_dimacs(path)
    logger.info("No input given; using the sprinkler instance")
    return "sprinkler", sprinkler()


def resolve_query(config: RunConfig, wf: WeightedFormula, default: Optional[Sequence[int]] = None) -> Tuple[int, ...]:
    """1-based query from the config as 0-based indices (all variables by default)."""
    if config.query is None:
        return tuple(default) if default is not None else tuple(range(wf.num_vars))
    for v in config.query:
        if v > wf.num_vars:
            raise ValueError(f"Query variable {v} out of range (n={wf.num_vars})")
    return tuple(v - 1 for v in config.query)


def _enumerable(wf: WeightedFormula, required: bool) -> bool:
    if wf.num_vars <= settings.ENUMERATION_LIMIT:
        return True
    if required:
        raise EnumerationLimitError(
            f"Exact mode needs enumeration of {wf.num_vars} variables (limit {settings.ENUMERATION_LIMIT})"
        )
    logger.info(f"Skipping exact computation: n={wf.num_vars} exceeds the enumeration limit")
    return False


def _wants(config: RunConfig, method: str) -> bool:
    return config.method in ("all", method)


def _one_based(query: Sequence[int]) -> List[int]:
    return [v + 1 for v in query]


def total_variation(frequencies: Dict[str, float], exact: Dict[str, float]) -> float:
    labels = set(frequencies) | set(exact)
    return 0.5 * sum(abs(frequencies.get(label, 0.0) - exact.get(label, 0.0)) for label in labels)


def _exact_labels(distribution: np.ndarray, width: int) -> Dict[str, float]:
    out = {}
    for outcome, p in enumerate(distribution):
        if p > 0:
            out["".join(str((outcome >> i) & 1) for i in range(width))] = float(p)
    return dict(sorted(out.items()))


# =============================================================================
# Commands
# =============================================================================

def cmd_wmc(config: RunConfig, text: Optional[str] = None) -> WmcReport:
    """Exact WMC, QWMC estimate and classical estimate for one instance."""
    name, wf = load_instance(config, text)
    quantum_rng, classical_rng = spawn_rngs(config.seed, 2)
    queries: Dict[str, int] = {}

    exact = None
    if _wants(config, "exact") and _enumerable(wf, required=config.method == "exact"):
        solution = exact_solve(wf)
        exact = ExactWmc(wmc=solution.wmc, normalized_wmc=solution.normalized_wmc, model_count=solution.model_count)
        queries["exact"] = 1 << wf.num_vars

    quantum = None
    if _wants(config, "quantum"):
        ledger = QueryLedger()
        quantum = qwmc(
            wf, t=config.t_bits, shots=config.shots, rng=quantum_rng,
            backend=config.power_backend, ledger=ledger,
        )
        queries["quantum"] = ledger.oracle_queries

    classical = None
    if _wants(config, "classical"):
        ledger = QueryLedger()
        estimate = classical_wmc_estimate(wf, config.samples, classical_rng, ledger)
        classical = ClassicalEstimate(
            estimate=estimate,
            raw_estimate=estimate * wf.normalized().v_product,
            samples=config.samples,
            oracle_queries=ledger.oracle_queries,
        )
        queries["classical"] = ledger.oracle_queries

    return WmcReport(
        instance=name,
        num_vars=wf.num_vars,
        num_clauses=wf.formula.num_clauses,
        seed=config.seed,
        exact=exact,
        quantum=quantum,
        classical=classical,
        oracle_queries=queries,
    )


def cmd_count(config: RunConfig, text: Optional[str] = None) -> CountReport:
    """Quantum count, exact M and classical estimate."""
    name, wf = load_instance(config, text)
    quantum_rng, classical_rng = spawn_rngs(config.seed, 2)
    queries: Dict[str, int] = {}

    exact_count = None
    if _wants(config, "exact") and _enumerable(wf, required=config.method == "exact"):
        exact_count = int(satisfied_mask(wf.formula).sum())
        queries["exact"] = 1 << wf.num_vars

    quantum = None
    if _wants(config, "quantum"):
        ledger = QueryLedger()
        quantum = quantum_count(
            wf.formula, t=config.t_bits, shots=config.shots, rng=quantum_rng,
            backend=config.power_backend, ledger=ledger,
        )
        queries["quantum"] = ledger.oracle_queries

    classical = None
    if _wants(config, "classical"):
        ledger = QueryLedger()
        estimate = classical_count_estimate(wf.formula, config.samples, classical_rng, ledger)
        classical = ClassicalEstimate(estimate=estimate, samples=config.samples, oracle_queries=ledger.oracle_queries)
        queries["classical"] = ledger.oracle_queries

    return CountReport(
        instance=name,
        num_vars=wf.num_vars,
        seed=config.seed,
        exact_model_count=exact_count,
        quantum=quantum,
        classical=classical,
        oracle_queries=queries,
    )


def cmd_sample(config: RunConfig, text: Optional[str] = None) -> SampleReport:
    """
    QWCS: one QWMC estimate, then `shots` draws over the query variables.

    Raises:
        UnsatisfiableError: QWMC estimate is 0
    """
    name, wf = load_instance(config, text)
    query = resolve_query(config, wf)
    qwmc_rng, sample_rng = spawn_rngs(config.seed, 2)

    estimate = qwmc(
        wf, t=config.t_bits, shots=config.qwmc_shots or settings.QWMC_SHOTS,
        rng=qwmc_rng, backend=config.power_backend,
    )
    if estimate.normalized_estimate <= 0:
        raise UnsatisfiableError("QWMC estimate is 0: the formula appears unsatisfiable")

    sampler = QwcsSampler(wf, query, estimate.normalized_estimate)
    batch = sampler.draw(sample_rng, config.shots)
    successful = batch.histogram(successful_only=True)

    exact_distribution = None
    tv = None
    if _enumerable(wf, required=False) and satisfied_mask(wf.formula).any():
        exact_distribution = _exact_labels(conditional_query_distribution(wf, query), len(query))
        if successful.total:
            frequencies = {successful.label(o): f for o, f in successful.frequencies().items()}
            tv = total_variation(frequencies, exact_distribution)

    return SampleReport(
        instance=name,
        seed=config.seed,
        query=_one_based(query),
        shots=config.shots,
        successes=successful.total,
        success_rate=batch.success_rate,
        iterations=batch.iterations,
        wmc_estimate=sampler.wmc_normalized,
        histogram=batch.histogram().labelled_counts(),
        successful_histogram=successful.labelled_counts(),
        exact_distribution=exact_distribution,
        total_variation=tv,
        oracle_queries=estimate.oracle_queries + batch.oracle_queries,
    )


def _vote_report(command: str, name: str, config: RunConfig, query, vote, exact_mode, exact_weight) -> VoteReport:
    return VoteReport(
        command=command,
        instance=name,
        seed=config.seed,
        query=_one_based(query),
        shots=config.shots,
        mode=vote.bits,
        successes=vote.successes,
        iterations=vote.iterations,
        wmc_estimate=vote.wmc_estimate,
        histogram=vote.histogram.labelled_counts(),
        exact_mode=exact_mode,
        exact_weight=exact_weight,
        oracle_queries=vote.oracle_queries,
    )


def cmd_mpe(config: RunConfig, text: Optional[str] = None) -> VoteReport:
    """Most probable explanation by repeated QWCS over every variable."""
    name, wf = load_instance(config, text)
    (rng,) = spawn_rngs(config.seed, 1)
    vote = vote_mpe(
        wf, config.shots, rng, t=config.t_bits, qwmc_shots=config.qwmc_shots, backend=config.power_backend,
    )
    exact_mode = exact_weight = None
    if _enumerable(wf, required=False):
        assignment, exact_weight = exact_mpe(wf)
        exact_mode = assignment.to_string()
    return _vote_report("mpe", name, config, tuple(range(wf.num_vars)), vote, exact_mode, exact_weight)


def cmd_map(config: RunConfig, text: Optional[str] = None) -> VoteReport:
    """Maximum a posteriori state of the query variables by repeated QWCS."""
    name, wf = load_instance(config, text)
    default = SPRINKLER_MAP_QUERY if name == "sprinkler" and text is None else None
    query = resolve_query(config, wf, default)
    (rng,) = spawn_rngs(config.seed, 1)
    vote = vote_map(
        wf, query, config.shots, rng, t=config.t_bits, qwmc_shots=config.qwmc_shots, backend=config.power_backend,
    )
    exact_mode = exact_weight = None
    if _enumerable(wf, required=False):
        partial, exact_weight = exact_map(wf, query)
        values = partial.as_dict()
        exact_mode = "".join("1" if values[v] else "0" for v in query)
    return _vote_report("map", name, config, query, vote, exact_mode, exact_weight)


def _phase_histogram_tsv(histogram: Histogram, t: int) -> str:
    rows = ["y\tphase\twmc_estimate\tcount"]
    for y, count in sorted(histogram.counts.items()):
        rows.append(f"{y}\t{y / (1 << t)!r}\t{wmc_from_phase(y, t):.6f}\t{count}")
    return "\n".join(rows) + "\n"


def cmd_repro_sprinkler(config: RunConfig) -> ReproReport:
    """
    Reproduce the sprinkler runs: the QWMC phase histogram, the MPE and MAP
    vote histograms and the exact solution, written under config.out_dir.
    """
    wf = sprinkler()
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t = config.t_bits or REPRO_T_BITS
    shots = config.shots
    wmc_rng, mpe_rng, map_rng = spawn_rngs(config.seed, 3)
    logger.info(f"Reproducing sprinkler runs into {out_dir} (seed {config.seed}, t={t}, shots={shots})")

    estimate = qwmc(wf, t=t, shots=shots, rng=wmc_rng, backend=config.power_backend)
    mpe = vote_mpe(wf, shots, mpe_rng, t=t, qwmc_shots=config.qwmc_shots, backend=config.power_backend)
    map_vote = vote_map(
        wf, SPRINKLER_MAP_QUERY, shots, map_rng, t=t, qwmc_shots=config.qwmc_shots, backend=config.power_backend,
    )
    solution = exact_solve(wf, SPRINKLER_MAP_QUERY)

    files = {
        "qwmc_histogram.tsv": _phase_histogram_tsv(estimate.histogram, t),
        "mpe_histogram.tsv": mpe.histogram.to_tsv(),
        "map_histogram.tsv": map_vote.histogram.to_tsv(),
        "exact_report.json": solution.model_dump_json(indent=2) + "\n",
    }
    for filename, content in files.items():
        (out_dir / filename).write_text(content, encoding="utf-8")

    report = ReproReport(
        seed=config.seed,
        shots=shots,
        t_bits=t,
        files=sorted(list(files) + ["summary.json"]),
        wmc_mode_phase_integer=estimate.measured_phase_integer,
        wmc_mode_estimate=estimate.normalized_estimate,
        exact_wmc=solution.wmc,
        mpe_mode=mpe.bits,
        map_query=_one_based(SPRINKLER_MAP_QUERY),
        map_mode=map_vote.bits,
        oracle_queries={
            "qwmc": estimate.oracle_queries,
            "mpe": mpe.oracle_queries,
            "map": map_vote.oracle_queries,
        },
    )
    (out_dir / "summary.json").write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info(f"QWMC mode {estimate.normalized_estimate:.3f}, MPE {mpe.bits}, MAP {map_vote.bits}")
    return report


def cmd_baselines(config: RunConfig, text: Optional[str] = None) -> List[BaselineRow]:
    """Classical-vs-quantum estimates with query counts, written to baselines.csv."""
    name, wf = load_instance(config, text)
    t_values = None if config.t_bits is None else tuple(range(1, config.t_bits + 1))
    rows = complexity_curve(wf, t_values=t_values, seed=config.seed, instance=name)
    rows += counting_curve(wf, t_values=t_values, seed=config.seed, instance=name)
    write_rows_csv(rows, Path(config.out_dir) / "baselines.csv")
    return rows


def cmd_vote_table(config: RunConfig) -> List[BaselineRow]:
    """Multinomial vote study grid, written to vote_table.csv."""
    rows = vote_event_table(trials=config.trials, seed=config.seed)
    write_rows_csv(rows, Path(config.out_dir) / "vote_table.csv")
    return rows


def cmd_dump_circuit(config: RunConfig, text: Optional[str] = None) -> str:
    """Text gate list of one gadget for the instance."""
    _, wf = load_instance(config, text)
    nw = wf.normalized()
    spec = OracleSpec(formula=wf.formula, extra_qubit=True)
    builders = {
        "oracle": lambda: build_marking_oracle(spec),
        "phase-oracle": lambda: build_phase_oracle(spec),
        "rot": lambda: build_rot(nw, True),
        "wg": lambda: build_weighted_grover(nw, spec),
        "grover": lambda: build_grover(spec),
        "qft": lambda: build_qft(config.t_bits or default_t_bits(wf.num_vars)),
    }
    gadget = builders[config.gadget]()
    logger.info(f"Dumping {gadget.name}: {gadget.total_qubits} qubits, gates {gadget.gate_counts()}")
    return gadget.dump()


def report_schema(name: str) -> dict:
    if name not in REPORT_MODELS:
        raise ValueError(f"Unknown report {name!r}; choose from {sorted(REPORT_MODELS)}")
    return REPORT_MODELS[name].model_json_schema()
