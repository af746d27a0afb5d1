"""
Test script for the classical baselines
Covers query accounting, the Monte-Carlo estimators, the multinomial vote
study and the comparison CSV rows.

Usage:
    python test_baselines.py
    pytest test_baselines.py
"""

import math
import os
import sys

import pytest

# Add project root to path
project_root = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, project_root)

from app.baselines.classical import (
    classical_count_estimate,
    classical_search,
    classical_wmc_estimate,
    mean_and_stderr,
    vote_event_probability,
)
from app.baselines.ledger import CountingOracle, QueryLedger
from app.baselines.report import (
    CSV_FIELDS,
    complexity_curve,
    counting_curve,
    rows_to_csv,
    vote_event_table,
    write_rows_csv,
)
from app.logic.assignment import Assignment
from app.logic.formula import CnfFormula, evaluate
from app.logic.instances import contradiction, sprinkler
from app.rng import make_rng

SINGLE_MODEL = CnfFormula.from_dimacs_clauses(3, [[1], [2], [3]])


# =============================================================================
# Query accounting
# =============================================================================

def test_ledger_and_counting_oracle():
    ledger = QueryLedger()
    oracle = CountingOracle(sprinkler().formula, ledger)
    assert oracle(Assignment.from_string("101"))
    assert not oracle(Assignment.from_string("110"))
    oracle.batch([[True, False, True], [False, False, False]])
    assert ledger.oracle_queries == 4

    other = QueryLedger()
    other.charge(6)
    ledger.merge(other)
    assert ledger.oracle_queries == 10
    with pytest.raises(ValueError):
        ledger.charge(-1)


# =============================================================================
# Estimators
# =============================================================================

def test_classical_count_estimate():
    ledger = QueryLedger()
    estimate = classical_count_estimate(sprinkler().formula, 20000, make_rng(1), ledger)
    assert estimate == pytest.approx(4.0, abs=0.25)
    assert ledger.oracle_queries == 20000


def test_classical_wmc_estimate():
    ledger = QueryLedger()
    estimate = classical_wmc_estimate(sprinkler(), 20000, make_rng(2), ledger)
    assert estimate == pytest.approx(0.679, abs=0.015)
    assert ledger.oracle_queries == 20000

    with pytest.raises(ValueError):
        classical_wmc_estimate(sprinkler(), 0, make_rng(2))


def test_classical_wmc_estimate_is_unbiased():
    rng = make_rng(5)
    runs, s = 1000, 50
    mean = sum(classical_wmc_estimate(sprinkler(), s, rng) for _ in range(runs)) / runs
    sigma = math.sqrt(0.679 * (1 - 0.679) / (s * runs))
    assert abs(mean - 0.679) < 4 * sigma


def test_classical_estimators_are_seeded():
    a = classical_wmc_estimate(sprinkler(), 500, make_rng(3))
    b = classical_wmc_estimate(sprinkler(), 500, make_rng(3))
    assert a == b


def test_classical_search():
    ledger = QueryLedger()
    x = classical_search(SINGLE_MODEL, 200, make_rng(4), ledger)
    assert x is not None and evaluate(SINGLE_MODEL, x)
    assert ledger.oracle_queries <= 200

    ledger = QueryLedger()
    assert classical_search(contradiction(2), 10, make_rng(4), ledger) is None
    assert ledger.oracle_queries == 10


def test_vote_event_probability():
    # two categories, one draw: the favoured one wins with probability A/(1+A)
    assert vote_event_probability(2, 1, 1.0, 4000, make_rng(5)) == pytest.approx(0.5, abs=0.05)
    assert vote_event_probability(2, 1, 3.0, 4000, make_rng(5)) == pytest.approx(0.75, abs=0.05)
    # a large advantage with many draws almost always wins
    assert vote_event_probability(50, 2500, 3.0, 200, make_rng(6)) > 0.95

    with pytest.raises(ValueError):
        vote_event_probability(1, 10, 2.0, 10, make_rng(5))
    with pytest.raises(ValueError):
        vote_event_probability(3, 10, 0.5, 10, make_rng(5))


def test_mean_and_stderr():
    mean, stderr = mean_and_stderr([1.0, 2.0, 3.0])
    assert mean == pytest.approx(2.0)
    assert stderr == pytest.approx(1.0 / math.sqrt(3.0))
    assert mean_and_stderr([4.0]) == (4.0, 0.0)


# =============================================================================
# Comparison rows
# =============================================================================

def test_complexity_curve():
    rows = complexity_curve(sprinkler(), t_values=(2, 3), s_values=(10, 100), seed=1, instance="sprinkler")
    assert [row.method for row in rows] == ["exact", "classical_wmc", "classical_wmc", "qwmc", "qwmc"]
    assert [row.queries for row in rows] == [8, 10, 100, 3, 7]
    assert rows[0].estimate == pytest.approx(0.679)
    assert all(row.seed == 1 for row in rows)
    assert rows == complexity_curve(sprinkler(), t_values=(2, 3), s_values=(10, 100), seed=1, instance="sprinkler")


def test_counting_curve():
    rows = counting_curve(sprinkler(), t_values=(7,), s_values=(1000,), seed=2)
    assert [row.method for row in rows] == ["exact_count", "classical_count", "quantum_count"]
    assert rows[0].estimate == 4.0
    assert rows[2].queries == 127


def test_vote_event_table_and_csv(tmp_path):
    rows = vote_event_table(ks=(2,), os=(5,), As=(2.0,), trials=100, seed=1)
    assert len(rows) == 1
    assert rows[0].method == "vote_event"
    assert rows[0].param == "k=2,o=5,A=2"
    assert rows[0].queries == 500

    text = rows_to_csv(rows)
    assert text.splitlines()[0] == ",".join(CSV_FIELDS)
    assert len(text.splitlines()) == 2

    path = write_rows_csv(rows, tmp_path / "out" / "vote_table.csv")
    assert path.read_text(encoding="utf-8") == text


# =============================================================================
# Runner
# =============================================================================

def main():
    """Run all tests"""
    print("\n" + "=" * 60)
    print("CLASSICAL BASELINES TEST SUITE")
    print("=" * 60)

    sys.exit(pytest.main([__file__, "-q"]))


if __name__ == "__main__":
    main()
