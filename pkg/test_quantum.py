"""
Test script for the state-vector simulator
Covers gate kernels, measurement, histograms, circuit gadgets, controlled-power
backends and phase estimation.

Usage:
    python test_quantum.py
    pytest test_quantum.py
"""

import math
import os
import sys

import numpy as np
import pytest

# Add project root to path
project_root = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, project_root)

from app.config import settings
from app.errors import QubitLimitError, ResourceLimitError
from app.logic.formula import CnfFormula
from app.logic.instances import random_formula, random_weight_table, random_weighted_formula, sprinkler, tautology
from app.logic.weights import WeightTable, normalize, world_weights_array
from app.quantum.backend_factory import get_power_backend
from app.quantum.circuits import (
    CircuitGadget,
    GateOp,
    OracleSpec,
    build_grover,
    build_marking_oracle,
    build_phase_oracle,
    build_qft,
    build_rot,
    build_weighted_grover,
    build_zero_reflection,
    check_dense_qubits,
    parse_gate_dump,
    rot_matrix,
    rot_state,
    weighted_grover_matrix,
)
from app.quantum.gate_backend import GatePowerBackend
from app.quantum.histogram import Histogram
from app.quantum.matrix_backend import MatrixPowerBackend
from app.quantum.phase_estimation import phase_estimation, phase_estimation_distribution, phase_of
from app.quantum.statevector import (
    Gate1Q,
    apply_1q,
    apply_controlled_1q,
    apply_controlled_unitary,
    apply_phase_flip_where,
    basis_state,
    from_amplitudes,
    hadamard,
    marginal_probabilities,
    pauli_x,
    pauli_z,
    phase,
    probability_where,
    ry,
    sample,
    sample_indices,
    zero_state,
)
from app.rng import make_rng, shot_uniforms


def _random_state(k: int, seed: int):
    rng = make_rng(seed)
    amps = rng.normal(size=1 << k) + 1j * rng.normal(size=1 << k)
    return from_amplitudes(amps, normalize=True)


def _random_unitary(dim: int, seed: int) -> np.ndarray:
    rng = make_rng(seed)
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# =============================================================================
# State vector
# =============================================================================

def test_zero_state_and_limits():
    s = zero_state(3)
    assert s.dim == 8
    assert s.probabilities()[0] == 1.0
    assert s.is_normalized()

    with pytest.raises(ValueError):
        zero_state(0)
    with pytest.raises(QubitLimitError):
        zero_state(settings.MAX_QUBITS + 1)
    with pytest.raises(ValueError):
        from_amplitudes([1.0, 0.0, 0.0])


def test_qubit_zero_is_least_significant():
    s = apply_1q(zero_state(2), pauli_x(), 1)
    assert s.probabilities()[2] == pytest.approx(1.0)

    s = apply_1q(zero_state(2), hadamard(), 0)
    assert np.allclose(s.amps, [1 / math.sqrt(2), 1 / math.sqrt(2), 0, 0])


def test_controlled_gates():
    s = apply_controlled_1q(basis_state(2, 1), pauli_x(), (0,), 1)
    assert s.probabilities()[3] == pytest.approx(1.0)

    # control not set: nothing happens
    s = apply_controlled_1q(basis_state(2, 2), pauli_x(), (0,), 1)
    assert s.probabilities()[2] == pytest.approx(1.0)

    with pytest.raises(ValueError):
        apply_controlled_1q(zero_state(2), pauli_x(), (1,), 1)


def test_controlled_unitary_matches_single_qubit_kernel():
    a = _random_state(4, 1)
    b = a.copy()
    apply_controlled_1q(a, ry(0.7), (3, 1), 2)
    apply_controlled_unitary(b, ry(0.7).matrix, (3, 1), (2,))
    assert np.allclose(a.amps, b.amps, atol=1e-12)


def test_controlled_unitary_target_order():
    """Bit j of the block index is qubit targets[j]"""
    u = _random_unitary(4, 2)
    s = _random_state(3, 3)
    expected = np.zeros(8, dtype=np.complex128)
    targets = (2, 0)
    for i in range(8):
        col = ((i >> targets[0]) & 1) | (((i >> targets[1]) & 1) << 1)
        rest = i & ~((1 << targets[0]) | (1 << targets[1]))
        for row in range(4):
            j = rest | ((row & 1) << targets[0]) | (((row >> 1) & 1) << targets[1])
            expected[j] += u[row, col] * s.amps[i]
    apply_controlled_unitary(s, u, (), targets)
    assert np.allclose(s.amps, expected, atol=1e-12)


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate1Q("bad", np.array([[1, 1], [0, 1]]))
    assert np.allclose(ry(0.3).adjoint().matrix, ry(0.3).matrix.conj().T)


def test_phase_flip():
    s = apply_1q(apply_1q(zero_state(2), hadamard(), 0), hadamard(), 1)
    apply_phase_flip_where(s, np.array([False, False, False, True]))
    assert np.allclose(s.amps, [0.5, 0.5, 0.5, -0.5])
    apply_phase_flip_where(s, lambda j: j == 3)
    assert np.allclose(s.amps, [0.5, 0.5, 0.5, 0.5])


def test_marginal_probabilities_bit_order():
    s = basis_state(3, 0b101)
    assert marginal_probabilities(s, (0, 1)).probability(0b01) == pytest.approx(1.0)
    assert marginal_probabilities(s, (2, 0)).probability(0b11) == pytest.approx(1.0)
    assert marginal_probabilities(s, (1,)).probability(0) == pytest.approx(1.0)

    marginal = marginal_probabilities(_random_state(4, 5), (3, 1))
    assert marginal.is_normalized()


def test_probability_where():
    s = apply_1q(zero_state(2), hadamard(), 0)
    assert probability_where(s, np.array([False, True, False, False])) == pytest.approx(0.5)


def test_sampling_is_seeded_and_leaves_state():
    s = _random_state(3, 7)
    before = s.amps.copy()
    a = sample(s, (0, 2), make_rng(42), 500)
    b = sample(s, (0, 2), make_rng(42), 500)
    assert a == b
    assert a.total == 500
    assert np.array_equal(s.amps, before)


# =============================================================================
# Histogram
# =============================================================================

def test_histogram_labels_and_mode():
    h = Histogram.from_outcomes([1, 1, 2, 2, 3], num_bits=2)
    assert h.mode() == 1
    assert h.label(1) == "10"
    assert h.labelled_counts() == {"01": 2, "10": 2, "11": 1}
    assert h.to_tsv().splitlines()[0] == "outcome\tcount\tfrequency"
    assert h.to_tsv().splitlines()[1] == "01\t2\t0.400000"
    assert h.merge(h).count(3) == 2

    with pytest.raises(ValueError):
        Histogram(num_bits=1, counts={2: 1}, total=1)
    with pytest.raises(ValueError):
        Histogram(num_bits=1, counts={0: 1}, total=2)


# =============================================================================
# Circuit gadgets
# =============================================================================

def test_rot_prepares_weighted_superposition():
    nw = sprinkler().normalized()
    state = build_rot(nw).apply(zero_state(4))
    assert np.allclose(state.amps, rot_state(nw, 3))
    assert np.allclose(rot_matrix(nw)[:, 0], rot_state(nw, 3))
    # squared amplitudes are the world weights times the extra qubit's 1/2
    assert np.allclose(state.probabilities()[:8] * 2, world_weights_array(nw))
    assert state.probabilities().sum() == pytest.approx(1.0)


def test_marking_oracle_truth_table():
    wf = sprinkler()
    spec = OracleSpec(formula=wf.formula, extra_qubit=True)
    oracle = build_marking_oracle(spec)
    mask = spec.phase_mask()
    target = oracle.target_qubit
    for x in range(16):
        out = oracle.apply(basis_state(oracle.total_qubits, x))
        expected = x | (int(mask[x]) << target)
        assert out.probabilities()[expected] == pytest.approx(1.0)


def test_phase_oracle_and_ancilla_budget():
    formula = CnfFormula.from_dimacs_clauses(2, [[1, -1], [2]])
    spec = OracleSpec(formula=formula, extra_qubit=False)
    matrix = build_phase_oracle(spec).to_matrix()[:4, :4]
    assert np.allclose(matrix, np.diag([1, 1, -1, -1]))

    with pytest.raises(ResourceLimitError):
        build_marking_oracle(spec, max_ancillas=1)


def test_zero_reflection_sign():
    matrix = build_zero_reflection(2).to_matrix()
    assert np.allclose(matrix, np.diag([1, -1, -1, -1]))
    controlled = build_zero_reflection(2).controlled([2]).to_matrix()
    assert np.allclose(controlled[:4, :4], np.eye(4))
    assert np.allclose(controlled[4:, 4:], np.diag([1, -1, -1, -1]))


def test_weighted_grover_gadget_matches_dense_form():
    wf = sprinkler()
    nw = wf.normalized()
    spec = OracleSpec(formula=wf.formula, extra_qubit=True)
    full = build_weighted_grover(nw, spec).to_matrix()
    dense = weighted_grover_matrix(nw, spec)
    assert np.allclose(full[:16, :16], dense, atol=1e-10)
    assert np.allclose(full[16:, :16], 0.0, atol=1e-10)
    assert np.allclose(dense.conj().T @ dense, np.eye(16), atol=1e-10)


def test_grover_gadget_matches_uniform_dense_form():
    formula = CnfFormula.from_dimacs_clauses(2, [[1, 2]])
    spec = OracleSpec(formula=formula, extra_qubit=False)
    full = build_grover(spec).to_matrix()
    assert np.allclose(full[:4, :4], weighted_grover_matrix(None, spec), atol=1e-10)


def test_weighted_grover_eigenphases():
    wf = sprinkler()
    spec = OracleSpec(formula=wf.formula, extra_qubit=True)
    phi = rot_state(wf.normalized(), 3)
    dense = weighted_grover_matrix(wf.normalized(), spec)
    theta = math.asin(math.sqrt(0.679 / 2))
    # |phi> lives in the span of the two eigenvectors with phases +-2 theta
    eigenvalues, vectors = np.linalg.eig(dense)
    weights = np.abs(vectors.conj().T @ phi) ** 2
    angles = np.abs(np.angle(eigenvalues[weights > 1e-6]))
    assert np.allclose(angles, 2 * theta, atol=1e-6)


def test_qft_matrix():
    t = 3
    size = 1 << t
    expected = np.array(
        [[np.exp(2j * math.pi * j * k / size) for j in range(size)] for k in range(size)]
    ) / math.sqrt(size)
    assert np.allclose(build_qft(t).to_matrix(), expected, atol=1e-10)
    with pytest.raises(ValueError):
        build_qft(0)


def test_gadget_dump_round_trip():
    wf = sprinkler()
    gadget = build_weighted_grover(wf.normalized(), OracleSpec(formula=wf.formula))
    text = gadget.dump()
    assert text.startswith("# weighted_grover qubits=8")
    parsed = parse_gate_dump(text)
    assert parsed.total_qubits == 8
    assert np.allclose(parsed.to_matrix(), gadget.to_matrix(), atol=1e-10)

    with pytest.raises(ValueError):
        parse_gate_dump("FOO 0\n")


def test_adjoint_inverts_gadget():
    gadget = build_qft(3)
    product = gadget.then(gadget.adjoint()).to_matrix()
    assert np.allclose(product, np.eye(8), atol=1e-10)


# =============================================================================
# Backends and phase estimation
# =============================================================================

def test_backend_factory():
    wf = sprinkler()
    spec = OracleSpec(formula=wf.formula)
    gadget = build_weighted_grover(wf.normalized(), spec)
    assert isinstance(get_power_backend(gadget, "gates"), GatePowerBackend)
    assert isinstance(get_power_backend(gadget, "matrix"), MatrixPowerBackend)
    # a bare matrix cannot run gate by gate
    assert isinstance(get_power_backend(np.eye(2), "gates"), MatrixPowerBackend)


def test_matrix_power_cache():
    u = _random_unitary(4, 9)
    backend = MatrixPowerBackend(u)
    assert backend.register_qubits == 2
    assert np.allclose(backend.power(3), np.linalg.matrix_power(u, 8))


def test_phase_estimation_exact_phase():
    u = np.diag([1.0, np.exp(2j * math.pi * 3 / 8)])
    prepare = CircuitGadget(total_qubits=1, ops=(GateOp(pauli_x(), 0),))
    dist = phase_estimation_distribution(u, prepare, 3)
    assert dist[3] == pytest.approx(1.0)

    histogram = phase_estimation(u, prepare, 3, shots=1000, rng=make_rng(1))
    assert histogram.counts == {3: 1000}


def test_phase_estimation_sprinkler():
    """Five counting bits concentrate on y = 6 and y = 26"""
    wf = sprinkler()
    nw = wf.normalized()
    spec = OracleSpec(formula=wf.formula)
    dist = phase_estimation_distribution(weighted_grover_matrix(nw, spec), build_rot(nw), 5)
    assert dist.sum() == pytest.approx(1.0)
    assert dist[6] + dist[26] > 0.6
    assert dist[6] == pytest.approx(dist[26], abs=1e-9)


def test_gate_backend_matches_matrix_backend():
    wf = sprinkler()
    nw = wf.normalized()
    spec = OracleSpec(formula=wf.formula)
    gadget = build_weighted_grover(nw, spec)
    rot = build_rot(nw)
    by_matrix = phase_estimation_distribution(weighted_grover_matrix(nw, spec), rot, 3, backend="matrix")
    by_gates = phase_estimation_distribution(gadget, rot.widened(gadget.total_qubits), 3, backend="gates")
    assert np.allclose(by_matrix, by_gates, atol=1e-9)


def test_phase_estimation_register_mismatch():
    with pytest.raises(ValueError):
        phase_estimation_distribution(np.eye(4), build_qft(1), 2)


def test_dense_operators_respect_qubit_cap(monkeypatch):
    spec = OracleSpec(formula=tautology(settings.MAX_DENSE_QUBITS), extra_qubit=True)
    with pytest.raises(QubitLimitError):
        weighted_grover_matrix(None, spec)

    monkeypatch.setattr(settings, "MAX_DENSE_QUBITS", 2)
    with pytest.raises(QubitLimitError):
        check_dense_qubits(3, "Operator")
    with pytest.raises(QubitLimitError):
        MatrixPowerBackend(np.eye(8))
    with pytest.raises(QubitLimitError):
        build_qft(3).to_matrix()
    # at the cap is fine
    assert MatrixPowerBackend(np.eye(4)).register_qubits == 2


def test_phase_estimation_respects_qubit_cap(monkeypatch):
    monkeypatch.setattr(settings, "MAX_QUBITS", 4)
    with pytest.raises(QubitLimitError):
        phase_estimation_distribution(np.eye(4), None, 3)


# =============================================================================
# Invariants over random instances
# =============================================================================

def test_norm_survives_random_gate_sequence():
    rng = make_rng(11)
    state = zero_state(5)
    fixed = [hadamard(), pauli_x(), pauli_z()]
    for _ in range(1000):
        kind = int(rng.integers(5))
        target = int(rng.integers(5))
        if kind < 3:
            apply_1q(state, fixed[kind], target)
        elif kind == 3:
            apply_1q(state, ry(float(rng.uniform(0, 2 * math.pi))), target)
        else:
            control = (target + 1 + int(rng.integers(4))) % 5
            apply_controlled_1q(state, phase(float(rng.uniform(0, 2 * math.pi))), (control,), target)
    assert state.is_normalized(1e-9)


def test_gate_then_adjoint_is_identity():
    rng = make_rng(12)
    for trial in range(50):
        angle = float(rng.uniform(0, 2 * math.pi))
        gate = [hadamard(), pauli_x(), pauli_z(), ry(angle), phase(angle)][trial % 5]
        qubits = [int(q) for q in rng.permutation(3)]
        controls = tuple(qubits[1 : 1 + int(rng.integers(3))])
        state = _random_state(3, 200 + trial)
        before = state.amps.copy()
        apply_controlled_1q(state, gate, controls, qubits[0])
        apply_controlled_1q(state, gate.adjoint(), controls, qubits[0])
        assert np.allclose(state.amps, before, atol=1e-12)


def test_bell_state():
    s = apply_1q(zero_state(2), hadamard(), 0)
    apply_controlled_1q(s, pauli_x(), (0,), 1)
    assert np.allclose(s.amps, [1 / math.sqrt(2), 0, 0, 1 / math.sqrt(2)])
    assert np.allclose(marginal_probabilities(s, (0, 1)).probabilities, [0.5, 0, 0, 0.5])
    assert np.allclose(marginal_probabilities(s, (1,)).probabilities, [0.5, 0.5])
    assert set(sample(s, (0, 1), make_rng(3), 1000).counts) <= {0, 3}


def test_marginals_agree_across_query_sets():
    for seed in range(10):
        s = _random_state(4, 100 + seed)
        # bit 0 of the joint outcome is qubit 2, bit 1 is qubit 0
        joint = marginal_probabilities(s, (2, 0)).probabilities.reshape(2, 2)
        assert np.allclose(joint.sum(axis=0), marginal_probabilities(s, (2,)).probabilities)
        assert np.allclose(joint.sum(axis=1), marginal_probabilities(s, (0,)).probabilities)
        other = marginal_probabilities(s, (1, 3))
        assert other.is_normalized()
        assert np.allclose(
            other.probabilities.reshape(2, 2).sum(axis=1), marginal_probabilities(s, (3,)).probabilities
        )


def test_uniform_rot_is_hadamard_superposition():
    h = hadamard().matrix
    for n in range(1, 6):
        nw = normalize(WeightTable.uniform(n))
        hadamards = np.ones((1, 1))
        for _ in range(n + 1):
            hadamards = np.kron(hadamards, h)
        state = build_rot(nw).apply(zero_state(n + 1))
        assert np.allclose(state.amps, hadamards[:, 0], atol=1e-12)
        assert np.allclose(rot_matrix(nw)[:, 0], hadamards[:, 0], atol=1e-12)


def test_rot_amplitudes_on_random_weights():
    rng = make_rng(77)
    for _ in range(50):
        n = int(rng.integers(1, 10))
        nw = normalize(random_weight_table(n, rng))
        half = np.sqrt(world_weights_array(nw) / 2.0)
        # the extra qubit is the most significant bit
        expected = np.concatenate([half, half])
        state = build_rot(nw).apply(zero_state(n + 1))
        assert np.allclose(state.amps, expected, atol=1e-9)
        assert np.allclose(rot_state(nw, n), expected, atol=1e-9)
        assert np.allclose(rot_state(nw, n, with_extra=False), np.sqrt(world_weights_array(nw)), atol=1e-9)


def test_oracles_mark_random_formulas():
    """Marking and phase oracles agree with phi and phi' on every basis input"""
    rng = make_rng(2024)
    for _ in range(100):
        n = int(rng.integers(1, 5))
        formula = random_formula(n, int(rng.integers(1, 4)), rng)
        for extra in (False, True):
            spec = OracleSpec(formula=formula, extra_qubit=extra)
            mask = spec.phase_mask()
            marking = build_marking_oracle(spec)
            phase_oracle = build_phase_oracle(spec)
            target = marking.target_qubit
            for x in range(1 << spec.num_search_qubits):
                out = marking.apply(basis_state(marking.total_qubits, x))
                assert out.probabilities()[x | (int(mask[x]) << target)] == pytest.approx(1.0)
                flipped = phase_oracle.apply(basis_state(phase_oracle.total_qubits, x))
                assert abs(flipped.amps[x] - (-1.0 if mask[x] else 1.0)) < 1e-9


def _small_gadgets(seed: int):
    rng = make_rng(seed)
    wf = random_weighted_formula(int(rng.integers(1, 3)), int(rng.integers(1, 3)), rng)
    nw = wf.normalized()
    spec = OracleSpec(formula=wf.formula, extra_qubit=True)
    plain = OracleSpec(formula=wf.formula, extra_qubit=False)
    return [
        build_rot(nw),
        build_marking_oracle(spec),
        build_phase_oracle(plain),
        build_weighted_grover(nw, spec),
        build_grover(plain),
        build_zero_reflection(3),
        build_qft(3),
    ]


def test_small_gadgets_are_reversible():
    for seed in range(10):
        for gadget in _small_gadgets(seed):
            assert gadget.total_qubits <= 8
            size = 1 << gadget.total_qubits
            matrix = gadget.to_matrix()
            assert np.allclose(matrix.conj().T @ matrix, np.eye(size), atol=1e-10)
            assert np.allclose(gadget.then(gadget.adjoint()).to_matrix(), np.eye(size), atol=1e-10)


def test_gate_counts_and_phase_fraction():
    assert build_qft(2).gate_counts() == {"H": 2, "MCP": 1, "MCX": 3}
    assert phase_of(6, 5) == pytest.approx(6 / 32)
    assert phase_of(0, 3) == 0.0


def test_dump_grammar_example():
    text = "# qft qubits=2\nH 1\nMCP 1.5707963267948966 0 1\nH 0\nMCX 0 1\nMCX 1 0\nMCX 0 1\n"
    assert build_qft(2).dump() == text
    parsed = parse_gate_dump(text + "# free comment\nMCZ 0 1\nRY 0.5 1\n")
    assert parsed.name == "qft"
    assert parsed.total_qubits == 2
    assert parsed.gate_counts() == {"H": 2, "MCP": 1, "MCX": 3, "MCZ": 1, "RY": 1}
    with pytest.raises(ValueError):
        parse_gate_dump("H 0 1\n")


def test_shot_draws_do_not_depend_on_batching():
    p = np.array([0.1, 0.2, 0.3, 0.4])
    full = sample_indices(p, make_rng(5), 100)
    assert np.array_equal(sample_indices(p, make_rng(5), 10), full[:10])
    rng = make_rng(5)
    chunks = np.concatenate([sample_indices(p, rng, 50), sample_indices(p, rng, 50)])
    assert np.array_equal(chunks, full)

    u = shot_uniforms(make_rng(8), 2000)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert u.mean() == pytest.approx(0.5, abs=0.03)
    # zero-probability trailing outcomes are never drawn
    assert set(sample_indices(np.array([0.5, 0.5, 0.0]), make_rng(6), 500).tolist()) <= {0, 1}


# =============================================================================
# Runner
# =============================================================================

def main():
    """Run all tests"""
    print("\n" + "=" * 60)
    print("STATE-VECTOR SIMULATOR TEST SUITE")
    print("=" * 60)

    sys.exit(pytest.main([__file__, "-q"]))


if __name__ == "__main__":
    main()
