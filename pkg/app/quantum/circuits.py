"""
Circuit Gadgets
Gate-level builders for the CNF marking oracle, the marking-to-phase wrapper,
the weight-loading Rot gate, Grover and weighted Grover operators and the QFT,
plus their dense matrix forms and a plain-text gate dump (grammar in
schemas/circuit-dump.md: H, X, Z, RY, P with an optional MC prefix, and a
`# name qubits=N` header).

Register layout for oracle-based gadgets: search qubits first (variable i is
qubit i, the extra qubit is qubit n), then one ancilla per clause, then the
oracle target last.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.config import settings
from app.errors import QubitLimitError, ResourceLimitError
from app.logic.formula import CnfFormula, satisfied_mask
from app.logic.weights import NormalizedWeights
from app.quantum.statevector import (
    Gate1Q,
    StateVector,
    apply_controlled_1q,
    apply_phase_flip_where,
    basis_state,
    hadamard,
    pauli_x,
    pauli_z,
    phase,
    ry,
)

logger = logging.getLogger(__name__)

def check_dense_qubits(k: int, what: str) -> None:
    """Refuse a dense 2^k x 2^k operator above the configured cap."""
    if k > settings.MAX_DENSE_QUBITS:
        raise QubitLimitError(
            f"{what} on {k} qubits exceeds the dense-operator cap of {settings.MAX_DENSE_QUBITS}"
        )


# =============================================================================
# Gadget types
# =============================================================================

@dataclass(frozen=True)
class GateOp:
    """One primitive gate application: a 1-qubit gate on `target` under `controls`"""

    gate: Gate1Q
    target: int
    controls: Tuple[int, ...] = ()

    def adjoint(self) -> "GateOp":
        return GateOp(self.gate.adjoint(), self.target, self.controls)

    def qubits(self) -> Tuple[int, ...]:
        return self.controls + (self.target,)

    def dump_line(self) -> str:
        name = self.gate.name
        if name not in _DUMP_NAMES:
            raise ValueError(f"Gate {name} has no text form")
        prefix = "MC" if self.controls else ""
        fields = [prefix + name]
        fields += [repr(p) for p in self.gate.params]
        fields += [str(q) for q in self.controls + (self.target,)]
        return " ".join(fields)


@dataclass(frozen=True)
class CircuitGadget:
    """
    Ordered gate list over `total_qubits` qubits.

    `target_qubit` is the marked output of a marking oracle; `search_qubits`
    is the register the gadget acts on as an operator (ancillas excluded).
    """

    total_qubits: int
    ops: Tuple[GateOp, ...] = ()
    name: str = "gadget"
    target_qubit: Optional[int] = None
    search_qubits: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        for op in self.ops:
            for q in op.qubits():
                if not 0 <= q < self.total_qubits:
                    raise ValueError(f"Gate on qubit {q} outside a {self.total_qubits}-qubit gadget")
            if op.target in op.controls or len(set(op.controls)) != len(op.controls):
                raise ValueError(f"Overlapping qubits in gate {op}")

    def __len__(self) -> int:
        return len(self.ops)

    def apply(self, state: StateVector) -> StateVector:
        """Apply every gate in order (in place)."""
        if state.num_qubits < self.total_qubits:
            raise ValueError(
                f"Gadget {self.name} needs {self.total_qubits} qubits, state has {state.num_qubits}"
            )
        for op in self.ops:
            apply_controlled_1q(state, op.gate, op.controls, op.target)
        return state

    def then(self, other: "CircuitGadget", name: Optional[str] = None) -> "CircuitGadget":
        """Sequential composition: self first, then other."""
        total = max(self.total_qubits, other.total_qubits)
        return replace(self, total_qubits=total, ops=self.ops + other.ops, name=name or self.name)

    def adjoint(self) -> "CircuitGadget":
        """Reversed list of adjoint gates."""
        return replace(self, ops=tuple(op.adjoint() for op in reversed(self.ops)), name=f"{self.name}_dg")

    def controlled(self, controls: Sequence[int], total_qubits: Optional[int] = None) -> "CircuitGadget":
        """Add `controls` to every gate; the controls must be fresh qubits."""
        controls = tuple(controls)
        used = {q for op in self.ops for q in op.qubits()}
        if used & set(controls):
            raise ValueError(f"Control qubits {controls} are already used by {self.name}")
        total = total_qubits or max([self.total_qubits] + [c + 1 for c in controls])
        ops = tuple(GateOp(op.gate, op.target, controls + op.controls) for op in self.ops)
        return replace(self, total_qubits=total, ops=ops, name=f"c_{self.name}")

    def relabel(self, mapping: Sequence[int], total_qubits: int) -> "CircuitGadget":
        """Move qubit q to mapping[q] inside a register of `total_qubits`."""
        if len(mapping) != self.total_qubits:
            raise ValueError(f"Mapping covers {len(mapping)} qubits, gadget has {self.total_qubits}")
        ops = tuple(
            GateOp(op.gate, mapping[op.target], tuple(mapping[c] for c in op.controls)) for op in self.ops
        )
        target = None if self.target_qubit is None else mapping[self.target_qubit]
        return CircuitGadget(
            total_qubits=total_qubits,
            ops=ops,
            name=self.name,
            target_qubit=target,
            search_qubits=tuple(mapping[q] for q in self.search_qubits),
        )

    def shifted(self, offset: int, total_qubits: int) -> "CircuitGadget":
        return self.relabel([q + offset for q in range(self.total_qubits)], total_qubits)

    def widened(self, total_qubits: int) -> "CircuitGadget":
        """Same gates inside a larger register (extra qubits untouched)."""
        if total_qubits < self.total_qubits:
            raise ValueError("Cannot narrow a gadget")
        return replace(self, total_qubits=total_qubits)

    def to_matrix(self) -> np.ndarray:
        """Dense unitary; column j is the gadget applied to basis state j."""
        k = self.total_qubits
        check_dense_qubits(k, f"Dense matrix of {self.name}")
        dim = 1 << k
        matrix = np.empty((dim, dim), dtype=np.complex128)
        for j in range(dim):
            matrix[:, j] = self.apply(basis_state(k, j)).amps
        return matrix

    def dump(self) -> str:
        """Plain-text gate list, one gate per line."""
        lines = [f"# {self.name} qubits={self.total_qubits}"]
        lines += [op.dump_line() for op in self.ops]
        return "\n".join(lines) + "\n"

    def gate_counts(self) -> dict:
        """Gate tally keyed by dump name, e.g. {"H": 2, "MCX": 3}."""
        counts: dict = {}
        for op in self.ops:
            key = ("MC" if op.controls else "") + op.gate.name
            counts[key] = counts.get(key, 0) + 1
        return counts


class OracleSpec(BaseModel):
    """Formula to mark, optionally conjoined with the extra qubit (phi' = phi AND X_{n+1})"""

    model_config = ConfigDict(frozen=True)

    formula: CnfFormula
    extra_qubit: bool = Field(default=True, description="Search over n+1 qubits with phi'")

    @property
    def num_search_qubits(self) -> int:
        return self.formula.num_vars + int(self.extra_qubit)

    def phase_mask(self) -> np.ndarray:
        """phi' (or phi) for every basis index of the search register."""
        return satisfied_mask(self.formula, self.extra_qubit)


# =============================================================================
# Text dump
# =============================================================================

_GATE_FACTORIES = {
    "H": (0, lambda params: hadamard()),
    "X": (0, lambda params: pauli_x()),
    "Z": (0, lambda params: pauli_z()),
    "RY": (1, lambda params: ry(params[0])),
    "P": (1, lambda params: phase(params[0])),
}
_DUMP_NAMES = set(_GATE_FACTORIES)


def parse_gate_dump(text: str, total_qubits: Optional[int] = None) -> CircuitGadget:
    """
    Read a gate list written by CircuitGadget.dump().

    Lines are `NAME [params] qubits...`; an `MC` prefix marks every qubit but
    the last as a control. `#` starts a comment; the header comment carries
    `qubits=N`.
    """
    ops: List[GateOp] = []
    name = "gadget"
    declared: Optional[int] = None
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for token in line[1:].split():
                if token.startswith("qubits="):
                    declared = int(token.split("=", 1)[1])
                elif name == "gadget":
                    name = token
            continue
        tokens = line.split()
        gate_name = tokens[0]
        multi = gate_name.startswith("MC")
        base = gate_name[2:] if multi else gate_name
        if base not in _GATE_FACTORIES:
            raise ValueError(f"line {line_number}: unknown gate {gate_name!r}")
        num_params, factory = _GATE_FACTORIES[base]
        try:
            params = [float(tok) for tok in tokens[1 : 1 + num_params]]
            qubits = [int(tok) for tok in tokens[1 + num_params :]]
        except ValueError as e:
            raise ValueError(f"line {line_number}: {e}") from e
        if len(params) != num_params or not qubits or (not multi and len(qubits) != 1):
            raise ValueError(f"line {line_number}: malformed gate {line!r}")
        ops.append(GateOp(factory(params), qubits[-1], tuple(qubits[:-1])))

    used = max((q for op in ops for q in op.qubits()), default=-1) + 1
    total = total_qubits or declared or max(used, 1)
    return CircuitGadget(total_qubits=total, ops=tuple(ops), name=name)


# =============================================================================
# Builders
# =============================================================================

def build_rot(nw: NormalizedWeights, with_extra: bool = True) -> CircuitGadget:
    """
    Weight-loading gate: RY(theta_i) on qubit i, and H on qubit n when with_extra.

    Applied to |0...0> it prepares the product of sqrt(1-p_i)|0> + sqrt(p_i)|1>.
    """
    n = nw.num_vars
    ops = [GateOp(ry(theta), i) for i, theta in enumerate(nw.theta)]
    if with_extra:
        ops.append(GateOp(hadamard(), n))
    total = n + int(with_extra)
    return CircuitGadget(total_qubits=total, ops=tuple(ops), name="rot", search_qubits=tuple(range(total)))


def _clause_ops(clause, ancilla: int) -> List[GateOp]:
    positive = sorted({lit.var for lit in clause if lit.positive})
    negative = sorted({lit.var for lit in clause if not lit.positive})
    if set(positive) & set(negative):
        # x OR NOT x: the clause is always true
        return [GateOp(pauli_x(), ancilla)]
    flips = [GateOp(pauli_x(), q) for q in positive]
    # ancilla <- AND of the negated literals, i.e. NOT clause, then negate
    return (
        flips
        + [GateOp(pauli_x(), ancilla, tuple(positive + negative)), GateOp(pauli_x(), ancilla)]
        + flips
    )


def build_marking_oracle(spec: OracleSpec, max_ancillas: Optional[int] = None) -> CircuitGadget:
    """
    Marking oracle |x, 0..0, t> -> |x, 0..0, t XOR phi'(x)>.

    Each clause value is computed into its own ancilla, a multi-controlled X
    over all ancillas (and the extra qubit) flips the target, then the clause
    ancillas are uncomputed in reverse.

    Raises:
        ResourceLimitError: More clauses than the ancilla budget
    """
    budget = settings.MAX_ANCILLAS if max_ancillas is None else max_ancillas
    formula = spec.formula
    m = formula.num_clauses
    if m > budget:
        raise ResourceLimitError(f"Formula needs {m} clause ancillas, budget is {budget}")

    n_search = spec.num_search_qubits
    ancillas = [n_search + c for c in range(m)]
    target = n_search + m

    compute: List[GateOp] = []
    for clause, ancilla in zip(formula.clauses, ancillas):
        compute.extend(_clause_ops(clause, ancilla))
    controls = tuple(ancillas) + ((formula.num_vars,) if spec.extra_qubit else ())
    final = GateOp(pauli_x(), target, controls)
    uncompute = [op.adjoint() for op in reversed(compute)]

    logger.debug(f"Marking oracle: {n_search} search qubits, {m} ancillas, target {target}")
    return CircuitGadget(
        total_qubits=target + 1,
        ops=tuple(compute + [final] + uncompute),
        name="marking_oracle",
        target_qubit=target,
        search_qubits=tuple(range(n_search)),
    )


def marking_to_phase(marking: CircuitGadget) -> CircuitGadget:
    """Wrap the target in X.H before and H.X after: |x> -> (-1)^phi'(x) |x>."""
    if marking.target_qubit is None:
        raise ValueError(f"Gadget {marking.name} has no target qubit")
    t = marking.target_qubit
    before = (GateOp(pauli_x(), t), GateOp(hadamard(), t))
    after = (GateOp(hadamard(), t), GateOp(pauli_x(), t))
    return replace(marking, ops=before + marking.ops + after, name="phase_oracle")


def build_phase_oracle(spec: OracleSpec, max_ancillas: Optional[int] = None) -> CircuitGadget:
    return marking_to_phase(build_marking_oracle(spec, max_ancillas))


def build_zero_reflection(num_qubits: int, total_qubits: Optional[int] = None) -> CircuitGadget:
    """
    2|0><0| - I on qubits 0..num_qubits-1.

    X on every qubit, multi-controlled Z, X again gives I - 2|0><0|; RY(2pi)
    on qubit 0 is -I and fixes the sign, which matters once the gadget is
    controlled.
    """
    flips = tuple(GateOp(pauli_x(), q) for q in range(num_qubits))
    mcz = GateOp(pauli_z(), num_qubits - 1, tuple(range(num_qubits - 1)))
    fix = GateOp(ry(2.0 * math.pi), 0)
    return CircuitGadget(
        total_qubits=total_qubits or num_qubits,
        ops=flips + (mcz,) + flips + (fix,),
        name="zero_reflection",
        search_qubits=tuple(range(num_qubits)),
    )


def _grover_from(oracle: CircuitGadget, prep: CircuitGadget, name: str) -> CircuitGadget:
    total = oracle.total_qubits
    reflection = build_zero_reflection(prep.total_qubits, total)
    ops = oracle.ops + prep.adjoint().ops + reflection.ops + prep.ops
    return CircuitGadget(
        total_qubits=total,
        ops=ops,
        name=name,
        target_qubit=oracle.target_qubit,
        search_qubits=prep.search_qubits,
    )


def build_weighted_grover(
    nw: NormalizedWeights, spec: OracleSpec, max_ancillas: Optional[int] = None
) -> CircuitGadget:
    """
    Weighted Grover operator WG = Rot (2|0><0| - I) Rot^dagger O.

    Equals (2|phi><phi| - I) O with |phi> = Rot|0>; ancillas end where they started.
    """
    if not spec.extra_qubit:
        raise ValueError("Weighted Grover operator is defined over phi' (extra_qubit=True)")
    if nw.num_vars != spec.formula.num_vars:
        raise ValueError(f"Weights cover {nw.num_vars} variables, formula has {spec.formula.num_vars}")
    return _grover_from(build_phase_oracle(spec, max_ancillas), build_rot(nw, True), "weighted_grover")


def build_grover(spec: OracleSpec, max_ancillas: Optional[int] = None) -> CircuitGadget:
    """Unweighted Grover operator G = H (2|0><0| - I) H O over the search register."""
    k = spec.num_search_qubits
    prep = CircuitGadget(
        total_qubits=k,
        ops=tuple(GateOp(hadamard(), q) for q in range(k)),
        name="hadamards",
        search_qubits=tuple(range(k)),
    )
    return _grover_from(build_phase_oracle(spec, max_ancillas), prep, "grover")


def _swap_ops(a: int, b: int) -> List[GateOp]:
    x = pauli_x()
    return [GateOp(x, b, (a,)), GateOp(x, a, (b,)), GateOp(x, b, (a,))]


def build_qft(t: int) -> CircuitGadget:
    """
    QFT on t qubits: |j> -> 2^(-t/2) sum_k e^(2 pi i j k / 2^t) |k>.

    Includes the terminal swap network, so bit q of k sits on qubit q.
    """
    if not 1 <= t <= settings.MAX_QFT_BITS:
        raise ValueError(f"QFT size must be between 1 and {settings.MAX_QFT_BITS}, got {t}")
    ops: List[GateOp] = []
    for a in reversed(range(t)):
        ops.append(GateOp(hadamard(), a))
        for b in reversed(range(a)):
            ops.append(GateOp(phase(math.pi / (1 << (a - b))), a, (b,)))
    for q in range(t // 2):
        ops.extend(_swap_ops(q, t - 1 - q))
    return CircuitGadget(total_qubits=t, ops=tuple(ops), name="qft", search_qubits=tuple(range(t)))


def build_inverse_qft(t: int) -> CircuitGadget:
    return replace(build_qft(t).adjoint(), name="inverse_qft")


# =============================================================================
# Dense forms and the direct fast path
# =============================================================================

def rot_state(nw: Optional[NormalizedWeights], num_vars: int, with_extra: bool = True) -> np.ndarray:
    """
    Rot|0> as a real vector (uniform superposition when nw is None).

    Entry j is prod_i (cos or sin of theta_i / 2) over the bits of j.
    """
    thetas: Iterable[float] = nw.theta if nw is not None else [math.pi / 2.0] * num_vars
    vec = np.ones(1, dtype=np.float64)
    for theta in thetas:
        vec = np.concatenate([vec * math.cos(theta / 2.0), vec * math.sin(theta / 2.0)])
    if with_extra:
        s = 1.0 / math.sqrt(2.0)
        vec = np.concatenate([vec * s, vec * s])
    return vec


def rot_matrix(nw: NormalizedWeights, with_extra: bool = True) -> np.ndarray:
    """Kronecker product of the RY factors (and H); the last factor is qubit 0."""
    check_dense_qubits(nw.num_vars + int(with_extra), "Rot matrix")
    matrix = np.ones((1, 1), dtype=np.complex128)
    for theta in nw.theta:
        matrix = np.kron(ry(theta).matrix, matrix)
    if with_extra:
        matrix = np.kron(hadamard().matrix, matrix)
    return matrix


def _check_search_register(spec: OracleSpec) -> int:
    k = spec.num_search_qubits
    if k > settings.MAX_QUBITS:
        raise QubitLimitError(f"{k} search qubits exceed the cap of {settings.MAX_QUBITS}")
    return k


def weighted_grover_matrix(nw: Optional[NormalizedWeights], spec: OracleSpec) -> np.ndarray:
    """
    (2|phi><phi| - I) diag((-1)^phi'(x)) over the search register.

    With nw None, |phi> is the uniform superposition (unweighted G).
    """
    check_dense_qubits(_check_search_register(spec), "Weighted Grover matrix")
    phi = rot_state(nw, spec.formula.num_vars, spec.extra_qubit)
    signs = np.where(spec.phase_mask(), -1.0, 1.0)
    matrix = 2.0 * np.outer(phi, phi * signs) - np.diag(signs)
    return matrix.astype(np.complex128)


def apply_weighted_grover(
    state: StateVector,
    nw: Optional[NormalizedWeights],
    spec: OracleSpec,
    phi: Optional[np.ndarray] = None,
    iterations: int = 1,
) -> StateVector:
    """
    Apply WG (or G when nw is None) directly: phase flip on phi', then reflect about |phi>.

    Args:
        state: Search-register state, updated in place
        phi: Precomputed Rot|0> (optional)
        iterations: Number of applications
    """
    k = _check_search_register(spec)
    if state.num_qubits != k:
        raise ValueError(f"State has {state.num_qubits} qubits, search register has {k}")
    if phi is None:
        phi = rot_state(nw, spec.formula.num_vars, spec.extra_qubit)
    mask = spec.phase_mask()
    for _ in range(iterations):
        apply_phase_flip_where(state, mask)
        overlap = np.dot(phi, state.amps)
        state.amps *= -1.0
        state.amps += (2.0 * overlap) * phi
    return state


def prepare_rot_state(nw: Optional[NormalizedWeights], spec: OracleSpec) -> StateVector:
    """Rot|0> (or H|0>) as a StateVector on the search register."""
    k = _check_search_register(spec)
    return StateVector(k, rot_state(nw, spec.formula.num_vars, spec.extra_qubit).astype(np.complex128))
