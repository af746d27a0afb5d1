"""
Weighted DIMACS Parsing
Reads and writes CNF files extended with per-variable weight lines:

    c comment
    p cnf <n> <m>
    <lit> <lit> ... 0
    w <var> <w_pos> [<w_neg>]

Weight lines may appear anywhere after the header. A missing <w_neg> means
1 - <w_pos>; variables without a weight line get 0.5 / 0.5.
"""

import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from app.logic.formula import CnfFormula, Literal, WeightedFormula
from app.logic.weights import WeightTable

logger = logging.getLogger(__name__)

DEFAULT_WEIGHT = 0.5


class DimacsParseError(ValueError):
    """File was not in the expected format."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(prefix + message)


def _parse_int(token: str, line_number: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise DimacsParseError(f"expected an integer, got {token!r}", line_number) from None


def _parse_weight(token: str, line_number: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise DimacsParseError(f"expected a decimal weight, got {token!r}", line_number) from None
    if not math.isfinite(value):
        raise DimacsParseError(f"weight must be finite, got {token!r}", line_number)
    if value < 0:
        raise DimacsParseError(f"negative weight {token}", line_number)
    return value


def parse_weighted_dimacs(text: Union[str, bytes]) -> WeightedFormula:
    """
    Parse a weighted DIMACS document.

    Args:
        text: File contents (bytes are decoded as UTF-8)

    Returns:
        WeightedFormula with clauses in file order

    Raises:
        DimacsParseError: on any syntax or range violation
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            line_number = text[: e.start].count(b"\n") + 1
            raise DimacsParseError(f"invalid UTF-8 byte 0x{text[e.start]:02x}", line_number) from None

    num_vars: Optional[int] = None
    declared_clauses = 0
    clauses: List[Tuple[Literal, ...]] = []
    current: List[Literal] = []
    current_start = 0
    weights: Dict[int, Tuple[float, float]] = {}

    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        tokens = line.split()

        if tokens[0] == "p":
            if num_vars is not None:
                raise DimacsParseError("duplicate header", line_number)
            if len(tokens) != 4 or tokens[1] != "cnf":
                raise DimacsParseError("header must be 'p cnf <n> <m>'", line_number)
            num_vars = _parse_int(tokens[2], line_number)
            declared_clauses = _parse_int(tokens[3], line_number)
            if num_vars < 1:
                raise DimacsParseError("number of variables must be positive", line_number)
            if declared_clauses < 0:
                raise DimacsParseError("number of clauses must be non-negative", line_number)
            continue

        if num_vars is None:
            raise DimacsParseError("content before the 'p cnf' header", line_number)

        if tokens[0] == "w":
            if len(tokens) not in (3, 4):
                raise DimacsParseError("weight line must be 'w <var> <w_pos> [<w_neg>]'", line_number)
            var = _parse_int(tokens[1], line_number)
            if not 1 <= var <= num_vars:
                raise DimacsParseError(f"variable {var} out of range [1, {num_vars}]", line_number)
            if var in weights:
                raise DimacsParseError(f"duplicate weight line for variable {var}", line_number)
            w_pos = _parse_weight(tokens[2], line_number)
            if len(tokens) == 4:
                w_neg = _parse_weight(tokens[3], line_number)
            else:
                if w_pos > 1:
                    raise DimacsParseError(
                        f"w_pos {tokens[2]} > 1 requires an explicit w_neg", line_number
                    )
                w_neg = 1.0 - w_pos
            if w_pos + w_neg <= 0:
                raise DimacsParseError(f"weights of variable {var} sum to zero", line_number)
            weights[var] = (w_pos, w_neg)
            continue

        for token in tokens:
            value = _parse_int(token, line_number)
            if value == 0:
                if not current:
                    raise DimacsParseError("empty clause", line_number)
                clauses.append(tuple(current))
                current = []
                continue
            if abs(value) > num_vars:
                raise DimacsParseError(
                    f"variable {abs(value)} out of range [1, {num_vars}]", line_number
                )
            if not current:
                current_start = line_number
            current.append(Literal.from_dimacs(value))

    if num_vars is None:
        raise DimacsParseError("missing 'p cnf' header")
    if current:
        raise DimacsParseError("clause not terminated by 0", current_start)
    if len(clauses) != declared_clauses:
        raise DimacsParseError(
            f"header declares {declared_clauses} clauses, found {len(clauses)}"
        )

    w_pos = tuple(weights.get(v, (DEFAULT_WEIGHT, DEFAULT_WEIGHT))[0] for v in range(1, num_vars + 1))
    w_neg = tuple(weights.get(v, (DEFAULT_WEIGHT, DEFAULT_WEIGHT))[1] for v in range(1, num_vars + 1))
    logger.debug(f"Parsed {num_vars} variables, {len(clauses)} clauses, {len(weights)} weight lines")
    return WeightedFormula(
        formula=CnfFormula(num_vars=num_vars, clauses=tuple(clauses)),
        weights=WeightTable(w_pos=w_pos, w_neg=w_neg),
    )


def serialize_weighted_dimacs(wf: WeightedFormula, comment: Optional[str] = None) -> str:
    """Write a weighted DIMACS document with explicit w_pos and w_neg for every variable."""
    lines = []
    if comment:
        lines.extend(f"c {part}" for part in comment.splitlines())
    lines.append(f"p cnf {wf.num_vars} {wf.formula.num_clauses}")
    for clause in wf.formula.dimacs_clauses():
        lines.append(" ".join(str(v) for v in clause) + " 0")
    for i, (wp, wn) in enumerate(zip(wf.weights.w_pos, wf.weights.w_neg), start=1):
        lines.append(f"w {i} {wp!r} {wn!r}")
    return "\n".join(lines) + "\n"


def load_weighted_dimacs(path: Union[str, Path]) -> WeightedFormula:
    """Read and parse a weighted DIMACS file from disk."""
    return parse_weighted_dimacs(Path(path).read_bytes())
