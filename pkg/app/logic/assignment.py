"""
Assignments (worlds) over propositional variables.

Two orderings are in play:
- display / enumeration rank: X1 is the most significant bit ("101" = S,R,W)
- qubit basis index: X1 is qubit 0, the least significant bit
"""

from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple


@dataclass(frozen=True)
class Assignment:
    """A complete truth-value vector x over the variables of a formula"""

    bits: Tuple[bool, ...]

    @classmethod
    def from_bits(cls, bits: Iterable) -> "Assignment":
        return cls(tuple(bool(b) for b in bits))

    @classmethod
    def from_string(cls, text: str) -> "Assignment":
        """Parse a display string such as "101" (X1 leftmost)."""
        if any(ch not in "01" for ch in text):
            raise ValueError(f"Invalid assignment string: {text!r}")
        return cls(tuple(ch == "1" for ch in text))

    @classmethod
    def from_index(cls, index: int, num_vars: int) -> "Assignment":
        """Build from a qubit basis index (bit i is variable i)."""
        return cls(tuple(bool((index >> i) & 1) for i in range(num_vars)))

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def index(self) -> int:
        """Qubit basis index: variable i is bit i."""
        return sum(1 << i for i, b in enumerate(self.bits) if b)

    @property
    def rank(self) -> int:
        """Unsigned binary value with X1 as the most significant bit."""
        value = 0
        for b in self.bits:
            value = (value << 1) | int(b)
        return value

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def restrict(self, variables: Sequence[int]) -> "PartialAssignment":
        return PartialAssignment(tuple(variables), tuple(self.bits[v] for v in variables))

    def __str__(self) -> str:
        return self.to_string()


@dataclass(frozen=True)
class PartialAssignment:
    """Values for a subset Q of the variables, listed in query order"""

    variables: Tuple[int, ...]
    bits: Tuple[bool, ...]

    def __post_init__(self):
        if len(self.variables) != len(self.bits):
            raise ValueError("variables and bits must have the same length")

    @property
    def rank(self) -> int:
        value = 0
        for b in self.bits:
            value = (value << 1) | int(b)
        return value

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def as_dict(self) -> dict:
        return dict(zip(self.variables, self.bits))

    def __str__(self) -> str:
        return self.to_string()
