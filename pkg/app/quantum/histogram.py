"""
Measurement Histograms
Outcome counts from repeated shots, shared by the simulator, the algorithms
and every report.
"""

from typing import Dict, Iterable, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class Histogram(BaseModel):
    """
    Counts per outcome integer.

    For register measurements bit i of an outcome is the i-th measured qubit;
    labels print that bit leftmost, so a query over (X1, X2, X3) reads "101"
    the way a truth table does.
    """

    model_config = ConfigDict(frozen=True)

    num_bits: int = Field(..., ge=0, description="Width of the measured register")
    counts: Dict[int, int] = Field(default_factory=dict, description="Outcome -> count (zero counts omitted)")
    total: int = Field(..., ge=0, description="Number of shots")

    @model_validator(mode="after")
    def _check(self) -> "Histogram":
        size = 1 << self.num_bits
        for outcome, count in self.counts.items():
            if not 0 <= outcome < size:
                raise ValueError(f"Outcome {outcome} does not fit in {self.num_bits} bits")
            if count < 0:
                raise ValueError(f"Negative count for outcome {outcome}")
        if sum(self.counts.values()) != self.total:
            raise ValueError("Histogram counts must sum to total")
        return self

    @classmethod
    def from_counts(cls, counts: np.ndarray, num_bits: int) -> "Histogram":
        """Build from a dense count vector (index = outcome)."""
        counts = np.asarray(counts, dtype=np.int64)
        table = {int(i): int(c) for i, c in enumerate(counts) if c}
        return cls(num_bits=num_bits, counts=table, total=int(counts.sum()))

    @classmethod
    def from_outcomes(cls, outcomes: Iterable[int], num_bits: int) -> "Histogram":
        table: Dict[int, int] = {}
        for outcome in outcomes:
            table[int(outcome)] = table.get(int(outcome), 0) + 1
        return cls(num_bits=num_bits, counts=dict(sorted(table.items())), total=sum(table.values()))

    def merge(self, other: "Histogram") -> "Histogram":
        if other.num_bits != self.num_bits:
            raise ValueError("Cannot merge histograms of different widths")
        table = dict(self.counts)
        for outcome, count in other.counts.items():
            table[outcome] = table.get(outcome, 0) + count
        return Histogram(num_bits=self.num_bits, counts=dict(sorted(table.items())), total=self.total + other.total)

    def mode(self) -> int:
        """Most frequent outcome; ties go to the smaller outcome."""
        if not self.counts:
            raise ValueError("Mode of an empty histogram")
        return min(self.counts, key=lambda outcome: (-self.counts[outcome], outcome))

    def count(self, outcome: int) -> int:
        return self.counts.get(outcome, 0)

    def frequencies(self) -> Dict[int, float]:
        if self.total == 0:
            return {}
        return {outcome: count / self.total for outcome, count in sorted(self.counts.items())}

    def label(self, outcome: int) -> str:
        """Bit-string label with the first measured qubit leftmost."""
        return "".join(str((outcome >> i) & 1) for i in range(self.num_bits))

    def labelled_counts(self) -> Dict[str, int]:
        """Counts keyed by label, sorted by label."""
        return dict(sorted((self.label(o), c) for o, c in self.counts.items()))

    def dense(self) -> np.ndarray:
        out = np.zeros(1 << self.num_bits, dtype=np.int64)
        for outcome, count in self.counts.items():
            out[outcome] = count
        return out

    def to_tsv(self, as_bits: bool = True) -> str:
        """
        Tab-separated rows `outcome  count  frequency`, one per observed outcome.

        Args:
            as_bits: Print bit-string labels instead of integers
        """
        rows: List[str] = ["outcome\tcount\tfrequency"]
        items = sorted(self.counts.items(), key=lambda kv: self.label(kv[0]) if as_bits else kv[0])
        for outcome, count in items:
            key = self.label(outcome) if as_bits else str(outcome)
            rows.append(f"{key}\t{count}\t{count / self.total:.6f}")
        return "\n".join(rows) + "\n"
