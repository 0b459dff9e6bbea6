"""The shared result record for every inequality evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping


@dataclass(frozen=True)
class CheckReport:
    """One inequality evaluation: lhs vs rhs with an auditable verdict.

    The single verdict rule used package-wide:

        holds  <=>  margin >= -tol * max(1, |rhs|),   margin = rhs - lhs.

    ``instance`` carries whatever identifies the evaluation (seed,
    dimension, q, k, gauge, ...) as plain JSON-able values.
    """

    name: str
    lhs: float
    rhs: float
    margin: float
    tol: float
    holds: bool
    instance: Mapping[str, Any] = field(default_factory=dict)

    @classmethod
    def from_sides(
        cls,
        name: str,
        lhs: float,
        rhs: float,
        tol: float,
        instance: Mapping[str, Any] | None = None,
    ) -> "CheckReport":
        lhs = float(lhs)
        rhs = float(rhs)
        margin = rhs - lhs
        return cls(
            name=name,
            lhs=lhs,
            rhs=rhs,
            margin=margin,
            tol=float(tol),
            holds=margin >= -float(tol) * max(1.0, abs(rhs)),
            instance=dict(instance or {}),
        )

    @property
    def rel_margin(self) -> float:
        """Margin scaled by max(1, |rhs|); what thresholds compare against."""
        return self.margin / max(1.0, abs(self.rhs))

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "tol": self.tol,
            "holds": self.holds,
            "instance": dict(self.instance),
        }
