"""Edge-perspective degree distributions and ensemble rate bookkeeping."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .poly import Poly

SUM_TOL = 1e-9
PRUNE_TOL = 1e-8


class InvalidChannelError(ValueError):
    pass


@dataclass(frozen=True)
class DegreeDistribution:
    """Map from node degree ``d`` to the fraction of edges on degree-``d`` nodes.

    The polynomial form puts ``coeffs[d]`` on ``x**(d-1)``.
    """

    coeffs: dict[int, float]
    side: str = "lambda"

    def __post_init__(self):
        if self.side not in ("lambda", "rho"):
            raise ValueError(f"side must be 'lambda' or 'rho', got {self.side!r}")
        clean = {int(d): float(v) for d, v in sorted(self.coeffs.items())}
        object.__setattr__(self, "coeffs", clean)

    @property
    def max_degree(self) -> int:
        return max(self.coeffs) if self.coeffs else 0

    @property
    def min_degree(self) -> int:
        return min(self.coeffs) if self.coeffs else 0

    @property
    def total(self) -> float:
        return float(sum(self.coeffs.values()))

    def derivative_at_one(self) -> float:
        """``d/dx`` of the polynomial at ``x = 1``, e.g. rho'(1)."""
        return float(sum(v * (d - 1) for d, v in self.coeffs.items()))

    def renormalized(self) -> "DegreeDistribution":
        s = self.total
        if s <= 0:
            raise ValueError("cannot renormalize a distribution with nonpositive mass")
        return DegreeDistribution({d: v / s for d, v in self.coeffs.items()}, self.side)

    def pruned(self, tol: float = PRUNE_TOL) -> "DegreeDistribution":
        kept = {d: max(v, 0.0) for d, v in self.coeffs.items() if v >= tol}
        return DegreeDistribution(kept, self.side).renormalized()

    def to_json(self) -> dict:
        return {"side": self.side, "coeffs": {str(d): v for d, v in self.coeffs.items()}}

    @classmethod
    def from_json(cls, obj) -> "DegreeDistribution":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls({int(k): float(v) for k, v in obj["coeffs"].items()}, obj.get("side", "lambda"))

    @classmethod
    def from_poly(cls, p: Poly, side: str = "lambda") -> "DegreeDistribution":
        return cls({k + 1: float(c) for k, c in enumerate(p.coeffs) if c != 0.0}, side)

    def format_poly(self, digits: int = 5) -> str:
        terms = []
        for d, v in self.coeffs.items():
            k = d - 1
            mono = "1" if k == 0 else ("x" if k == 1 else f"x^{k}")
            terms.append(f"{v:.{digits}g}*{mono}")
        return " + ".join(terms) if terms else "0"


@dataclass(frozen=True)
class Ensemble:
    lam: DegreeDistribution
    rho: DegreeDistribution


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def dd_to_poly(d: DegreeDistribution) -> Poly:
    if not d.coeffs:
        return Poly([0.0])
    c = np.zeros(d.max_degree)
    for deg, v in d.coeffs.items():
        c[deg - 1] = v
    return Poly(c)


def inv_avg(d: DegreeDistribution) -> float:
    """Sum of ``coeffs[d] / d``, the reciprocal of the average node degree."""
    return float(sum(v / deg for deg, v in d.coeffs.items()))


def rate(e: Ensemble) -> float:
    return 1.0 - inv_avg(e.rho) / inv_avg(e.lam)


def capacity_gap(rate_value: float, epsilon: float) -> float:
    if not 0.0 < epsilon < 1.0:
        raise InvalidChannelError(f"erasure probability must lie in (0, 1), got {epsilon}")
    return 1.0 - rate_value / (1.0 - epsilon)


def validate(d: DegreeDistribution, tol: float = SUM_TOL) -> ValidationReport:
    report = ValidationReport()
    if not d.coeffs:
        report.violations.append("empty distribution")
        return report
    for deg, v in d.coeffs.items():
        if deg < 2:
            report.violations.append(f"degree {deg} < 2")
        if v < 0:
            report.violations.append(f"negative fraction {v} at degree {deg}")
    s = d.total
    if abs(s - 1.0) > tol:
        report.violations.append(f"fractions sum to {s:.12g}, not 1")
    return report
