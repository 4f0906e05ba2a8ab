"""Axiom reports: one record per named check, worst residual wins."""

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class AxiomCheck:
    name: str
    residual: float
    tolerance: float
    witness: Any = None
    detail: str = ""

    def __post_init__(self):
        if not self.residual >= 0:  # also rejects NaN
            object.__setattr__(self, "residual", float("inf"))

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self):
        return {
            "name": self.name,
            "status": self.status,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "witness": _plain(self.witness),
            "detail": self.detail,
        }


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "item"):
        return obj.item()
    return obj


@dataclass
class AxiomReport:
    checks: list = field(default_factory=list)

    def add(self, check: AxiomCheck):
        self.checks.append(check)
        return check

    def extend(self, other: "AxiomReport"):
        self.checks.extend(other.checks)
        return self

    def record(self, name, residual, tolerance, witness=None, detail=""):
        """Fold a measurement into the entry ``name``, keeping the worst residual.

        Used when an axiom is evaluated over many color tuples: the report keeps
        one entry per axiom with the offending tuple as witness.
        """
        for idx, old in enumerate(self.checks):
            if old.name == name:
                if residual - tolerance > old.residual - old.tolerance:
                    self.checks[idx] = AxiomCheck(name, residual, tolerance, witness, detail)
                return self.checks[idx]
        return self.add(AxiomCheck(name, residual, tolerance, witness, detail))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name) -> AxiomCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name):
        return any(c.name == name for c in self.checks)

    def names(self):
        return [c.name for c in self.checks]

    def max_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    def to_list(self):
        return [c.to_dict() for c in self.checks]
