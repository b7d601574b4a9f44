"""Machine-readable verification records."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return math.isfinite(self.residual) and self.residual <= self.tolerance

    def to_dict(self) -> dict:
        return {"check": self.name, "residual": self.residual,
                "tolerance": self.tolerance, "pass": self.passed, "detail": self.detail}


@dataclass
class Report:
    command: str = ""
    checks: List[Check] = field(default_factory=list)
    goldens: List[Dict[str, Any]] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    data: Dict[str, Any] = field(default_factory=dict)

    def add(self, name: str, residual: float, tolerance: float, detail: str = "") -> Check:
        c = Check(name, float(residual), float(tolerance), detail)
        self.checks.append(c)
        return c

    def golden(self, name: str, computed, expected, tolerance: float) -> Check:
        computed, expected = complex(computed), complex(expected)
        self.goldens.append({"name": name, "computed": [computed.real, computed.imag],
                             "expected": [expected.real, expected.imag]})
        return self.add(f"golden {name}", abs(computed - expected), tolerance)

    def extend(self, other: "Report", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.residual, c.tolerance, c.detail))
        self.goldens.extend(other.goldens)
        self.timings.update({prefix + k: v for k, v in other.timings.items()})

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def max_residual(self) -> Optional[float]:
        return max((c.residual for c in self.checks), default=None)

    def to_dict(self) -> dict:
        return {"command": self.command, "pass": self.passed,
                "records": [c.to_dict() for c in self.checks],
                "goldens": self.goldens, "timings": self.timings, "data": self.data}

    def to_text(self) -> str:
        lines = [f"# {self.command}"] if self.command else []
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            line = f"{flag}  {c.name}: residual {c.residual:.3e} (tol {c.tolerance:.1e})"
            if c.detail:
                line += f"  [{c.detail}]"
            lines.append(line)
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def as_plain(obj):
    """Dataclass or nested structure to JSON-friendly values."""
    if hasattr(obj, "__dataclass_fields__"):
        return as_plain(asdict(obj))
    if isinstance(obj, dict):
        return {k: as_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [as_plain(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj
