from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from models.models import CheckStatus, Verdict


def to_plain(value):
    """Recursively turn numpy values, tuples and enums into JSON-ready builtins."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


class CheckResult(BaseModel):
    name: str
    status: CheckStatus
    holds: Optional[bool] = None
    expected: bool = True
    verdict: Optional[Verdict] = None
    residual: Optional[float] = None
    failures: List[List[float]] = Field(default_factory=list)
    detail: Dict[str, Any] = Field(default_factory=dict)


class PointReport(BaseModel):
    point: List[float]
    error: Optional[str] = None
    data: Dict[str, Any] = Field(default_factory=dict)


class Report(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(1, alias="schema")
    name: str
    backend: str
    tolerance: float
    points: List[PointReport]
    checks: List[CheckResult]
    passed: bool
    exit_code: int

    def to_json(self):
        return self.model_dump_json(by_alias=True, indent=2)

    def summary(self):
        """Aligned plain-text table of the check outcomes."""
        rows = [
            {
                "check": c.name,
                "status": c.status.value,
                "verdict": c.verdict.value if c.verdict else "-",
                "expected": c.expected,
                "residual": "-" if c.residual is None else f"{c.residual:.3e}",
                "failures": len(c.failures),
            }
            for c in self.checks
        ]
        table = pd.DataFrame(rows, columns=["check", "status", "verdict", "expected", "residual", "failures"])
        errors = sum(1 for p in self.points if p.error)
        footer = f"{self.name}: {'PASS' if self.passed else 'FAIL'} ({len(self.points)} points, {errors} errors)"
        return table.to_string(index=False) + "\n" + footer
