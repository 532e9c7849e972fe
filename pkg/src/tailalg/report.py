"""Machine-readable verification reports shared by every module."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, List, Optional

SCHEMA_VERSION = 1


@dataclass
class Report:
    operation: str
    inputs: dict
    seed: Optional[int] = None
    violations: List[dict] = field(default_factory=list)
    payload: dict = field(default_factory=dict)
    caveats: List[str] = field(default_factory=list)
    surrogate: bool = False

    @property
    def status(self) -> str:
        if self.violations:
            return "fail"
        if self.surrogate:
            if not self.caveats:
                raise ValueError("surrogate report without caveat")
            return "surrogate"
        return "pass"

    @property
    def ok(self) -> bool:
        return not self.violations

    def violate(self, check: str, **detail: Any) -> None:
        self.violations.append({"check": check, **detail})

    def to_dict(self) -> dict:
        return {
            "schemaVersion": SCHEMA_VERSION,
            "operation": self.operation,
            "inputs": self.inputs,
            "seed": self.seed,
            "status": self.status,
            "violations": self.violations,
            "payload": self.payload,
            "caveats": self.caveats,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)
