"""JSON reports: a stable schema, 17 significant digits, metadata kept apart."""

from __future__ import annotations

import enum
import json
import math
import platform
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SCHEMA_VERSION = "neumannkit.report/1"
PROVENANCE = ("PAPER", "TRIVIAL", "DERIVED")

_MARK = "\x00num:"
_MARKED = re.compile(r'"\\u0000num:([^"]*)"')


def _prepare(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return _MARK + format(x, ".17g") if math.isfinite(x) else None
    if isinstance(obj, np.ndarray):
        return [_prepare(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _prepare(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_prepare(v) for v in obj]
    if hasattr(obj, "to_json"):
        return _prepare(obj.to_json())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int | None = 1) -> str:
    """JSON text with every float written to 17 significant digits (non-finite as null)."""
    text = json.dumps(_prepare(obj), indent=indent, sort_keys=False, ensure_ascii=False)
    return _MARKED.sub(r"\1", text)


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj) + "\n")


def environment() -> dict:
    import scipy
    import shapely
    return {"python": platform.python_version(), "numpy": np.__version__, "scipy": scipy.__version__,
            "shapely": shapely.__version__, "machine": platform.machine()}


@dataclass
class Entry:
    """One verified claim."""

    id: str
    criterion: int | None  # None for supplementary claims
    anchor: str
    provenance: str
    passed: bool
    measured: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    seconds: float = 0.0
    error: str | None = None

    def __post_init__(self):
        if self.provenance not in PROVENANCE:
            raise ValueError(f"unknown provenance tag {self.provenance!r}")

    def to_json(self) -> dict:
        out = {"id": self.id, "criterion": self.criterion, "anchor": self.anchor,
               "provenance": self.provenance, "passed": bool(self.passed),
               "measured": self.measured, "expected": self.expected}
        if self.error:
            out["error"] = self.error
        return out


@dataclass
class VerificationReport:
    suite: str
    entries: list[Entry]
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def failures(self) -> list[Entry]:
        return [e for e in self.entries if not e.passed]

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION, "suite": self.suite, "passed": self.passed,
            "entries": [e.to_json() for e in self.entries],
            # everything below varies between runs and is excluded from comparisons
            "metadata": {"environment": environment(), "seconds": {e.id: e.seconds for e in self.entries},
                         **self.timings},
        }
