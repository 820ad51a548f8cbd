"""Report and configuration records shared by the probe operations.

Verdicts are deliberately three-valued plus a resource marker:

    Proved               exhaustively decided at a finite level
    RefutedWithWitness   a concrete counterexample is attached
    EvidenceAtDepth      no counterexample up to the stated depth
    ResourceLimit        the probe did not fit in the node budget

Nothing here ever upgrades bounded evidence to a theorem; every report
carries the depths that were actually reached.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

PROVED = "Proved"
REFUTED = "RefutedWithWitness"
EVIDENCE = "EvidenceAtDepth"
RESOURCE = "ResourceLimit"

_VERDICTS = (PROVED, REFUTED, EVIDENCE, RESOURCE)


@dataclass(frozen=True)
class RunConfig:
    """Knobs shared by CLI commands and probe suites."""

    max_length: int = 8
    node_budget: int = 5_000_000
    d_bound: int = 4
    power_bound: int = 4
    t_max: int = 3
    abelian_bound: int = 6
    cache_dir: Optional[str] = None
    fmt: str = "text"
    seed: int = 0

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class DiagnosisReport:
    """Outcome of one bounded question about one solution."""

    question: str
    verdict: str
    witness: Optional[object] = None
    depth: dict = field(default_factory=dict)
    detail: Optional[str] = None

    def __post_init__(self):
        if self.verdict not in _VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")

    def to_json(self) -> dict:
        return {
            "question": self.question,
            "verdict": self.verdict,
            "witness": _plain(self.witness),
            "depth": _plain(self.depth),
            "detail": self.detail,
        }

    def render_text(self) -> str:
        bits = [f"{self.question}: {self.verdict}"]
        if self.witness is not None:
            bits.append(f"witness={json.dumps(_plain(self.witness))}")
        if self.depth:
            bits.append(
                "depth=" + ",".join(f"{k}={v}" for k, v in sorted(self.depth.items()))
            )
        if self.detail:
            bits.append(self.detail)
        return "  ".join(bits)


def _plain(obj):
    """Recursively convert tuples/sets/numpy scalars for JSON output."""
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_plain(v) for v in obj)
    if hasattr(obj, "item"):
        return obj.item()
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return str(obj)


def report_json(payload: dict, config: Optional[RunConfig] = None) -> str:
    """Deterministic JSON rendering with the run configuration embedded."""
    body = dict(payload)
    if config is not None:
        body["config"] = config.to_json()
    return json.dumps(_plain(body), sort_keys=True, indent=2) + "\n"
