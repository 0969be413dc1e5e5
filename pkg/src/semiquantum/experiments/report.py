"""Scenario reports: named comparisons with tolerances and provenance."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

# where an expected value comes from
PROVENANCE = ("closed-form", "oracle", "bound")
RELATIONS = ("eq", "ge", "le")


@dataclass(frozen=True)
class Comparison:
    """computed vs expected under ``relation``:
    eq: |computed - expected| <= tolerance; ge: computed >= expected - tolerance;
    le: computed <= expected + tolerance."""

    name: str
    computed: float
    expected: float
    tolerance: float
    provenance: str
    relation: str = "eq"

    def __post_init__(self):
        if self.provenance not in PROVENANCE:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")
        object.__setattr__(self, "computed", float(self.computed))
        object.__setattr__(self, "expected", float(self.expected))

    @property
    def abs_error(self):
        return abs(self.computed - self.expected)

    @property
    def passed(self):
        if not math.isfinite(self.computed):
            return False
        if self.relation == "eq":
            return self.abs_error <= self.tolerance
        if self.relation == "ge":
            return self.computed >= self.expected - self.tolerance
        return self.computed <= self.expected + self.tolerance

    def as_dict(self):
        return {
            "name": self.name,
            "computed": self.computed,
            "expected": self.expected,
            "relation": self.relation,
            "tolerance": self.tolerance,
            "provenance": self.provenance,
            "abs_error": self.abs_error,
            "passed": self.passed,
        }


@dataclass
class ScenarioReport:
    scenario: str
    inputs: dict
    quantum: dict = field(default_factory=dict)
    semiquantum: dict = field(default_factory=dict)
    comparisons: list = field(default_factory=list)
    wall_time: float = 0.0
    # sampled fields produced along the way, emitted separately on request
    fields: dict = field(default_factory=dict, repr=False)

    def check(self, name, computed, expected, tolerance, provenance, relation="eq"):
        self.comparisons.append(Comparison(name, computed, expected, tolerance, provenance, relation))

    @property
    def passed(self):
        return all(c.passed for c in self.comparisons)

    def failures(self):
        return [c for c in self.comparisons if not c.passed]

    def as_dict(self, include_time=True):
        out = {
            "scenario": self.scenario,
            "inputs": self.inputs,
            "quantum": self.quantum,
            "semiquantum": self.semiquantum,
            "comparisons": [c.as_dict() for c in self.comparisons],
            "passed": self.passed,
        }
        if include_time:
            out["wall_time_s"] = self.wall_time
        return out
