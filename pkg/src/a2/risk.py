"""Residual-risk ledger: scoring, categorization, and the final gate.

Each consciously accepted residual doubt carries the likelihood of having
wrongly assessed it as residual and the normalized worst-case consequence
of being wrong; their product is the doubt's risk.  Risks are grouped into
human-assigned classes because similarity is a judgment, not an inference.

Severity levels:

* Significant -- an individual risk above the threshold for concern; it
  cannot be treated as residual and must be eliminated or mitigated.
* Minor -- individually below the threshold, but enough of a kind that
  accumulation must be managed explicitly (10 might be OK, 100 not).
* Manageable -- the class-level verdict that a class of minor risks is
  cumulatively below the threshold of concern.
* Negligible -- individually trivial and collectively below threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional

from .model import CaseGraph, DefeaterStatus, Role


class RiskCategory(str, Enum):
    SIGNIFICANT = "Significant"
    MINOR = "Minor"
    MANAGEABLE = "Manageable"
    NEGLIGIBLE = "Negligible"


@dataclass(frozen=True)
class ResidualEntry:
    node: str
    likelihood: float
    consequence: float
    class_label: Optional[str] = None

    @property
    def label(self) -> str:
        return self.class_label if self.class_label else self.node


@dataclass(frozen=True)
class RiskThresholds:
    individual: float = 0.01
    class_cumulative: float = 0.05
    negligible: float = 0.0005

    def __post_init__(self):
        if not 0 < self.negligible <= self.individual:
            raise ValueError("thresholds must satisfy 0 < negligible <= individual")
        if self.class_cumulative < self.individual:
            raise ValueError("class threshold must be >= individual threshold")


DEFAULT_THRESHOLDS = RiskThresholds()


def score_residual(e: ResidualEntry) -> float:
    """Risk of a residual doubt: likelihood of wrong assessment times its
    worst possible consequence, both on normalized [0,1] scales."""
    return e.likelihood * e.consequence


@dataclass(frozen=True)
class ClassVerdict:
    label: str
    total_risk: float
    manageable: bool
    entries: tuple


@dataclass(frozen=True)
class CategorizedRisks:
    categories: Mapping[str, RiskCategory]  # entry node id -> category
    risks: Mapping[str, float]  # entry node id -> risk
    classes: Mapping[str, ClassVerdict]


def categorize(entries: list, thresholds: RiskThresholds = DEFAULT_THRESHOLDS) -> CategorizedRisks:
    """Assign each entry a severity and each class a manageability verdict.

    An entry is Significant above the individual threshold; Negligible
    when both it and its class total are trivial; Minor otherwise.  A
    class is Manageable iff its cumulative risk is within the class
    threshold.
    """
    class_total: dict[str, float] = {}
    for e in entries:
        class_total[e.label] = class_total.get(e.label, 0.0) + score_residual(e)

    categories: dict[str, RiskCategory] = {}
    risks: dict[str, float] = {}
    by_class: dict[str, list] = {}
    for e in entries:
        risk = score_residual(e)
        risks[e.node] = risk
        by_class.setdefault(e.label, []).append(e.node)
        if risk > thresholds.individual:
            categories[e.node] = RiskCategory.SIGNIFICANT
        elif risk <= thresholds.negligible and class_total[e.label] <= thresholds.class_cumulative:
            categories[e.node] = RiskCategory.NEGLIGIBLE
        else:
            categories[e.node] = RiskCategory.MINOR

    classes = {
        label: ClassVerdict(
            label=label,
            total_risk=total,
            manageable=total <= thresholds.class_cumulative,
            entries=tuple(sorted(by_class[label])),
        )
        for label, total in sorted(class_total.items())
    }
    return CategorizedRisks(categories=categories, risks=risks, classes=classes)


@dataclass(frozen=True)
class GateResult:
    acceptable: bool
    offenders: tuple  # entry node ids and/or class labels


def final_gate(entries: list, thresholds: RiskThresholds = DEFAULT_THRESHOLDS) -> GateResult:
    """Acceptable iff nothing is Significant and every Minor entry sits in
    a Manageable class; at final assessment only negligible and
    minor-but-manageable residual risks may remain."""
    result = categorize(entries, thresholds)
    offenders: list[str] = []
    for node_id in sorted(result.categories):
        if result.categories[node_id] is RiskCategory.SIGNIFICANT:
            offenders.append(node_id)
    for label in sorted(result.classes):
        verdict = result.classes[label]
        if not verdict.manageable and any(
            result.categories[n] is RiskCategory.MINOR for n in verdict.entries
        ):
            offenders.append(f"class:{label}")
    return GateResult(acceptable=not offenders, offenders=tuple(offenders))


def collect_residual_entries(g: CaseGraph) -> tuple:
    """Entries for every residual-doubt leaf, plus findings for defeaters
    accepted as residual that still need likelihood/consequence scores."""
    entries = []
    pending = []
    for c in g.claims():
        if c.role is Role.RESIDUAL:
            entries.append(
                ResidualEntry(
                    node=c.id,
                    likelihood=c.likelihood,
                    consequence=c.consequence,
                    class_label=c.class_label,
                )
            )
    for d in g.defeaters():
        if d.status is DefeaterStatus.RESIDUAL:
            pending.append(
                f"defeater {d.id} is accepted as residual but has no risk entry; "
                "record it as a residual-doubt leaf with likelihood and consequence"
            )
    return entries, pending
