"""Three-valued logical assessment of a case under defeaters.

Every node is assessed TRUE, FALSE, or UNSUPPORTED, bottom-up over the
DAG.  Reasoning steps are material implications whose antecedent is the
conjunction of side-claim and subclaims, so a FALSE antecedent never makes
a parent FALSE (that would be denying the antecedent); it merely leaves it
UNSUPPORTED.  FALSE enters an argument only through exact defeaters and
disjunctive decompositions.

Defeaters challenge the claim they affect: a defeater assessed FALSE is
refuted and exonerates the affected claim (assessed as if the defeater
were absent); one assessed TRUE or UNSUPPORTED demotes the affected claim
to UNSUPPORTED, overriding its supporting steps.  An exact defeater
instead forces the target to the logical negation of its own assessment,
which is what makes eliminative argumentation work.

Residual-doubt leaves are consciously accepted doubts: steps above them
evaluate over the remaining antecedents and the bypass is recorded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from . import measures as cm
from .model import (
    Assessment,
    Block,
    BlockKind,
    CaseGraph,
    Claim,
    Defeater,
    DefeaterStatus,
    Evidence,
    Exactness,
    Mode,
    Role,
    StructuralFinding,
    Subcase,
    affected_claim,
    structural_check,
)

TRUE = Assessment.TRUE
FALSE = Assessment.FALSE
UNSUPPORTED = Assessment.UNSUPPORTED

#: Statuses excluded from propagation: addressed defeaters are retained as
#: comments, residual ones are accepted doubts tracked by the risk ledger.
INERT_STATUSES = (DefeaterStatus.ADDRESSED, DefeaterStatus.RESIDUAL)


class PreconditionViolated(Exception):
    """An operation was invoked on a case that fails its precondition."""

    def __init__(self, message: str, findings: list[StructuralFinding] = ()):  # type: ignore[assignment]
        self.findings = list(findings)
        super().__init__(message)


@dataclass(frozen=True)
class LeafInputs:
    """Assessment inputs at the leaves, plus per-step human concurrence.

    Evidence acceptance and subcase assessments default to what the graph
    declares; assumptions default to asserted (TRUE); concurrence defaults
    to False because it is a judgment the tool cannot make.
    """

    evidence_accepted: Mapping[str, bool] = field(default_factory=dict)
    assumption_asserted: Mapping[str, bool] = field(default_factory=dict)
    subcase_assessed: Mapping[str, Assessment] = field(default_factory=dict)
    concurrence: Mapping[str, bool] = field(default_factory=dict)
    concur_all: bool = False

    def concurred(self, block_id: str) -> bool:
        return self.concur_all or bool(self.concurrence.get(block_id, False))

    def accepted(self, e: Evidence) -> bool:
        return bool(self.evidence_accepted.get(e.id, e.accepted))

    def asserted(self, claim_id: str) -> bool:
        return bool(self.assumption_asserted.get(claim_id, True))

    def subcase_value(self, s: Subcase) -> Assessment:
        v = self.subcase_assessed.get(s.id, s.assessed)
        return UNSUPPORTED if v is None else Assessment(v)


@dataclass(frozen=True)
class AssessmentMap:
    """Per-node verdicts with the cause of each, plus evaluation warnings."""

    values: Mapping[str, Assessment]
    causes: Mapping[str, str]
    bypassed: frozenset
    warnings: tuple

    def value(self, node_id: str) -> Assessment:
        return self.values[node_id]


_BYPASS = object()  # internal marker for residual-doubt leaves


def _negate(v: Assessment) -> Assessment:
    if v is TRUE:
        return FALSE
    if v is FALSE:
        return TRUE
    return UNSUPPORTED


def assess_validity(g: CaseGraph, inputs: Optional[LeafInputs] = None) -> AssessmentMap:
    """Assess every node of a structurally clean case.

    Raises PreconditionViolated when structural_check reports findings.
    The result is a pure function of (graph, inputs) and independent of
    declaration order; shared subclaims are evaluated once.
    """
    inputs = inputs or LeafInputs()
    findings = structural_check(g)
    if findings:
        raise PreconditionViolated(
            f"case has {len(findings)} structural finding(s); fix them before assessing validity",
            findings,
        )

    overriders: dict[str, list[Defeater]] = {}
    for d in g.defeaters():
        if d.status in INERT_STATUSES:
            continue
        overriders.setdefault(affected_claim(g, d), []).append(d)

    memo: dict[str, object] = {}
    causes: dict[str, str] = {}
    bypassed: set[str] = set()
    warnings: list[str] = []

    def combine_steps(node_id: str) -> Assessment:
        # Each supporting step is an independent deductive route: any step
        # that establishes the claim suffices; a standing refutation (from a
        # disjunctive decomposition) stands unless another route proves it,
        # which is a genuine contradiction and stays contested.
        vals = [value(b) for b in g.supports[node_id]]
        if TRUE in vals and FALSE in vals:
            warnings.append(
                f"{node_id}: one supporting step proves the claim while another refutes it; "
                "assessed UNSUPPORTED"
            )
            return UNSUPPORTED
        if TRUE in vals:
            return TRUE
        if FALSE in vals:
            return FALSE
        return UNSUPPORTED

    def step_value(b: Block) -> Assessment:
        side = TRUE
        if b.sideclaim is not None:
            v = value(b.sideclaim)
            if v is _BYPASS:
                bypassed.add(b.sideclaim)
                v = TRUE
            side = v
        if b.kind is BlockKind.INCORPORATION:
            e = g.nodes[b.subclaims[0]]
            assert isinstance(e, Evidence)
            ok = inputs.accepted(e) and inputs.concurred(b.id) and side is TRUE
            return TRUE if ok else UNSUPPORTED
        antecedents = []
        for sub in b.subclaims:
            v = value(sub)
            if v is _BYPASS:
                bypassed.add(sub)
                continue
            antecedents.append(v)
        if b.mode is Mode.DISJUNCTIVE:
            if side is not TRUE:
                return UNSUPPORTED
            if not antecedents:
                warnings.append(f"{b.id}: all disjuncts are bypassed residual doubts")
                return UNSUPPORTED
            if TRUE in antecedents:
                return TRUE
            if all(v is FALSE for v in antecedents):
                return FALSE
            return UNSUPPORTED
        # conjunctive: the antecedent is side-claim AND subclaims; a FALSE
        # conjunct must not refute the parent (denying the antecedent)
        if side is TRUE and all(v is TRUE for v in antecedents):
            return TRUE
        return UNSUPPORTED

    def own_value(node_id: str) -> tuple:
        n = g.nodes[node_id]
        if isinstance(n, Claim):
            if n.role is Role.ASSUMPTION:
                if g.supports.get(node_id):
                    warnings.append(
                        f"{node_id}: assumption has supporting blocks; they are ignored"
                    )
                cause = "override" if node_id in inputs.assumption_asserted else "from-leaf"
                return (TRUE if inputs.asserted(node_id) else UNSUPPORTED), cause
            if n.role is Role.RESIDUAL:
                return _BYPASS, "residual-bypass"
            if not g.supports.get(node_id):
                return UNSUPPORTED, "from-leaf"
            return combine_steps(node_id), "from-step"
        if isinstance(n, Evidence):
            cause = "override" if node_id in inputs.evidence_accepted else "from-leaf"
            return (TRUE if inputs.accepted(n) else UNSUPPORTED), cause
        if isinstance(n, Subcase):
            cause = "override" if node_id in inputs.subcase_assessed else "from-leaf"
            return inputs.subcase_value(n), cause
        if isinstance(n, Block):
            return step_value(n), "from-step"
        assert isinstance(n, Defeater)
        if g.supports.get(node_id):
            computed = combine_steps(node_id)
            if n.status is DefeaterStatus.REFUTED and computed is not FALSE:
                warnings.append(
                    f"{node_id}: declared refuted but its subcase assesses {computed.value}; "
                    "the computed value wins"
                )
            elif n.status is DefeaterStatus.SUSTAINED and computed is not TRUE:
                warnings.append(
                    f"{node_id}: declared sustained but its subcase assesses {computed.value}; "
                    "the computed value wins"
                )
            return computed, "from-step"
        # no subcase: the declared status records the human investigation outcome
        if n.status is DefeaterStatus.REFUTED:
            return FALSE, "from-leaf"
        if n.status is DefeaterStatus.SUSTAINED:
            return TRUE, "from-leaf"
        return UNSUPPORTED, "from-leaf"

    def value(node_id: str):
        if node_id in memo:
            return memo[node_id]
        base, cause = own_value(node_id)
        challengers = overriders.get(node_id, ())
        if challengers:
            exact = [d for d in challengers if d.exactness is Exactness.EXACT]
            exploratory = sorted(
                (d for d in challengers if d.exactness is Exactness.EXPLORATORY),
                key=lambda d: d.id,
            )
            if exact:
                x = exact[0]
                if g.supports.get(node_id):
                    warnings.append(
                        f"{node_id}: own subcase is ignored while exact defeater {x.id} applies"
                    )
                vx = value(x.id)
                base = UNSUPPORTED if vx is UNSUPPORTED else _negate(vx)
                cause = f"from-defeater({x.id})"
            active = []
            refuted = []
            for d in exploratory:
                (refuted if value(d.id) is FALSE else active).append(d)
            if active:
                base = UNSUPPORTED
                cause = f"from-defeater({active[0].id})"
            elif refuted and not exact:
                cause = f"exonerated({refuted[0].id})"
        memo[node_id] = base
        causes[node_id] = cause
        return base

    final: dict[str, Assessment] = {}
    for node_id in g.ids():
        v = value(node_id)
        if v is _BYPASS:
            bypassed.add(node_id)
            final[node_id] = UNSUPPORTED
        else:
            final[node_id] = v  # type: ignore[assignment]

    return AssessmentMap(
        values=final,
        causes=dict(causes),
        bypassed=frozenset(bypassed),
        warnings=tuple(sorted(set(warnings))),
    )


@dataclass(frozen=True)
class ActiveDefeater:
    """A defeater currently calling part of the argument into question."""

    defeater: str
    affected: str
    assessment: Assessment
    diagnosis: str


DIAGNOSIS_SUSTAINED = "defeater sustained: revise the argument and possibly the system"
DIAGNOSIS_NEEDS_WORK = "defeater subcase needs more work"


def active_defeaters(g: CaseGraph, m: AssessmentMap) -> list[ActiveDefeater]:
    """Defeaters assessed TRUE or UNSUPPORTED, with response diagnosis.

    Addressed and residual-accepted defeaters are excluded; refuted ones
    (assessed FALSE) are inactive because they exonerate their target.
    """
    out = []
    for d in g.defeaters():
        if d.status in INERT_STATUSES:
            continue
        v = m.values[d.id]
        if v is FALSE:
            continue
        diagnosis = DIAGNOSIS_SUSTAINED if v is TRUE else DIAGNOSIS_NEEDS_WORK
        out.append(ActiveDefeater(d.id, affected_claim(g, d), v, diagnosis))
    return out


@dataclass(frozen=True)
class Soundness:
    sound: bool
    reasons: tuple


def soundness_gate(
    g: CaseGraph,
    m: Optional[AssessmentMap],
    inputs: Optional[LeafInputs] = None,
    base: float = cm.DEFAULT_BASE,
) -> Soundness:
    """The full gate: valid structure, TRUE top claim, no active defeaters,
    human concurrence on every step, and a recorded positive confirmation
    measure for every piece of evidence (Carnap's measure does not count).
    """
    inputs = inputs or LeafInputs()
    reasons: list[str] = []

    findings = structural_check(g)
    for f in findings:
        reasons.append(f"structural: {f.message}")

    if m is None and not findings:
        m = assess_validity(g, inputs)

    if m is not None and not findings:
        if g.top is None or m.values[g.top] is not TRUE:
            got = "missing" if g.top is None else m.values[g.top].value
            reasons.append(f"top claim is not assessed TRUE (got {got})")
        for a in active_defeaters(g, m):
            reasons.append(
                f"active defeater {a.defeater} ({a.assessment.value}) on {a.affected}: {a.diagnosis}"
            )

    for b in g.blocks():
        if not inputs.concurred(b.id):
            reasons.append(f"step {b.id} lacks human concurrence")

    for e in g.evidence():
        if e.elicitation is None:
            reasons.append(f"evidence {e.id} has no recorded confirmation assessment")
            continue
        results = [
            r
            for r in cm.available_measures(e.elicitation, base)
            if r.measure in ("keynes", "l_keynes", "good")
        ]
        if not results:
            reasons.append(f"evidence {e.id}: elicitation is insufficient to compute a measure")
        elif not any(r.value > 0 for r in results):
            reasons.append(f"evidence {e.id} has no positive confirmation measure")

    return Soundness(sound=not reasons, reasons=tuple(reasons))
