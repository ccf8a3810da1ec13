"""Human-readable, DOT, and JSON renderings of case evaluations.

All renderings are pure functions of (graph, inputs, config) and are
byte-deterministic: nodes are ordered by id and every template is fixed.
The JSON payload builders here are the same ones the HTTP service uses,
so report documents round-trip through the API types.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from . import measures as cm
from .confidence import (
    ConfidenceInput,
    ConfidenceMap,
    Method,
    propagate_confidence,
    structure_sensitivity_report,
)
from .model import (
    Assessment,
    Block,
    CaseGraph,
    Claim,
    Defeater,
    DefeaterStatus,
    Exactness,
    Role,
    structural_check,
)
from .risk import (
    CategorizedRisks,
    GateResult,
    RiskThresholds,
    categorize,
    collect_residual_entries,
    final_gate,
)
from .validity import (
    AssessmentMap,
    LeafInputs,
    Soundness,
    active_defeaters,
    assess_validity,
    soundness_gate,
)

# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CaseReport:
    title: str
    structural_findings: list
    assessment: Optional[AssessmentMap]
    active: list
    soundness: Soundness
    confidences: dict  # method value -> ConfidenceMap
    confidence_note: Optional[str]
    measures: dict  # evidence id -> (list[MeasureResult], list[ConsistencyFinding])
    risk_entries: list
    risk_result: Optional[CategorizedRisks]
    risk_gate: Optional[GateResult]
    risk_pending: list
    thresholds: RiskThresholds
    base: float
    lints: tuple


def has_confidence_inputs(g: CaseGraph, conf_input: Optional[ConfidenceInput]) -> bool:
    if conf_input and (
        conf_input.evidence_posterior
        or conf_input.assumption_prob
        or conf_input.residual_estimate
        or conf_input.subcase_confidence
        or conf_input.overrides
    ):
        return True
    for e in g.evidence():
        if e.posterior_useful is not None:
            return True
        if e.elicitation is not None and e.elicitation.posterior is not None:
            return True
    return any(True for _ in g.claims() if _.role is Role.ASSUMPTION)


def build_report(
    g: CaseGraph,
    leaf_inputs: Optional[LeafInputs] = None,
    conf_input: Optional[ConfidenceInput] = None,
    thresholds: Optional[RiskThresholds] = None,
    base: float = cm.DEFAULT_BASE,
    methods: tuple = (Method.PRODUCT, Method.DOUBTS),
    exploratory: bool = False,
) -> CaseReport:
    """Evaluate everything evaluable and collect it in one document."""
    leaf_inputs = leaf_inputs or LeafInputs()
    conf_input = conf_input or ConfidenceInput()
    thresholds = thresholds or RiskThresholds()

    findings = structural_check(g)
    assessment = None
    active: list = []
    if not findings:
        assessment = assess_validity(g, leaf_inputs)
        active = active_defeaters(g, assessment)
    verdict = soundness_gate(g, assessment, leaf_inputs, base)

    lints: list[str] = []
    if assessment is not None:
        lints.extend(assessment.warnings)

    confidences: dict = {}
    confidence_note = None
    if findings:
        confidence_note = "not evaluated (structural findings present)"
    elif not has_confidence_inputs(g, conf_input):
        confidence_note = "not evaluated (no confidence inputs recorded)"
    elif not verdict.sound and not exploratory:
        confidence_note = "not evaluated (case is not sound; re-run with the exploratory flag)"
    else:
        for method in methods:
            cmap = propagate_confidence(
                g, conf_input, method, exploratory=True, leaf_inputs=leaf_inputs
            )
            confidences[Method(method).value] = cmap
        if Method.PRODUCT in [Method(m) for m in methods]:
            sens = structure_sensitivity_report(g, conf_input)
            for leaf in sens.shared_leaves:
                lints.append(
                    f"leaf {leaf} is counted {dict(sens.leaf_multiset[g.top])[leaf]} times in the "
                    "top product (shared subclaim)"
                )
            for x in sens.excisions:
                if x.increases:
                    lints.append(
                        f"excising leaf {x.leaf} ({x.leaf_value:g}) would raise top confidence "
                        f"{sens.top_value:g} -> {x.top_without:g}"
                    )
            lints.extend(l for l in sens.lints if l not in lints)

    measures: dict = {}
    for e in g.evidence():
        if e.elicitation is None or e.elicitation.is_empty():
            measures[e.id] = ([], [])
        else:
            measures[e.id] = (
                cm.available_measures(e.elicitation, base),
                cm.cross_check(e.elicitation),
            )

    entries, pending = collect_residual_entries(g)
    risk_result = categorize(entries, thresholds) if entries else None
    risk_gate = final_gate(entries, thresholds) if entries else None

    return CaseReport(
        title=g.title,
        structural_findings=findings,
        assessment=assessment,
        active=active,
        soundness=verdict,
        confidences=confidences,
        confidence_note=confidence_note,
        measures=measures,
        risk_entries=entries,
        risk_result=risk_result,
        risk_gate=risk_gate,
        risk_pending=pending,
        thresholds=thresholds,
        base=base,
        lints=tuple(dict.fromkeys(lints)),
    )


# ---------------------------------------------------------------------------
# text rendering
# ---------------------------------------------------------------------------


def _fmt(v: float) -> str:
    if math.isinf(v):
        return "+inf" if v > 0 else "-inf"
    return f"{v:.6g}"


def render_text(r: CaseReport) -> str:
    lines: list[str] = []
    lines.append("SOUND" if r.soundness.sound else "NOT SOUND")
    lines.append(f'case: "{r.title}"')
    lines.append("")

    if r.structural_findings:
        lines.append("structural findings:")
        for f in r.structural_findings:
            lines.append(f"  - [{f.code}] {f.message}")
    else:
        lines.append("structural findings: none")
    lines.append("")

    if r.assessment is not None:
        lines.append("validity:")
        for node_id in sorted(r.assessment.values):
            v = r.assessment.values[node_id]
            cause = r.assessment.causes.get(node_id, "")
            suffix = " (residual, bypassed)" if node_id in r.assessment.bypassed else ""
            lines.append(f"  {node_id}: {v.value} [{cause}]{suffix}")
    else:
        lines.append("validity: not assessed (structural findings present)")
    lines.append("")

    if r.assessment is not None:
        if r.active:
            lines.append("active defeaters:")
            for a in r.active:
                lines.append(
                    f"  - {a.defeater} ({a.assessment.value}) calls {a.affected} into question: "
                    f"{a.diagnosis}"
                )
        else:
            lines.append("active defeaters: none")
        lines.append("")

    if not r.soundness.sound:
        lines.append("soundness blockers:")
        for reason in r.soundness.reasons:
            lines.append(f"  - {reason}")
        lines.append("")

    if r.confidences:
        for method_name in sorted(r.confidences):
            cmap = r.confidences[method_name]
            lines.append(f"confidence ({method_name}):")
            lines.append(f"  note: {cmap.caveat}")
            for node_id in sorted(cmap.values):
                lines.append(
                    f"  {node_id}: {_fmt(cmap.values[node_id])} ({cmap.provenance[node_id]})"
                )
            for lint in cmap.lints:
                lines.append(f"  lint: {lint}")
            lines.append("")
    else:
        lines.append(f"confidence: {r.confidence_note or 'not evaluated'}")
        lines.append("")

    lines.append(f"confirmation measures (base {_fmt(r.base)}):")
    if r.measures:
        for evidence_id in sorted(r.measures):
            results, findings = r.measures[evidence_id]
            if not results:
                lines.append(f"  {evidence_id}: no elicitation recorded")
                continue
            rendered = " ".join(f"{m.measure}={_fmt(m.value)}" for m in results)
            lines.append(f"  {evidence_id}: {rendered}")
            for finding in findings:
                lines.append(f"    inconsistent: {finding.message}")
    else:
        lines.append("  no evidence nodes")
    lines.append("")

    lines.append(
        "residual risks (individual {:g}, class {:g}, negligible {:g}):".format(
            r.thresholds.individual, r.thresholds.class_cumulative, r.thresholds.negligible
        )
    )
    if r.risk_result is not None:
        for node_id in sorted(r.risk_result.categories):
            category = r.risk_result.categories[node_id]
            lines.append(
                f"  {node_id}: risk {_fmt(r.risk_result.risks[node_id])} -> {category.value}"
            )
        for label in sorted(r.risk_result.classes):
            verdict = r.risk_result.classes[label]
            word = "Manageable" if verdict.manageable else "NOT manageable"
            lines.append(f"  class {label}: total {_fmt(verdict.total_risk)} -> {word}")
        assert r.risk_gate is not None
        if r.risk_gate.acceptable:
            lines.append("  gate: acceptable")
        else:
            lines.append("  gate: unacceptable (" + ", ".join(r.risk_gate.offenders) + ")")
    else:
        lines.append("  no residual doubts recorded")
    for pending in r.risk_pending:
        lines.append(f"  pending: {pending}")
    lines.append("")

    if r.lints:
        lines.append("lints:")
        for lint in r.lints:
            lines.append(f"  - {lint}")
        lines.append("")

    return "\n".join(lines)


# ---------------------------------------------------------------------------
# DOT rendering
# ---------------------------------------------------------------------------

#: Fixed visual vocabulary (documented in docs/style-table.md).
NODE_SHAPES = {
    "claim": "box",
    "assumption": "box",
    "residual": "box",
    "block": "diamond",
    "evidence": "note",
    "defeater": "octagon",
    "subcase": "folder",
}
ASSESSMENT_COLORS = {
    Assessment.TRUE: "palegreen",
    Assessment.FALSE: "lightcoral",
    Assessment.UNSUPPORTED: "lightgray",
}


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def _shape_key(n) -> str:
    if isinstance(n, Claim):
        if n.role is Role.ASSUMPTION:
            return "assumption"
        if n.role is Role.RESIDUAL:
            return "residual"
        return "claim"
    return n.node_kind


def render_dot(
    g: CaseGraph, m: Optional[AssessmentMap] = None, c: Optional[ConfidenceMap] = None
) -> str:
    """Graphviz DOT text: shape by node kind, fill color by assessment,
    optional confidence suffix on labels, distinct exact-defeater edges,
    dashed addressed defeaters."""
    lines = ["digraph case {", "  rankdir=TB;", '  node [style="filled", fontsize=10];']
    for node_id in g.ids():
        n = g.nodes[node_id]
        shape = NODE_SHAPES[_shape_key(n)]
        color = "white"
        if m is not None:
            color = ASSESSMENT_COLORS[m.values[node_id]]
        text = getattr(n, "text", None) or getattr(n, "description", None) or getattr(
            n, "claim_text", None
        ) or getattr(n, "top_claim_text", None) or (
            f"{n.kind.value}" if isinstance(n, Block) else ""
        )
        if len(text) > 40:
            text = text[:37] + "..."
        label = f"{node_id}\\n{_dot_escape(text)}" if text else node_id
        if c is not None and node_id in c.values:
            label += f"\\nconf={c.values[node_id]:.3g}"
        style = "filled"
        if isinstance(n, Claim) and n.role is Role.ASSUMPTION:
            style = "filled,rounded"
        if isinstance(n, Claim) and n.role is Role.RESIDUAL:
            style = "filled,dashed"
        if isinstance(n, Defeater) and n.status is DefeaterStatus.ADDRESSED:
            style = "filled,dashed"
        lines.append(
            f'  "{node_id}" [shape={shape}, style="{style}", fillcolor="{color}", label="{label}"];'
        )
    for node_id in g.ids():
        n = g.nodes[node_id]
        if isinstance(n, Block):
            lines.append(f'  "{n.parent}" -> "{n.id}";')
            for sub in n.subclaims:
                lines.append(f'  "{n.id}" -> "{sub}";')
            if n.sideclaim is not None:
                lines.append(f'  "{n.id}" -> "{n.sideclaim}" [style=dotted, label="side"];')
        elif isinstance(n, Defeater):
            attrs = ["color=firebrick"]
            if n.exactness is Exactness.EXACT:
                attrs += ["arrowhead=box", 'label="exact"']
            else:
                attrs += ["arrowhead=onormal"]
            if n.status is DefeaterStatus.ADDRESSED:
                attrs += ["style=dashed"]
            lines.append(f'  "{n.id}" -> "{n.target}" [{", ".join(attrs)}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON payloads (shared with the service)
# ---------------------------------------------------------------------------


def encode_float(v: float):
    """JSON-safe float: infinities become the strings "+inf"/"-inf"."""
    if math.isinf(v):
        return "+inf" if v > 0 else "-inf"
    return v


def structural_payload(findings: list) -> list:
    return [
        {"code": f.code, "node": f.node, "message": f.message, "blocking": f.blocking}
        for f in findings
    ]


def assessment_payload(m: Optional[AssessmentMap]) -> Optional[dict]:
    if m is None:
        return None
    return {
        "values": {k: v.value for k, v in sorted(m.values.items())},
        "causes": dict(sorted(m.causes.items())),
        "bypassed": sorted(m.bypassed),
        "warnings": list(m.warnings),
    }


def active_payload(active: list) -> list:
    return [
        {
            "defeater": a.defeater,
            "affected": a.affected,
            "assessment": a.assessment.value,
            "diagnosis": a.diagnosis,
        }
        for a in active
    ]


def soundness_payload(s: Soundness) -> dict:
    return {
        "soundness": "sound" if s.sound else "not-sound",
        "soundness_reasons": list(s.reasons),
    }


def confidence_payload(cmap: ConfidenceMap) -> dict:
    return {
        "method": cmap.method.value,
        "values": {k: v for k, v in sorted(cmap.values.items())},
        "provenance": dict(sorted(cmap.provenance.items())),
        "lints": list(cmap.lints),
        "caveat": cmap.caveat,
    }


def measures_payload(results: list, findings: list) -> dict:
    return {
        "measures": [
            {"measure": r.measure, "value": encode_float(r.value), "base": r.base} for r in results
        ],
        "findings": [
            {"code": f.code, "message": f.message, "delta": encode_float(f.delta)}
            for f in findings
        ],
    }


def risks_payload(
    entries: list,
    result: Optional[CategorizedRisks],
    gate: Optional[GateResult],
    pending: list,
    thresholds: RiskThresholds,
) -> dict:
    payload: dict = {
        "thresholds": {
            "individual": thresholds.individual,
            "class": thresholds.class_cumulative,
            "negligible": thresholds.negligible,
        },
        "entries": [],
        "classes": {},
        "gate": None,
        "pending": list(pending),
    }
    if result is not None:
        by_id = {e.node: e for e in entries}
        for node_id in sorted(result.categories):
            e = by_id[node_id]
            payload["entries"].append(
                {
                    "node": node_id,
                    "likelihood": e.likelihood,
                    "consequence": e.consequence,
                    "class": e.label,
                    "risk": result.risks[node_id],
                    "category": result.categories[node_id].value,
                }
            )
        payload["classes"] = {
            label: {
                "total_risk": verdict.total_risk,
                "manageable": verdict.manageable,
                "entries": list(verdict.entries),
            }
            for label, verdict in sorted(result.classes.items())
        }
    if gate is not None:
        payload["gate"] = {"acceptable": gate.acceptable, "offenders": list(gate.offenders)}
    return payload


def report_to_doc(r: CaseReport) -> dict:
    return {
        "case": r.title,
        "soundness": "sound" if r.soundness.sound else "not-sound",
        "soundness_reasons": list(r.soundness.reasons),
        "structural_findings": structural_payload(r.structural_findings),
        "assessment": assessment_payload(r.assessment),
        "active_defeaters": active_payload(r.active),
        "confidence": {name: confidence_payload(cmap) for name, cmap in sorted(r.confidences.items())}
        or {"note": r.confidence_note or "not evaluated"},
        "measures": {
            evidence_id: measures_payload(results, findings)
            for evidence_id, (results, findings) in sorted(r.measures.items())
        },
        "risks": risks_payload(
            r.risk_entries, r.risk_result, r.risk_gate, r.risk_pending, r.thresholds
        ),
        "base": r.base,
        "lints": list(r.lints),
    }


def render_report_json(r: CaseReport) -> str:
    import json

    return json.dumps(report_to_doc(r), indent=2, sort_keys=True) + "\n"
