"""Probabilistic confidence propagation over the positive argument.

Two bottom-up calculations are supported for a reasoning step with
side-claim confidence ``w`` and subclaim confidences ``s_1 .. s_n``:

* product:        parent = w * s_1 * ... * s_n
* sum of doubts:  parent = max(0, w + s_1 + ... + s_n - n)

The sum-of-doubts form is the lower bound of the inequality "doubt in the
parent is no worse than the sum of doubts in the antecedents", clamped at
zero so all outputs stay in [0,1].  It is never above the product value.

Only the conjunctive positive argument is propagated: disjunctive
decompositions, defeaters, and their subcases have no defined calculation
and are reported as not applicable.  Residual doubts are bypassed unless
an explicit numeric estimate is supplied, in which case they participate
as ordinary antecedents.

The absolute values produced carry little significance; they support
relative comparisons between arguments and parts of arguments, and every
report carries that caveat.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional

from .model import (
    Block,
    CaseGraph,
    Claim,
    Defeater,
    Evidence,
    Exactness,
    Mode,
    Role,
    Subcase,
)
from .validity import LeafInputs, PreconditionViolated, soundness_gate

CONFIDENCE_CAVEAT = (
    "absolute confidence values carry little significance; "
    "use them to compare alternatives, not as probabilities of truth"
)


class Method(str, Enum):
    PRODUCT = "product"
    DOUBTS = "sum-of-doubts"


@dataclass(frozen=True)
class ConfidenceInput:
    """Leaf confidences and manual overrides.

    Evidence posteriors default to the node's useful-claim posterior (or
    its elicited posterior); assumptions default to their assumed_prob.
    Overrides are only legal on interior claims and on steps.
    """

    evidence_posterior: Mapping[str, float] = field(default_factory=dict)
    assumption_prob: Mapping[str, float] = field(default_factory=dict)
    residual_estimate: Mapping[str, float] = field(default_factory=dict)
    subcase_confidence: Mapping[str, float] = field(default_factory=dict)
    overrides: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class ConfidenceMap:
    """Per-node confidence with provenance.

    ``values`` covers the nodes the calculation applies to; ``provenance``
    covers every node (leaf | propagated | overridden | residual-bypass |
    not-applicable).
    """

    method: Method
    values: Mapping[str, float]
    provenance: Mapping[str, str]
    lints: tuple
    caveat: str = CONFIDENCE_CAVEAT

    def value(self, node_id: str) -> Optional[float]:
        return self.values.get(node_id)


_BYPASS = object()


def check_overrides(g: CaseGraph, inp: ConfidenceInput) -> None:
    for node_id, v in inp.overrides.items():
        if node_id not in g.nodes:
            raise PreconditionViolated(f"override on unknown node {node_id}")
        n = g.nodes[node_id]
        interior_claim = isinstance(n, Claim) and n.role not in (Role.ASSUMPTION, Role.RESIDUAL) and g.supports.get(node_id)
        if not (interior_claim or isinstance(n, Block)):
            raise PreconditionViolated(
                f"override on {node_id}: overrides are only allowed on interior claims or steps"
            )
        if not 0.0 <= float(v) <= 1.0:
            raise PreconditionViolated(f"override on {node_id} must lie in [0,1], got {v!r}")


def _evidence_value(e: Evidence, inp: ConfidenceInput) -> Optional[float]:
    if e.id in inp.evidence_posterior:
        return float(inp.evidence_posterior[e.id])
    if e.posterior_useful is not None:
        return e.posterior_useful
    if e.elicitation is not None and e.elicitation.posterior is not None:
        return e.elicitation.value("posterior")
    return None


class _Propagation:
    """One propagation pass; collects values, provenance, and lints."""

    def __init__(self, g: CaseGraph, inp: ConfidenceInput, method: Method):
        self.g = g
        self.inp = inp
        self.method = method
        self.values: dict[str, float] = {}
        self.provenance: dict[str, str] = {}
        self.lints: list[str] = []
        self.memo: dict[str, object] = {}

    def lint(self, message: str) -> None:
        if message not in self.lints:
            self.lints.append(message)

    def record(self, node_id: str, value: Optional[float], prov: str) -> None:
        self.provenance[node_id] = prov
        if value is not None:
            self.values[node_id] = value

    def combine(self, w: float, subs: list[float]) -> float:
        if self.method is Method.PRODUCT:
            out = w
            for s in subs:
                out *= s
            return out
        return max(0.0, w + sum(subs) - len(subs))

    def conf(self, node_id: str):
        if node_id in self.memo:
            return self.memo[node_id]
        out = self._conf(node_id)
        self.memo[node_id] = out
        return out

    def _conf(self, node_id: str):
        g, inp = self.g, self.inp
        n = g.nodes[node_id]
        if isinstance(n, Claim):
            if n.role is Role.ASSUMPTION:
                v = float(inp.assumption_prob.get(node_id, n.assumed_prob))
                self.record(node_id, v, "leaf")
                return v
            if n.role is Role.RESIDUAL:
                if node_id in inp.residual_estimate:
                    v = float(inp.residual_estimate[node_id])
                    self.record(node_id, v, "leaf")
                    return v
                self.record(node_id, None, "residual-bypass")
                return _BYPASS
            return self._claim_conf(n)
        if isinstance(n, Evidence):
            v = _evidence_value(n, inp)
            if v is None:
                self.lint(
                    f"evidence {node_id} has no useful-claim posterior; it contributes neutrally (1.0)"
                )
                v = 1.0
            self.record(node_id, v, "leaf")
            return v
        if isinstance(n, Subcase):
            if node_id in inp.subcase_confidence:
                v = float(inp.subcase_confidence[node_id])
            else:
                from .model import Assessment

                v = 1.0 if n.assessed is Assessment.TRUE else 0.0
                self.lint(
                    f"subcase {node_id} has no supplied confidence; defaulted to {v} "
                    "from its external assessment"
                )
            self.record(node_id, v, "leaf")
            return v
        assert isinstance(n, Block)
        return self._step_conf(n)

    def _claim_conf(self, n: Claim) -> float:
        g, inp = self.g, self.inp
        steps = [g.nodes[b] for b in g.supports.get(n.id, ())]
        applicable = []
        for b in steps:
            assert isinstance(b, Block)
            if b.mode is Mode.DISJUNCTIVE:
                self.lint(
                    f"disjunctive decomposition {b.id} is excluded from confidence propagation "
                    "(not applicable)"
                )
                self.record(b.id, None, "not-applicable")
            else:
                applicable.append(b)
        exact = [
            d
            for d in g.targeted_by.get(n.id, ())
            if isinstance(g.nodes[d], Defeater)
            and g.nodes[d].exactness is Exactness.EXACT  # type: ignore[union-attr]
        ]
        if exact:
            self.lint(
                f"claim {n.id} is established through exact defeater {exact[0]}; "
                "confidence propagation does not apply and it contributes neutrally (1.0)"
            )
            self.record(n.id, None, "not-applicable")
            return 1.0
        if not applicable:
            self.lint(f"claim {n.id} has no conjunctive support; it contributes neutrally (1.0)")
            self.record(n.id, None, "not-applicable")
            return 1.0
        if len(applicable) > 1:
            self.lint(
                f"claim {n.id} has multiple supporting steps; their values are combined "
                "conjunctively and shared leaves are double-counted"
            )
        vals = [self._visible_step(b) for b in applicable]
        v = self.combine(1.0, vals) if len(vals) > 1 else vals[0]
        if n.id in inp.overrides:
            v = float(inp.overrides[n.id])
            self.record(n.id, v, "overridden")
        else:
            self.record(n.id, v, "propagated")
        return v

    def _visible_step(self, b: Block) -> float:
        v = self.conf(b.id)
        return 1.0 if v is _BYPASS else v  # blocks never bypass; defensive

    def _step_conf(self, b: Block) -> float:
        g, inp = self.g, self.inp
        w = 1.0
        if b.sideclaim is not None:
            sv = self.conf(b.sideclaim)
            if sv is _BYPASS:
                self.lint(f"side-claim {b.sideclaim} of {b.id} is a bypassed residual doubt")
                sv = 1.0
            w = sv
        subs = []
        for sub in b.subclaims:
            sv = self.conf(sub)
            if sv is _BYPASS:
                continue
            subs.append(sv)
        v = self.combine(w, subs)
        if b.id in inp.overrides:
            v = float(inp.overrides[b.id])
            self.record(b.id, v, "overridden")
        else:
            self.record(b.id, v, "propagated")
        return v


def propagate_confidence(
    g: CaseGraph,
    inp: Optional[ConfidenceInput] = None,
    method: Method = Method.PRODUCT,
    *,
    exploratory: bool = False,
    leaf_inputs: Optional[LeafInputs] = None,
) -> ConfidenceMap:
    """Propagate confidence bottom-up from the leaves to the top claim.

    Requires a sound case (per soundness_gate, evaluated with
    ``leaf_inputs``) unless ``exploratory`` acknowledges unsound input.
    """
    inp = inp or ConfidenceInput()
    method = Method(method)
    check_overrides(g, inp)
    if g.top is None:
        raise PreconditionViolated("case has no single top claim; cannot propagate confidence")
    if not exploratory:
        verdict = soundness_gate(g, None, leaf_inputs)
        if not verdict.sound:
            raise PreconditionViolated(
                "case is not sound; pass exploratory=True to propagate anyway: "
                + "; ".join(verdict.reasons[:3])
            )

    run = _Propagation(g, inp, method)
    run.conf(g.top)
    for node_id in g.ids():
        if node_id not in run.provenance:
            run.provenance[node_id] = "not-applicable"
    return ConfidenceMap(
        method=method,
        values=dict(sorted(run.values.items())),
        provenance=dict(sorted(run.provenance.items())),
        lints=tuple(sorted(run.lints)),
    )


@dataclass(frozen=True)
class Excision:
    """Effect on top confidence of removing one leaf subtree."""

    leaf: str
    leaf_value: float
    multiplicity: int
    top_without: float
    increases: bool


@dataclass(frozen=True)
class SensitivityReport:
    """Structure-insensitivity diagnostics for the product calculation.

    The product value at any interior node equals the product over the
    leaves of its subtree (with multiplicity for shared subclaims), so
    reshaping the argument without changing leaf confidence has no effect
    on the top value, and excising any subtree with product < 1 raises it.
    """

    top: str
    top_value: float
    leaf_multiset: Mapping[str, Mapping[str, int]]  # interior node -> leaf -> multiplicity
    shared_leaves: tuple
    excisions: tuple
    lints: tuple
    caveat: str = CONFIDENCE_CAVEAT


def structure_sensitivity_report(
    g: CaseGraph, inp: Optional[ConfidenceInput] = None
) -> SensitivityReport:
    """Leaf multisets, double-counting warnings, and excision effects.

    Overrides are ignored here (and flagged): the identities being
    reported hold for the raw recursive product only.
    """
    inp = inp or ConfidenceInput()
    lints: list[str] = []
    if inp.overrides:
        lints.append("manual overrides are ignored by the sensitivity analysis")
        inp = ConfidenceInput(
            evidence_posterior=inp.evidence_posterior,
            assumption_prob=inp.assumption_prob,
            residual_estimate=inp.residual_estimate,
            subcase_confidence=inp.subcase_confidence,
        )
    cmap = propagate_confidence(g, inp, Method.PRODUCT, exploratory=True)
    lints.extend(cmap.lints)

    leaf_kinds = ("leaf",)
    multisets: dict[str, Counter] = {}

    def expand(node_id: str) -> Counter:
        if node_id in multisets:
            return multisets[node_id]
        prov = cmap.provenance.get(node_id)
        out: Counter = Counter()
        if prov in leaf_kinds:
            out[node_id] = 1
        elif prov == "propagated":
            n = g.nodes[node_id]
            if isinstance(n, Block):
                if n.sideclaim is not None:
                    out += expand(n.sideclaim)
                for sub in n.subclaims:
                    out += expand(sub)
            else:
                for b in g.supports.get(node_id, ()):
                    if cmap.provenance.get(b) != "not-applicable":
                        out += expand(b)
        multisets[node_id] = out
        return out

    top_multiset = expand(g.top)
    top_value = cmap.values[g.top]

    shared = tuple(sorted(leaf for leaf, count in top_multiset.items() if count > 1))
    for node_id in sorted(g.subclaim_of):
        if len(g.subclaim_of[node_id]) > 1:
            lints.append(f"claim {node_id} is a subclaim of multiple steps; "
                         "the product rule double-counts its leaves")

    excisions = []
    for leaf in sorted(top_multiset):
        count = top_multiset[leaf]
        leaf_value = cmap.values[leaf]
        top_without = 1.0
        for other, mult in top_multiset.items():
            if other != leaf:
                top_without *= cmap.values[other] ** mult
        excisions.append(
            Excision(
                leaf=leaf,
                leaf_value=leaf_value,
                multiplicity=count,
                top_without=top_without,
                increases=leaf_value**count < 1.0,
            )
        )
    lints.append(
        "excising any subtree whose leaf product is below 1 will increase top confidence; "
        "restoring deductiveness after a change is a separate obligation"
    )

    interior = {
        node_id: dict(sorted(counter.items()))
        for node_id, counter in multisets.items()
        if counter and cmap.provenance.get(node_id) == "propagated"
    }

    return SensitivityReport(
        top=g.top,
        top_value=top_value,
        leaf_multiset=interior,
        shared_leaves=shared,
        excisions=tuple(excisions),
        lints=tuple(dict.fromkeys(lints)),
    )
