"""Assurance-case toolkit.

Represent structured assurance arguments as typed graphs and evaluate
them along four perspectives: three-valued logical validity with
defeaters, probabilistic confidence propagation, confirmation-measure
assessment of evidence, and residual-risk categorization.
"""

from .caseformat import (
    ParseDiagnostic,
    ParseResult,
    SourceSpan,
    graphs_isomorphic,
    parse_case,
    serialize_case,
)
from .confidence import (
    ConfidenceInput,
    ConfidenceMap,
    Method,
    propagate_confidence,
    structure_sensitivity_report,
)
from .measures import (
    ConsistencyFinding,
    DomainError,
    Elicitation,
    Level,
    MeasureResult,
    carnap,
    cross_check,
    diversity_boost,
    good,
    keynes,
    l_keynes,
    qualitative_to_probability,
)
from .model import (
    Assessment,
    Block,
    BlockKind,
    CaseGraph,
    Claim,
    CycleDetected,
    DanglingReference,
    Defeater,
    DefeaterStatus,
    DuplicateId,
    Evidence,
    Exactness,
    InvalidNode,
    Mode,
    Role,
    StructuralFinding,
    Subcase,
    TargetNotFound,
    affected_claim,
    build_graph,
    structural_check,
)
from .report import CaseReport, build_report, render_dot, render_report_json, render_text
from .risk import (
    GateResult,
    ResidualEntry,
    RiskCategory,
    RiskThresholds,
    categorize,
    collect_residual_entries,
    final_gate,
    score_residual,
)
from .validity import (
    ActiveDefeater,
    AssessmentMap,
    LeafInputs,
    PreconditionViolated,
    Soundness,
    active_defeaters,
    assess_validity,
    soundness_gate,
)

__version__ = "0.1.0"
